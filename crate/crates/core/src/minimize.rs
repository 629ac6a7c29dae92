//! Bracketed golden-section search for unimodal functions of one variable.
//!
//! Each step shrinks the bracket `[lo, hi]` by the inverse golden ratio and
//! reuses one of the two interior evaluations, so a step costs a single
//! function call.

use crate::error::{domain, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x: T,
    pub value: T,
    pub iterations: usize,
}

pub fn golden_section<T, F>(f: F, lo: T, hi: T, xtol: T, max_iter: usize) -> Result<Minimum<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(lo < hi) || !(xtol > T::zero()) {
        return domain(format!("bad bracket [{lo}, {hi}] or tolerance {xtol}"));
    }
    // 1/φ
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > xtol {
        if iterations == max_iter {
            return domain(format!(
                "golden section did not reach width {xtol} in {max_iter} iterations"
            ));
        }
        iterations += 1;
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(Minimum {
        x,
        value,
        iterations,
    })
}
