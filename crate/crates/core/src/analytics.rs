//! Closed-form transmission, gate-success and resource formulas.
//!
//! Conventions: `alpha` is the fiber attenuation coefficient (1/km), `d` the
//! spacing between transponders (km), `x = alpha·d`, and `n` the number of
//! ancilla pairs spent on each two-qubit gate.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::minimize::golden_section;
use crate::scalar::Real;

/// Physical and engineering parameters of one transponder link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransponderParams<T> {
    /// Attenuation coefficient, 1/km.
    pub alpha: T,
    /// Transponder spacing (or loop circumference), km.
    pub d: T,
    /// Ancilla pairs per two-qubit gate.
    pub n: u32,
    /// Photodetector efficiency.
    pub eta: T,
    /// One-qubit gate success probability.
    pub p_one: T,
    /// Single-photon-gun success probability.
    pub p_spg: T,
    /// Signal speed in the fiber, km/s.
    pub nu: T,
}

impl<T: Real> TransponderParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero()) || !(self.d >= T::zero()) {
            return domain(format!(
                "alpha = {}, d = {} must be >= 0",
                self.alpha, self.d
            ));
        }
        if !(self.nu > T::zero()) || !self.nu.is_finite() {
            return domain(format!("nu = {} must be positive", self.nu));
        }
        if self.n == 0 {
            return domain("n must be at least 1");
        }
        for (name, p) in [
            ("eta", self.eta),
            ("p_one", self.p_one),
            ("p_spg", self.p_spg),
        ] {
            check_probability(name, p)?;
        }
        Ok(())
    }

    /// Normalized spacing `alpha·d`.
    pub fn x(&self) -> T {
        self.alpha * self.d
    }
}

impl Default for TransponderParams<f64> {
    /// 30 km absorption length, 10 km spacing, perfect components, n = 56,
    /// light at 2×10⁵ km/s.
    fn default() -> Self {
        Self {
            alpha: 1.0 / 30.0,
            d: 10.0,
            n: 56,
            eta: 1.0,
            p_one: 1.0,
            p_spg: 1.0,
            nu: 2.0e5,
        }
    }
}

fn check_probability<T: Real>(name: &str, p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return domain(format!("{name} = {p} outside [0, 1]"));
    }
    Ok(())
}

/// Single-photon survival over length `d`: `exp(-alpha·d)`.
pub fn survival_prob<T: Real>(alpha: T, d: T) -> Result<T> {
    if !(alpha >= T::zero()) || !(d >= T::zero()) {
        return domain(format!("survival needs alpha, d >= 0 (got {alpha}, {d})"));
    }
    Ok((-alpha * d).exp())
}

/// Probability that at most one of the four photons is lost.
pub fn p_f<T: Real>(p: T) -> Result<T> {
    check_probability("p", p)?;
    let p3 = p * p * p;
    Ok(p3 * p + T::lit(4.0) * p3 * (T::one() - p))
}

/// `ln(4 - 3e^{-x})`, accurate for small `x`.
fn log_four_minus_three_exp<T: Real>(x: T) -> T {
    (-T::lit(3.0) * (-x).exp_m1()).ln_1p()
}

/// Effective attenuation of the encoded channel,
/// `3α - ln(4 - 3e^{-αd})/d = -ln(p_f)/d`.
pub fn alpha_prime<T: Real>(alpha: T, d: T) -> Result<T> {
    if !(alpha >= T::zero()) || !(d > T::zero()) {
        return domain(format!(
            "alpha_prime needs alpha >= 0, d > 0 (got {alpha}, {d})"
        ));
    }
    Ok(T::lit(3.0) * alpha - log_four_minus_three_exp(alpha * d) / d)
}

/// `α'/2α` as a function of `x = αd`; below 1 exactly when `x < ln 3`.
pub fn f<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return domain(format!("f needs x > 0 (got {x})"));
    }
    if x < T::lit(1e-6) {
        // 3x - 7x² + 73x³/4 + O(x⁴)
        return Ok(x * (T::lit(3.0) + x * (T::lit(-7.0) + x * T::lit(18.25))));
    }
    Ok(T::lit(1.5) - log_four_minus_three_exp(x) / (T::lit(2.0) * x))
}

/// Success probability of one post-selected two-qubit gate using `2n`
/// ancillae: `(n/(n+1))²`.
pub fn gate_success<T: Real>(n: u32) -> Result<T> {
    if n == 0 {
        return domain("gate_success needs n >= 1");
    }
    let ratio = T::lit(f64::from(n)) / T::lit(f64::from(n) + 1.0);
    Ok(ratio * ratio)
}

/// Relative absorption coefficient with imperfect gates:
/// `f(x) + ln(1/p_t)/(2x)`.
pub fn r<T: Real>(x: T, p_t: T) -> Result<T> {
    if !(p_t > T::zero() && p_t <= T::one()) {
        return domain(format!("r needs p_t in (0, 1] (got {p_t})"));
    }
    Ok(f(x)? - p_t.ln() / (T::lit(2.0) * x))
}

/// Transponder success from the eight two-qubit gates alone: `(n/(n+1))^16`.
pub fn p_t_aggregate<T: Real>(n: u32) -> Result<T> {
    Ok(gate_success::<T>(n)?.powi(8))
}

/// Transponder success with every component counted:
/// `p_one^38 · p_two^16 · p_spg^(10+32n) · η^(10+32n)`.
///
/// The factors with large exponents are combined in the log domain.
pub fn p_t_full<T: Real>(params: &TransponderParams<T>) -> Result<T> {
    params.validate()?;
    let p_two = gate_success::<T>(params.n)?;
    let k = T::lit(10.0 + 32.0 * f64::from(params.n));
    let log_rest = T::lit(38.0) * params.p_one.ln() + k * (params.p_spg.ln() + params.eta.ln());
    Ok(p_two.powi(16) * log_rest.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RMinimum<T> {
    pub x_star: T,
    pub r_star: T,
}

/// Search interval and defaults for [`min_r_over_x`].
pub const X_SEARCH_LO: f64 = 1e-9;
pub const X_SEARCH_HI: f64 = 10.0;
pub const X_TOLERANCE: f64 = 1e-9;
const MAX_ITERATIONS: usize = 200;

/// Optimal spacing for a given transponder success probability. The
/// bracket tolerance is [`X_TOLERANCE`], widened to a few ulps of `x` for
/// `f32`, which cannot resolve `1e-9` near `x ≈ 0.4`.
pub fn min_r_over_x<T: Real>(p_t: T) -> Result<RMinimum<T>> {
    let xtol = T::lit(X_TOLERANCE).max(T::lit(16.0) * T::epsilon());
    min_r_over_x_with_tol(p_t, xtol)
}

pub fn min_r_over_x_with_tol<T: Real>(p_t: T, xtol: T) -> Result<RMinimum<T>> {
    r(T::one(), p_t)?;
    let objective = |x: T| r(x, p_t).unwrap_or_else(|_| T::infinity());
    let m = golden_section(
        objective,
        T::lit(X_SEARCH_LO),
        T::lit(X_SEARCH_HI),
        xtol,
        MAX_ITERATIONS,
    )?;
    Ok(RMinimum {
        x_star: m.x,
        r_star: m.value,
    })
}

const THRESHOLD_SCAN_LIMIT: u32 = 100_000;

/// Smallest `n` for which the optimally spaced chain beats bare fiber
/// (`min_x r < 1`) with `p_t = (n/(n+1))^16`.
pub fn threshold_n() -> Result<u32> {
    threshold_n_with_tol(X_TOLERANCE)
}

pub fn threshold_n_with_tol(xtol: f64) -> Result<u32> {
    for n in 1..=THRESHOLD_SCAN_LIMIT {
        if min_r_over_x_with_tol(p_t_aggregate::<f64>(n)?, xtol)?.r_star < 1.0 {
            return Ok(n);
        }
    }
    domain(format!("no threshold below n = {THRESHOLD_SCAN_LIMIT}"))
}

/// Stage of the component breakdown, from the raw transponder to
/// ancilla photons and detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionLevel {
    /// Components as drawn: guns, QND devices, gates, detectors.
    Raw,
    /// QND devices expanded into guns, CNOTs, Hadamards and detectors.
    I,
    /// CNOTs rewritten as CZ plus two one-qubit gates.
    Ii,
    /// CZs expanded into `2n` ancilla photons and `2(n+1)` detectors each.
    Iii,
}

impl ReductionLevel {
    pub const ALL: [ReductionLevel; 4] = [
        ReductionLevel::Raw,
        ReductionLevel::I,
        ReductionLevel::Ii,
        ReductionLevel::Iii,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ReductionLevel::Raw => "raw",
            ReductionLevel::I => "i",
            ReductionLevel::Ii => "ii",
            ReductionLevel::Iii => "iii",
        }
    }
}

impl std::str::FromStr for ReductionLevel {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        ReductionLevel::ALL
            .into_iter()
            .find(|l| l.label() == s.to_ascii_lowercase())
            .map_or_else(|| domain(format!("unknown reduction level {s:?}")), Ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceCount {
    pub reduction_level: ReductionLevel,
    pub spg: u64,
    pub qnd: u64,
    pub cnot: u64,
    pub cz: u64,
    pub one_qubit: u64,
    pub pd: u64,
}

/// Component counts per transponder at the given reduction level, built
/// by applying each substitution rule in turn.
pub fn resources(n: u32, level: ReductionLevel) -> Result<ResourceCount> {
    if n == 0 {
        return domain("resources need n >= 1");
    }
    let n = u64::from(n);
    let mut c = ResourceCount {
        reduction_level: ReductionLevel::Raw,
        spg: 2,
        qnd: 4,
        cnot: 4,
        cz: 4,
        one_qubit: 6,
        pd: 2,
    };
    for step in &ReductionLevel::ALL[1..] {
        if c.reduction_level == level {
            break;
        }
        match step {
            ReductionLevel::I => {
                // QND = Bell-pair preparation + Bell measurement.
                c.spg += 2 * c.qnd;
                c.cnot += 2 * c.qnd;
                c.one_qubit += 2 * c.qnd;
                c.pd += 2 * c.qnd;
                c.qnd = 0;
            }
            ReductionLevel::Ii => {
                c.cz += c.cnot;
                c.one_qubit += 2 * c.cnot;
                c.cnot = 0;
            }
            ReductionLevel::Iii => {
                c.spg += 2 * n * c.cz;
                c.pd += 2 * (n + 1) * c.cz;
            }
            ReductionLevel::Raw => unreachable!(),
        }
        c.reduction_level = *step;
    }
    Ok(c)
}

/// Two-photon storage time of a bare fiber loop, `1/(2αν)`.
pub fn storage_time<T: Real>(alpha: T, nu: T) -> Result<T> {
    if !(alpha > T::zero()) || !(nu > T::zero()) {
        return domain(format!(
            "storage time needs alpha, nu > 0 (got {alpha}, {nu})"
        ));
    }
    Ok(T::one() / (T::lit(2.0) * alpha * nu))
}

/// Storage time with an in-loop transponder, `T_f / r`.
pub fn improved_storage_time<T: Real>(alpha: T, nu: T, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return domain(format!("r = {r} must be positive"));
    }
    Ok(storage_time(alpha, nu)? / r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_anchors() {
        assert_eq!(survival_prob(0.0, 5.0).unwrap(), 1.0);
        assert!((survival_prob(1.0f64 / 30.0, 30.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((survival_prob(1.0f64, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!(survival_prob(-1.0, 1.0).is_err());
    }

    #[test]
    fn p_f_endpoints() {
        assert_eq!(p_f(1.0).unwrap(), 1.0);
        assert_eq!(p_f(0.0).unwrap(), 0.0);
        assert!(p_f(1.5).is_err());
    }

    #[test]
    fn alpha_prime_domain() {
        assert!(alpha_prime(0.1, 0.0).is_err());
        assert_eq!(alpha_prime(0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn f_series_branch_is_continuous() {
        let below = f(0.999_999e-6f64).unwrap();
        let above = f(1.000_001e-6).unwrap();
        assert!((below - above).abs() < 1e-11);
        assert!(f(0.0).is_err());
    }

    #[test]
    fn gate_success_values() {
        assert_eq!(gate_success::<f64>(1).unwrap(), 0.25);
        assert!(gate_success::<f64>(0).is_err());
    }

    #[test]
    fn r_domain() {
        assert!(r(1.0, 0.0).is_err());
        assert!(r(1.0, 1.1).is_err());
        assert!(r(0.0, 0.5).is_err());
    }

    #[test]
    fn storage_time_scaling() {
        let tf = storage_time(1.0f64 / 30.0, 2.0e5).unwrap();
        assert!((tf - 75e-6).abs() < 1e-18);
        assert_eq!(improved_storage_time(1.0 / 30.0, 2.0e5, 1.0).unwrap(), tf);
        assert!(
            (improved_storage_time(1.0f64 / 30.0, 2.0e5, 0.5).unwrap() - 2.0 * tf).abs() < 1e-18
        );
        assert!(improved_storage_time(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn level_parsing() {
        assert_eq!(
            "iii".parse::<ReductionLevel>().unwrap(),
            ReductionLevel::Iii
        );
        assert_eq!(
            "RAW".parse::<ReductionLevel>().unwrap(),
            ReductionLevel::Raw
        );
        assert!("iv".parse::<ReductionLevel>().is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = TransponderParams::default();
        assert!(p.validate().is_ok());
        p.eta = 1.2;
        assert!(p.validate().is_err());
        let p = TransponderParams {
            n: 0,
            ..TransponderParams::default()
        };
        assert!(p.validate().is_err());
        let p = TransponderParams {
            nu: 0.0,
            ..TransponderParams::default()
        };
        assert!(p.validate().is_err());
    }
}
