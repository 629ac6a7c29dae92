//! Grids over `(x, p_t)` for the relative absorption coefficient and over
//! `(n, η)` for transponder success.

use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;

use crate::analytics::{p_t_full, r, TransponderParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Log,
    Linear,
}

/// `steps` points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl SweepRange {
    pub fn new(lo: f64, hi: f64, steps: usize, scale: Scale) -> Result<Self> {
        let range = Self {
            lo,
            hi,
            steps,
            scale,
        };
        range.validate()?;
        Ok(range)
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 || !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Config(format!(
                "range {},{},{} needs lo < hi and steps >= 2",
                self.lo, self.hi, self.steps
            )));
        }
        if self.scale == Scale::Log && self.lo <= 0.0 {
            return Err(Error::Config("log range needs lo > 0".into()));
        }
        Ok(())
    }

    pub fn with_scale(mut self, scale: Scale) -> Result<Self> {
        self.scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                match (i, self.scale) {
                    (0, _) => self.lo,
                    (i, _) if i + 1 == self.steps => self.hi,
                    (_, Scale::Linear) => self.lo + (self.hi - self.lo) * t,
                    (_, Scale::Log) => self.lo * (self.hi / self.lo).powf(t),
                }
            })
            .collect()
    }

    /// Rounded, de-duplicated integer points.
    pub fn integer_points(&self) -> Vec<u32> {
        let mut ns: Vec<u32> = self
            .points()
            .into_iter()
            .map(|v| v.round().max(1.0) as u32)
            .collect();
        ns.dedup();
        ns
    }
}

/// Parses `lo,hi,steps`; the scale is supplied separately.
impl FromStr for SweepRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Config(format!("expected lo,hi,steps but got {s:?}"));
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(bad());
        };
        Ok(Self {
            lo: lo.parse().map_err(|_| bad())?,
            hi: hi.parse().map_err(|_| bad())?,
            steps: steps.parse().map_err(|_| bad())?,
            scale: Scale::Linear,
        })
    }
}

pub const DEFAULT_X_RANGE: &str = "0.01,3,300";
pub const DEFAULT_PT_RANGE: &str = "0.5,1,200";
pub const DEFAULT_N_RANGE: &str = "1,1000,100";
/// The success probability a useful transponder has to beat.
pub const REFERENCE_P_T: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RRow {
    pub x: f64,
    pub p_t: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub x: f64,
    pub p_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RSweep {
    pub steps_x: usize,
    pub steps_pt: usize,
    pub rows: Vec<RRow>,
    /// Where `r = 1`, interpolated along `p_t` for every `x` that crosses.
    pub contour: Vec<ContourPoint>,
    /// Contour point with the smallest `p_t`.
    pub contour_minimum: Option<ContourPoint>,
    /// Vertex of the parabola through the minimum and its two neighbours.
    pub contour_minimum_refined: Option<ContourPoint>,
}

/// Rows are ordered by `x`, then `p_t`.
pub fn sweep_r(x: &SweepRange, p_t: &SweepRange) -> Result<RSweep> {
    if x.lo <= 0.0 || p_t.lo <= 0.0 || p_t.hi > 1.0 {
        return Err(Error::Config(
            "sweep-r needs x > 0 and p_t in (0, 1]".into(),
        ));
    }
    let xs = x.points();
    let pts = p_t.points();
    let mut rows = Vec::with_capacity(xs.len() * pts.len());
    let mut contour = Vec::new();
    for &xv in &xs {
        let column: Vec<RRow> = pts
            .iter()
            .map(|&pv| {
                Ok(RRow {
                    x: xv,
                    p_t: pv,
                    r: r(xv, pv)?,
                })
            })
            .collect::<Result<_>>()?;
        if let Some(p) = unit_crossing(&column) {
            contour.push(ContourPoint { x: xv, p_t: p });
        }
        rows.extend(column);
    }
    let min_index = contour
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.p_t.total_cmp(&b.1.p_t))
        .map(|(k, _)| k);
    let contour_minimum = min_index.map(|k| contour[k]);
    let contour_minimum_refined = min_index.and_then(|k| refine_vertex(&contour, k));
    Ok(RSweep {
        steps_x: xs.len(),
        steps_pt: pts.len(),
        rows,
        contour,
        contour_minimum,
        contour_minimum_refined,
    })
}

/// `p_t` at which `r` crosses 1 within one `x` column. `r` is affine in
/// `ln p_t`, so interpolating in the log is exact.
fn unit_crossing(column: &[RRow]) -> Option<f64> {
    column.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (a.r - 1.0, b.r - 1.0);
        if ga == 0.0 {
            Some(a.p_t)
        } else if ga * gb < 0.0 || gb == 0.0 {
            let t = ga / (ga - gb);
            Some((a.p_t.ln() + t * (b.p_t.ln() - a.p_t.ln())).exp())
        } else {
            None
        }
    })
}

fn refine_vertex(contour: &[ContourPoint], k: usize) -> Option<ContourPoint> {
    if k == 0 || k + 1 >= contour.len() {
        return None;
    }
    let (p0, p1, p2) = (contour[k - 1], contour[k], contour[k + 1]);
    // Newton divided differences of p_t(x).
    let d01 = (p1.p_t - p0.p_t) / (p1.x - p0.x);
    let d12 = (p2.p_t - p1.p_t) / (p2.x - p1.x);
    let c = (d12 - d01) / (p2.x - p0.x);
    if !(c > 0.0) {
        return None;
    }
    // p(x) = p0 + d01 (x - x0) + c (x - x0)(x - x1)
    let x = (p0.x + p1.x) / 2.0 - d01 / (2.0 * c);
    let p_t = p0.p_t + d01 * (x - p0.x) + c * (x - p0.x) * (x - p1.x);
    Some(ContourPoint { x, p_t })
}

/// Second divided differences of the contour are all ≥ `-tol`.
pub fn contour_is_convex(contour: &[ContourPoint], tol: f64) -> bool {
    contour.windows(3).all(|w| {
        let d01 = (w[1].p_t - w[0].p_t) / (w[1].x - w[0].x);
        let d12 = (w[2].p_t - w[1].p_t) / (w[2].x - w[1].x);
        (d12 - d01) / (w[2].x - w[0].x) >= -tol
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PtRow {
    pub n: u32,
    pub eta: f64,
    pub p_t_full: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PtCurve {
    pub eta: f64,
    pub max_p_t: f64,
    pub n_at_max: u32,
    /// First grid `n` whose success exceeds the reference line.
    pub first_n_above_reference: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtSweep {
    pub reference_line: f64,
    pub p_one: f64,
    pub p_spg: f64,
    pub rows: Vec<PtRow>,
    pub curves: Vec<PtCurve>,
}

/// Detector efficiencies 1, 1−10⁻⁶, 1−10⁻⁵, 1−10⁻⁴·⁵.
pub fn default_etas() -> Vec<f64> {
    vec![1.0, 1.0 - 1e-6, 1.0 - 1e-5, 1.0 - 10f64.powf(-4.5)]
}

/// Rows are ordered by `eta` (as given), then `n`.
pub fn sweep_pt(ns: &[u32], etas: &[f64], p_one: f64, p_spg: f64) -> Result<PtSweep> {
    if ns.is_empty() || etas.is_empty() {
        return Err(Error::Config(
            "sweep-pt needs at least one n and one eta".into(),
        ));
    }
    let mut rows = Vec::with_capacity(ns.len() * etas.len());
    let mut curves = Vec::with_capacity(etas.len());
    for &eta in etas {
        let mut best = (f64::NEG_INFINITY, 0);
        let mut first_above = None;
        for &n in ns {
            let params = TransponderParams {
                n,
                eta,
                p_one,
                p_spg,
                ..TransponderParams::default()
            };
            let p = p_t_full(&params)?;
            if p > best.0 {
                best = (p, n);
            }
            if first_above.is_none() && p > REFERENCE_P_T {
                first_above = Some(n);
            }
            rows.push(PtRow {
                n,
                eta,
                p_t_full: p,
            });
        }
        curves.push(PtCurve {
            eta,
            max_p_t: best.0,
            n_at_max: best.1,
            first_n_above_reference: first_above,
        });
    }
    Ok(PtSweep {
        reference_line: REFERENCE_P_T,
        p_one,
        p_spg,
        rows,
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_grid() {
        let r: SweepRange = "1, 100, 3".parse().unwrap();
        let r = r.with_scale(Scale::Log).unwrap();
        let p = r.points();
        assert_eq!(p[0], 1.0);
        assert!((p[1] - 10.0).abs() < 1e-12);
        assert_eq!(p[2], 100.0);
        assert!("1,2".parse::<SweepRange>().is_err());
        assert!(SweepRange::new(2.0, 1.0, 5, Scale::Linear).is_err());
        assert!(SweepRange::new(0.0, 1.0, 1, Scale::Linear).is_err());
        assert!(SweepRange::new(0.0, 1.0, 5, Scale::Log).is_err());
    }

    #[test]
    fn integer_grid_dedups() {
        let r = SweepRange::new(1.0, 10.0, 30, Scale::Log).unwrap();
        let ns = r.integer_points();
        assert_eq!(ns.first(), Some(&1));
        assert_eq!(ns.last(), Some(&10));
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn crossing_interpolates() {
        let x = 0.4;
        let col: Vec<RRow> = [0.7, 0.8]
            .iter()
            .map(|&p| RRow {
                x,
                p_t: p,
                r: r(x, p).unwrap(),
            })
            .collect();
        // r = f(x) - ln(p)/(2x) = 1  ⇔  p = exp(2x(f(x) - 1))
        let exact = (2.0 * x * (crate::analytics::f(x).unwrap() - 1.0)).exp();
        assert!((unit_crossing(&col).unwrap() - exact).abs() < 1e-14);
    }
}
