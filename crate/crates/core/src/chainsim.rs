//! Monte Carlo over serial transponder chains and the fiber-loop memory.
//!
//! Trial `k` draws from its own ChaCha stream seeded with `seed + k`, and
//! per-batch partial sums are reduced in trial order, so results are
//! bit-identical for a given seed regardless of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{self, p_f, p_t_full, survival_prob, TransponderParams};
use crate::channel::{stage, GateFailureModel, SegmentModel, StageStatus};
use crate::error::{Error, Result};
use crate::losscode::{decode, encode};
use crate::simcore::PureState;

/// Environment variable capping the worker threads used for trials.
pub const THREADS_ENV: &str = "LOSSGUARD_THREADS";
/// Default ceiling on `trials × num_stages`.
pub const DEFAULT_WORK_CAP: u64 = 2_000_000_000;
/// Default censoring cap for loop trials.
pub const DEFAULT_MAX_CYCLES: u64 = 1_000_000;

const BATCH: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    AggregatePt,
    PerGate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub params: TransponderParams<f64>,
    pub num_stages: u32,
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
    /// Replaces `p_t_full(params)` for the aggregate coin when set.
    pub p_t: Option<f64>,
    /// Logical input; a seeded Haar-random state when `None`.
    pub logical: Option<PureState<f64>>,
    pub max_cycles: u64,
    pub work_cap: u64,
}

impl ChainConfig {
    pub fn new(params: TransponderParams<f64>, num_stages: u32, trials: u64, seed: u64) -> Self {
        Self {
            params,
            num_stages,
            trials,
            seed,
            mode: SimMode::AggregatePt,
            p_t: None,
            logical: None,
            max_cycles: DEFAULT_MAX_CYCLES,
            work_cap: DEFAULT_WORK_CAP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.num_stages == 0 || self.trials == 0 || self.max_cycles == 0 {
            return Err(Error::Config(
                "num_stages, trials and max_cycles must be at least 1".into(),
            ));
        }
        let work = self.trials.saturating_mul(u64::from(self.num_stages));
        if work > self.work_cap {
            return Err(Error::Config(format!(
                "trials × num_stages = {work} exceeds the cap {}",
                self.work_cap
            )));
        }
        if let Some(p) = self.p_t {
            GateFailureModel::fixed(p)?;
        }
        if let Some(s) = &self.logical {
            if s.num_qubits() != 2 {
                return Err(Error::Config(
                    "logical input must be a 2-qubit state".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn gate_model(&self) -> Result<GateFailureModel<f64>> {
        match (self.mode, self.p_t) {
            (SimMode::AggregatePt, Some(p)) => GateFailureModel::fixed(p),
            (SimMode::AggregatePt, None) => GateFailureModel::aggregate(&self.params),
            (SimMode::PerGate, _) => GateFailureModel::per_gate(&self.params),
        }
    }

    pub fn logical_state(&self) -> Result<PureState<f64>> {
        match &self.logical {
            Some(s) => Ok(s.clone()),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(1);
                PureState::random(2, &mut rng)
            }
        }
    }

    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(trial))
    }
}

/// Binomial-proportion estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn proportion(successes: u64, samples: u64) -> Self {
        let value = if samples == 0 {
            0.0
        } else {
            successes as f64 / samples as f64
        };
        let std_err = if samples == 0 {
            0.0
        } else {
            (value * (1.0 - value) / samples as f64).sqrt()
        };
        Self {
            value,
            std_err,
            samples,
        }
    }

    /// `(value - expected) / std_err`, with a floor on the error so that
    /// degenerate (all-or-nothing) samples compare exactly.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = self.value - expected;
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_err.max(1e-300)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub intact: u64,
    pub corrected: u64,
    pub failed_multi_loss: u64,
    pub failed_gates: u64,
}

impl StatusCounts {
    fn record(&mut self, status: StageStatus) {
        match status {
            StageStatus::Intact => self.intact += 1,
            StageStatus::Corrected => self.corrected += 1,
            StageStatus::FailedMultiLoss => self.failed_multi_loss += 1,
            StageStatus::FailedGates => self.failed_gates += 1,
        }
    }

    fn merge(&mut self, other: &Self) {
        self.intact += other.intact;
        self.corrected += other.corrected;
        self.failed_multi_loss += other.failed_multi_loss;
        self.failed_gates += other.failed_gates;
    }

    pub fn attempts(&self) -> u64 {
        self.intact + self.corrected + self.failed_multi_loss + self.failed_gates
    }

    pub fn successes(&self) -> u64 {
        self.intact + self.corrected
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStats {
    pub mode: SimMode,
    pub trials: u64,
    pub num_stages: u32,
    /// Over every stage attempted (a trial stops at its first failure).
    pub per_stage_success_rate: Estimate,
    pub end_to_end_success: Estimate,
    pub mean_fidelity_given_success: Option<f64>,
    pub min_fidelity_given_success: Option<f64>,
    /// `-ln(end_to_end_success)/(num_stages·d)`; `None` when undefined.
    pub empirical_alpha_prime: Option<f64>,
    /// Set when no trial survived, i.e. the estimate is +∞.
    pub alpha_prime_unbounded: bool,
    pub status_counts: StatusCounts,
}

#[derive(Debug, Clone, Default)]
struct ChainTally {
    counts: StatusCounts,
    survivors: u64,
    fidelity_sum: f64,
    fidelity_min: f64,
}

impl ChainTally {
    fn merge(mut self, other: &Self) -> Self {
        self.counts.merge(&other.counts);
        if other.survivors > 0 {
            self.fidelity_min = if self.survivors == 0 {
                other.fidelity_min
            } else {
                self.fidelity_min.min(other.fidelity_min)
            };
        }
        self.survivors += other.survivors;
        self.fidelity_sum += other.fidelity_sum;
        self
    }
}

/// Runs `f` on a pool limited by `LOSSGUARD_THREADS` when that is set.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

fn batched<T, F>(trials: u64, per_batch: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> Result<T> + Sync + Send,
{
    let batches = trials.div_ceil(BATCH);
    with_thread_cap(|| {
        (0..batches)
            .into_par_iter()
            .map(|b| per_batch(b * BATCH..((b + 1) * BATCH).min(trials)))
            .collect()
    })
}

/// Sends one encoded input through `num_stages` fiber segments and
/// transponders per trial and decodes the survivors.
pub fn run_chain(config: &ChainConfig) -> Result<ChainStats> {
    config.validate()?;
    let logical = config.logical_state()?;
    let encoded = encode(&logical)?;
    let segment = SegmentModel::from_params(&config.params)?;
    let gates = config.gate_model()?;

    let tallies = batched(config.trials, |range| {
        let mut tally = ChainTally::default();
        for trial in range {
            let mut rng = config.trial_rng(trial);
            let mut state = encoded.clone();
            let mut survived = true;
            for _ in 0..config.num_stages {
                let res = stage(&state, &segment, &gates, &mut rng)?;
                tally.counts.record(res.status);
                match res.state {
                    Some(s) => state = s,
                    None => {
                        survived = false;
                        break;
                    }
                }
            }
            if survived {
                let fidelity = decode(&state)?.fidelity(&logical)?;
                tally.fidelity_min = if tally.survivors == 0 {
                    fidelity
                } else {
                    tally.fidelity_min.min(fidelity)
                };
                tally.survivors += 1;
                tally.fidelity_sum += fidelity;
            }
        }
        Ok(tally)
    })?;
    let total = tallies
        .iter()
        .fold(ChainTally::default(), |acc, t| acc.merge(t));

    let end_to_end = Estimate::proportion(total.survivors, config.trials);
    let length = f64::from(config.num_stages) * config.params.d;
    let (empirical_alpha_prime, unbounded) = if total.survivors == 0 {
        (None, true)
    } else if length > 0.0 {
        (Some(-end_to_end.value.ln() / length), false)
    } else {
        (None, false)
    };
    let fidelity = |v: f64| (total.survivors > 0).then_some(v);
    Ok(ChainStats {
        mode: config.mode,
        trials: config.trials,
        num_stages: config.num_stages,
        per_stage_success_rate: Estimate::proportion(
            total.counts.successes(),
            total.counts.attempts(),
        ),
        end_to_end_success: end_to_end,
        mean_fidelity_given_success: fidelity(total.fidelity_sum / total.survivors.max(1) as f64),
        min_fidelity_given_success: fidelity(total.fidelity_min),
        empirical_alpha_prime,
        alpha_prime_unbounded: unbounded,
        status_counts: total.counts,
    })
}

/// Closed-form counterparts of [`ChainStats`] for the same configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainPrediction {
    pub survival_probability: f64,
    pub p_f: f64,
    pub p_t: f64,
    pub per_stage_success: f64,
    pub end_to_end_success: f64,
    /// `α'(α, d) − ln(p_t)/d`; `None` for `d = 0`.
    pub alpha_prime_with_gates: Option<f64>,
}

pub fn predict(config: &ChainConfig) -> Result<ChainPrediction> {
    let p = survival_prob(config.params.alpha, config.params.d)?;
    let pf = p_f(p)?;
    let pt = config.gate_model()?.success_probability()?;
    let q = pf * pt;
    let alpha_prime_with_gates = if config.params.d > 0.0 {
        Some(
            analytics::alpha_prime(config.params.alpha, config.params.d)?
                - pt.ln() / config.params.d,
        )
    } else {
        None
    };
    Ok(ChainPrediction {
        survival_probability: p,
        p_f: pf,
        p_t: pt,
        per_stage_success: q,
        end_to_end_success: q.powi(config.num_stages as i32),
        alpha_prime_with_gates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopStats {
    pub trials: u64,
    /// Transponder passes completed before the first failure.
    pub mean_cycles: f64,
    pub mean_cycles_std_err: f64,
    /// Fraction of trials that hit `max_cycles` without failing.
    pub censored_fraction: f64,
    pub max_cycles: u64,
    /// Analytic per-pass success `p_f·p_t`.
    pub stage_success: f64,
    /// Geometric expectation `q/(1−q)` of completed passes.
    pub expected_cycles: Option<f64>,
    /// `mean_cycles · d / ν`, seconds.
    pub implied_storage_time: f64,
    /// Bare two-photon loop storage time `1/(2αν)`; `None` for α = 0.
    pub bare_storage_time: Option<f64>,
    /// `T_f / r` with `r = −ln(p_f·p_t)/(2x)`; `None` when undefined.
    pub analytic_storage_time: Option<f64>,
    /// Fiber signal speed used, km/s (not fixed by the physics; an input).
    pub nu_assumed: f64,
}

/// Circulates one encoded state around a fiber loop of circumference `d`
/// with an in-loop transponder until the first failure.
pub fn run_loop(config: &ChainConfig) -> Result<LoopStats> {
    config.validate()?;
    let logical = config.logical_state()?;
    let encoded = encode(&logical)?;
    let segment = SegmentModel::from_params(&config.params)?;
    let gates = config.gate_model()?;

    let sums = batched(config.trials, |range| {
        let (mut sum, mut sum_sq, mut censored) = (0.0f64, 0.0f64, 0u64);
        for trial in range {
            let mut rng = config.trial_rng(trial);
            let mut state = encoded.clone();
            let mut cycles = 0u64;
            loop {
                if cycles == config.max_cycles {
                    censored += 1;
                    break;
                }
                match stage(&state, &segment, &gates, &mut rng)?.state {
                    Some(s) => {
                        state = s;
                        cycles += 1;
                    }
                    None => break,
                }
            }
            let c = cycles as f64;
            sum += c;
            sum_sq += c * c;
        }
        Ok((sum, sum_sq, censored))
    })?;
    let (sum, sum_sq, censored) = sums
        .iter()
        .fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    let trials = config.trials as f64;
    let mean = sum / trials;
    let var = (sum_sq / trials - mean * mean).max(0.0);
    let pred = predict(config)?;
    let q = pred.per_stage_success;
    let (alpha, d, nu) = (config.params.alpha, config.params.d, config.params.nu);
    let bare = (alpha > 0.0)
        .then(|| analytics::storage_time(alpha, nu))
        .transpose()?;
    let analytic = if alpha > 0.0 && d > 0.0 && q > 0.0 && q < 1.0 {
        let r = -q.ln() / (2.0 * alpha * d);
        Some(analytics::improved_storage_time(alpha, nu, r)?)
    } else {
        None
    };
    Ok(LoopStats {
        trials: config.trials,
        mean_cycles: mean,
        mean_cycles_std_err: (var / trials).sqrt(),
        censored_fraction: censored as f64 / trials,
        max_cycles: config.max_cycles,
        stage_success: q,
        expected_cycles: (q < 1.0).then(|| q / (1.0 - q)),
        implied_storage_time: mean * d / nu,
        bare_storage_time: bare,
        analytic_storage_time: analytic,
        nu_assumed: nu,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeComparison {
    pub aggregate: ChainStats,
    pub per_gate: ChainStats,
    pub analytic_p_t: f64,
    pub difference: f64,
    pub combined_std_err: f64,
    pub z_score: f64,
    /// `|z| ≤ 4`; a disagreement points at inconsistent exponent bookkeeping.
    pub agree: bool,
}

pub const MODE_AGREEMENT_SIGMAS: f64 = 4.0;

/// Runs the aggregate coin at `p_t_full` and the per-component coins with
/// the same seed and compares per-stage success rates.
pub fn compare_modes(config: &ChainConfig) -> Result<ModeComparison> {
    let mut agg_cfg = config.clone();
    agg_cfg.mode = SimMode::AggregatePt;
    agg_cfg.p_t = None;
    let mut gate_cfg = agg_cfg.clone();
    gate_cfg.mode = SimMode::PerGate;
    let aggregate = run_chain(&agg_cfg)?;
    let per_gate = run_chain(&gate_cfg)?;
    let a = aggregate.per_stage_success_rate;
    let b = per_gate.per_stage_success_rate;
    let difference = b.value - a.value;
    let combined_std_err = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
    let z_score = if difference == 0.0 {
        0.0
    } else {
        difference / combined_std_err.max(1e-300)
    };
    Ok(ModeComparison {
        analytic_p_t: p_t_full(&config.params)?,
        aggregate,
        per_gate,
        difference,
        combined_std_err,
        z_score,
        agree: z_score.abs() <= MODE_AGREEMENT_SIGMAS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lossless() -> TransponderParams<f64> {
        TransponderParams {
            alpha: 0.0,
            ..TransponderParams::default()
        }
    }

    #[test]
    fn config_validation() {
        let mut c = ChainConfig::new(lossless(), 1, 10, 0);
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = ChainConfig::new(lossless(), 1000, 10_000, 0);
        c.work_cap = 1_000_000;
        assert!(c.validate().is_err());
        let mut c = ChainConfig::new(lossless(), 1, 10, 0);
        c.p_t = Some(1.5);
        assert!(c.validate().is_err());
    }

    #[test]
    fn estimate_standard_error() {
        let e = Estimate::proportion(25, 100);
        assert_eq!(e.value, 0.25);
        assert!((e.std_err - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert_eq!(Estimate::proportion(10, 10).z_score(1.0), 0.0);
    }

    #[test]
    fn zero_successes_flag_unbounded_alpha_prime() {
        let mut c = ChainConfig::new(TransponderParams::default(), 2, 50, 1);
        c.p_t = Some(0.0);
        let s = run_chain(&c).unwrap();
        assert_eq!(s.end_to_end_success.value, 0.0);
        assert!(s.alpha_prime_unbounded);
        assert!(s.empirical_alpha_prime.is_none());
        assert!(s.mean_fidelity_given_success.is_none());
    }

    #[test]
    fn default_logical_state_is_seeded() {
        let a = ChainConfig::new(lossless(), 1, 1, 5)
            .logical_state()
            .unwrap();
        let b = ChainConfig::new(lossless(), 1, 1, 5)
            .logical_state()
            .unwrap();
        let c = ChainConfig::new(lossless(), 1, 1, 6)
            .logical_state()
            .unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
