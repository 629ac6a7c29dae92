//! Photon-loss channel between transponders and the bookkeeping of one
//! transponder stage.
//!
//! Loss is heralded: the QND stage reveals which rail lost its photon but
//! nothing about the qubit value, which is exactly a partial trace at a known
//! position followed by a fresh `|0>` from the photon gun.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::analytics::{gate_success, p_t_full, survival_prob, TransponderParams};
use crate::error::{domain, Result};
use crate::losscode::{in_code_space, recover_ensemble, PauliWord, DATA_QUBITS};
use crate::scalar::Real;
use crate::simcore::PureState;

/// One fiber segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentModel<T> {
    pub alpha: T,
    pub d: T,
}

impl<T: Real> SegmentModel<T> {
    pub fn new(alpha: T, d: T) -> Result<Self> {
        survival_prob(alpha, d)?;
        Ok(Self { alpha, d })
    }

    pub fn from_params(params: &TransponderParams<T>) -> Result<Self> {
        Self::new(params.alpha, params.d)
    }

    pub fn survival_probability(&self) -> T {
        (-self.alpha * self.d).exp()
    }
}

/// Which of the four rails still carry their photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LossEvent {
    pub survival_mask: [bool; DATA_QUBITS],
    pub num_lost: usize,
}

impl LossEvent {
    pub fn from_mask(survival_mask: [bool; DATA_QUBITS]) -> Self {
        Self {
            survival_mask,
            num_lost: survival_mask.iter().filter(|s| !**s).count(),
        }
    }

    pub fn none_lost() -> Self {
        Self::from_mask([true; DATA_QUBITS])
    }

    /// Single loss at `position`.
    pub fn single(position: usize) -> Result<Self> {
        if position >= DATA_QUBITS {
            return domain(format!("loss position {position} outside 0..{DATA_QUBITS}"));
        }
        let mut mask = [true; DATA_QUBITS];
        mask[position] = false;
        Ok(Self::from_mask(mask))
    }

    pub fn lost_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.survival_mask
            .iter()
            .enumerate()
            .filter(|(_, s)| !**s)
            .map(|(k, _)| k)
    }
}

/// Each rail survives independently with probability `exp(-alpha·d)`.
pub fn transmit_segment<T: Real, R: Rng + ?Sized>(
    model: &SegmentModel<T>,
    rng: &mut R,
) -> LossEvent {
    let p = model.survival_probability().as_f64();
    let mut mask = [true; DATA_QUBITS];
    for rail in &mut mask {
        *rail = rng.random::<f64>() < p;
    }
    LossEvent::from_mask(mask)
}

/// How gate failures inside a transponder are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GateFailureModel<T> {
    /// One coin per stage with the whole-transponder success probability.
    Aggregate { p_t: T },
    /// Separate coins for every component: 38 one-qubit gates, 16 CZs at
    /// `(n/(n+1))²`, `10+32n` photon guns and `10+32n` detector clicks.
    PerGate { params: TransponderParams<T> },
}

impl<T: Real> GateFailureModel<T> {
    pub fn fixed(p_t: T) -> Result<Self> {
        if !(p_t >= T::zero() && p_t <= T::one()) {
            return domain(format!("p_t = {p_t} outside [0, 1]"));
        }
        Ok(Self::Aggregate { p_t })
    }

    /// Aggregate coin at `p_t_full(params)`.
    pub fn aggregate(params: &TransponderParams<T>) -> Result<Self> {
        Self::fixed(p_t_full(params)?)
    }

    pub fn per_gate(params: &TransponderParams<T>) -> Result<Self> {
        params.validate()?;
        Ok(Self::PerGate { params: *params })
    }

    pub fn success_probability(&self) -> Result<T> {
        match self {
            Self::Aggregate { p_t } => Ok(*p_t),
            Self::PerGate { params } => p_t_full(params),
        }
    }

    /// Draws whether every gate of one transponder pass succeeds.
    pub fn sample_success<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<bool> {
        match self {
            Self::Aggregate { p_t } => Ok(rng.random::<f64>() < p_t.as_f64()),
            Self::PerGate { params } => {
                let p_two = gate_success::<T>(params.n)?.as_f64();
                let clicks = 10 + 32 * u64::from(params.n);
                let mut ok = true;
                ok &= coins(rng, 38, params.p_one.as_f64());
                ok &= coins(rng, 16, p_two);
                ok &= no_failures(rng, clicks, params.p_spg.as_f64())?;
                ok &= no_failures(rng, clicks, params.eta.as_f64())?;
                Ok(ok)
            }
        }
    }
}

/// Draws `count` individual coins; true when all succeed.
fn coins<R: Rng + ?Sized>(rng: &mut R, count: usize, p: f64) -> bool {
    if p >= 1.0 {
        return true;
    }
    (0..count).fold(true, |ok, _| rng.random::<f64>() < p && ok)
}

/// True when none of `count` independent trials with success `p` fails;
/// the failure count is drawn from Binomial(count, 1 - p).
fn no_failures<R: Rng + ?Sized>(rng: &mut R, count: u64, p: f64) -> Result<bool> {
    if p >= 1.0 {
        return Ok(true);
    }
    let failures = Binomial::new(count, 1.0 - p)
        .map_err(|e| crate::Error::Domain(format!("binomial({count}, {}): {e}", 1.0 - p)))?;
    Ok(failures.sample(rng) == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Intact,
    Corrected,
    FailedMultiLoss,
    FailedGates,
}

impl StageStatus {
    pub fn is_success(self) -> bool {
        matches!(self, StageStatus::Intact | StageStatus::Corrected)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageResult<T> {
    pub status: StageStatus,
    pub loss: LossEvent,
    /// Present exactly when the stage succeeded.
    pub state: Option<PureState<T>>,
    pub correction: Option<PauliWord>,
}

/// One fiber segment followed by one transponder pass.
pub fn stage<T: Real, R: Rng + ?Sized>(
    encoded: &PureState<T>,
    segment: &SegmentModel<T>,
    gates: &GateFailureModel<T>,
    rng: &mut R,
) -> Result<StageResult<T>> {
    check_encoded(encoded)?;
    let loss = transmit_segment(segment, rng);
    run_stage(encoded, loss, gates, rng)
}

/// [`stage`] with the loss pattern supplied instead of sampled.
pub fn stage_with_event<T: Real, R: Rng + ?Sized>(
    encoded: &PureState<T>,
    loss: LossEvent,
    gates: &GateFailureModel<T>,
    rng: &mut R,
) -> Result<StageResult<T>> {
    check_encoded(encoded)?;
    run_stage(encoded, loss, gates, rng)
}

fn check_encoded<T: Real>(encoded: &PureState<T>) -> Result<()> {
    if encoded.num_qubits() != DATA_QUBITS || !in_code_space(encoded) {
        return domain("stage input is not a code-space state");
    }
    Ok(())
}

fn run_stage<T: Real, R: Rng + ?Sized>(
    encoded: &PureState<T>,
    loss: LossEvent,
    gates: &GateFailureModel<T>,
    rng: &mut R,
) -> Result<StageResult<T>> {
    let failed = |status| StageResult {
        status,
        loss,
        state: None,
        correction: None,
    };
    if loss.num_lost >= 2 {
        return Ok(failed(StageStatus::FailedMultiLoss));
    }
    let (status, state, correction) = match loss.lost_positions().next() {
        None => (StageStatus::Intact, encoded.clone(), None),
        Some(position) => {
            let outcome = recover_ensemble(encoded, position, rng)?;
            (
                StageStatus::Corrected,
                outcome.corrected_state,
                Some(outcome.applied_correction),
            )
        }
    };
    if !gates.sample_success(rng)? {
        return Ok(failed(StageStatus::FailedGates));
    }
    Ok(StageResult {
        status,
        loss,
        state: Some(state),
        correction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn loss_event_counts() {
        let e = LossEvent::from_mask([true, false, true, false]);
        assert_eq!(e.num_lost, 2);
        assert_eq!(e.lost_positions().collect::<Vec<_>>(), vec![1, 3]);
        assert!(LossEvent::single(4).is_err());
    }

    #[test]
    fn lossless_segments_never_drop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in [
            SegmentModel::new(0.0, 50.0).unwrap(),
            SegmentModel::new(0.2, 0.0).unwrap(),
        ] {
            for _ in 0..1000 {
                assert_eq!(transmit_segment(&model, &mut rng).num_lost, 0);
            }
        }
        assert!(SegmentModel::new(-0.1, 1.0).is_err());
    }

    #[test]
    fn gate_model_rejects_bad_probability() {
        assert!(GateFailureModel::fixed(1.5).is_err());
        assert!(GateFailureModel::fixed(-0.1).is_err());
    }

    #[test]
    fn multi_loss_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let enc = crate::losscode::encode(&PureState::<f64>::from_bits("10").unwrap()).unwrap();
        let r = stage_with_event(
            &enc,
            LossEvent::from_mask([false, true, false, true]),
            &GateFailureModel::fixed(1.0).unwrap(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(r.status, StageStatus::FailedMultiLoss);
        assert!(r.state.is_none());
    }

    #[test]
    fn rejects_non_code_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let bad = PureState::<f64>::from_bits("0001").unwrap();
        let seg = SegmentModel::new(0.0, 1.0).unwrap();
        assert!(stage(&bad, &seg, &GateFailureModel::fixed(1.0).unwrap(), &mut rng).is_err());
    }
}
