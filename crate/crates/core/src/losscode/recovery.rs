use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{correction_tables, in_code_space, DATA_QUBITS, X_ANCILLA, Z_ANCILLA};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::simcore::measure::sample_outcome;
use crate::simcore::{
    bits_to_index, index_to_bits, DensityMatrix, Gate, MeasurementRecord, PureState,
};

/// Pauli correction applied to the replacement photon. `XZ` is the
/// operator product σx·σz, i.e. `Z` acts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliWord {
    I,
    X,
    Z,
    XZ,
}

impl PauliWord {
    pub const ALL: [PauliWord; 4] = [PauliWord::I, PauliWord::X, PauliWord::Z, PauliWord::XZ];

    /// Gates realizing the word on `qubit`, in application order.
    pub fn gates(self, qubit: usize) -> Vec<Gate> {
        match self {
            PauliWord::I => vec![],
            PauliWord::X => vec![Gate::x(qubit)],
            PauliWord::Z => vec![Gate::z(qubit)],
            PauliWord::XZ => vec![Gate::z(qubit), Gate::x(qubit)],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PauliWord::I => "I",
            PauliWord::X => "X",
            PauliWord::Z => "Z",
            PauliWord::XZ => "XZ",
        }
    }

    pub fn apply<T: Real>(self, state: &PureState<T>, qubit: usize) -> Result<PureState<T>> {
        state.apply_all(&self.gates(qubit))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(PauliWord::I),
            "X" => Ok(PauliWord::X),
            "Z" => Ok(PauliWord::Z),
            "XZ" => Ok(PauliWord::XZ),
            other => domain(format!("unknown Pauli word {other:?}")),
        }
    }
}

/// Parity readout on data qubits 0..4 with ancillae 4 (`XXXX`) and 5 (`ZZZZ`).
pub fn syndrome_circuit() -> Vec<Gate> {
    let mut gates = vec![Gate::h(X_ANCILLA), Gate::h(Z_ANCILLA)];
    gates.extend((0..DATA_QUBITS).map(|q| Gate::cnot(X_ANCILLA, q)));
    gates.extend((0..DATA_QUBITS).map(|q| Gate::cz(Z_ANCILLA, q)));
    gates.extend([Gate::h(X_ANCILLA), Gate::h(Z_ANCILLA)]);
    gates
}

/// Intermediate mixed states of one recovery, before the ancillae are read.
#[derive(Debug, Clone)]
pub struct RecoveryTrace<T> {
    /// Three surviving photons.
    pub damaged: DensityMatrix<T>,
    /// Fresh `|0>` inserted at the loss position.
    pub substituted: DensityMatrix<T>,
    /// Ancillae `|00>` appended.
    pub with_ancillae: DensityMatrix<T>,
    /// After the first Hadamard layer.
    pub after_hadamard: DensityMatrix<T>,
    /// After the couplings and the closing Hadamards.
    pub before_measurement: DensityMatrix<T>,
}

pub fn recovery_trace<T: Real>(
    damaged: &DensityMatrix<T>,
    loss_position: usize,
) -> Result<RecoveryTrace<T>> {
    check_damaged(damaged, loss_position)?;
    let zero = PureState::basis(1, 0)?;
    let substituted = damaged.embed(&zero, loss_position)?;
    let with_ancillae = substituted.tensor(&PureState::basis(2, 0)?.to_density())?;
    let circuit = syndrome_circuit();
    let after_hadamard = with_ancillae.apply_all(&circuit[..2])?;
    let before_measurement = after_hadamard.apply_all(&circuit[2..])?;
    Ok(RecoveryTrace {
        damaged: damaged.clone(),
        substituted,
        with_ancillae,
        after_hadamard,
        before_measurement,
    })
}

fn check_damaged<T: Real>(damaged: &DensityMatrix<T>, loss_position: usize) -> Result<()> {
    if damaged.num_qubits() != DATA_QUBITS - 1 {
        return domain(format!(
            "damaged state must hold {} qubits, got {}",
            DATA_QUBITS - 1,
            damaged.num_qubits()
        ));
    }
    if loss_position >= DATA_QUBITS {
        return domain(format!(
            "loss position {loss_position} outside 0..{DATA_QUBITS}"
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryOutcome<T> {
    pub loss_position: usize,
    pub measurement: MeasurementRecord<T>,
    /// Four-photon state right after the ancilla readout.
    pub projected_state: PureState<T>,
    pub applied_correction: PauliWord,
    pub corrected_state: PureState<T>,
}

const ANCILLAE: [usize; 2] = [X_ANCILLA, Z_ANCILLA];

/// Projected four-photon state for a forced ancilla outcome, before any
/// correction. Fails if the branch is impossible or the result is mixed.
pub(crate) fn project_syndrome<T: Real>(
    damaged: &DensityMatrix<T>,
    loss_position: usize,
    outcome: [bool; 2],
) -> Result<(MeasurementRecord<T>, PureState<T>)> {
    let trace = recovery_trace(damaged, loss_position)?;
    let (record, post) = trace.before_measurement.project(&ANCILLAE, &outcome)?;
    Ok((record, data_part(&post, loss_position)?))
}

fn data_part<T: Real>(post: &DensityMatrix<T>, loss_position: usize) -> Result<PureState<T>> {
    let data = post.partial_trace(Z_ANCILLA)?.partial_trace(X_ANCILLA)?;
    data.to_pure().ok_or(Error::RecoveryFailure {
        loss_position,
        fidelity: data.purity().as_f64(),
    })
}

fn finish<T: Real>(
    record: MeasurementRecord<T>,
    projected_state: PureState<T>,
    loss_position: usize,
) -> Result<RecoveryOutcome<T>> {
    let tables = correction_tables()?;
    let word = tables[loss_position].correction(&record.outcome_bits);
    let corrected_state = word.apply(&projected_state, loss_position)?;
    if !in_code_space(&corrected_state) {
        return Err(Error::RecoveryFailure {
            loss_position,
            fidelity: super::code_space_weight(&corrected_state)?.as_f64(),
        });
    }
    Ok(RecoveryOutcome {
        loss_position,
        measurement: record,
        projected_state,
        applied_correction: word,
        corrected_state,
    })
}

/// Full density-matrix recovery of a heralded single loss: photon gun,
/// parity readout sampled from `rng`, Pauli correction.
pub fn recover<T: Real, R: Rng + ?Sized>(
    damaged: &DensityMatrix<T>,
    loss_position: usize,
    rng: &mut R,
) -> Result<RecoveryOutcome<T>> {
    let trace = recovery_trace(damaged, loss_position)?;
    let (record, post) = trace.before_measurement.measure(&ANCILLAE, rng)?;
    let projected = data_part(&post, loss_position)?;
    finish(record, projected, loss_position)
}

/// As [`recover`], with the ancilla outcome forced instead of sampled.
pub fn recover_forced<T: Real>(
    damaged: &DensityMatrix<T>,
    loss_position: usize,
    outcome: [bool; 2],
) -> Result<RecoveryOutcome<T>> {
    let (record, projected) = project_syndrome(damaged, loss_position, outcome)?;
    finish(record, projected, loss_position)
}

/// [`recover`] followed by a fidelity check against the state that was
/// damaged; anything short of 1 − code tolerance is a recovery failure.
pub fn recover_verified<T: Real, R: Rng + ?Sized>(
    damaged: &DensityMatrix<T>,
    loss_position: usize,
    reference: &PureState<T>,
    rng: &mut R,
) -> Result<RecoveryOutcome<T>> {
    let outcome = recover(damaged, loss_position, rng)?;
    let fidelity = outcome.corrected_state.fidelity(reference)?;
    if T::one() - fidelity > T::code_tol() {
        return Err(Error::RecoveryFailure {
            loss_position,
            fidelity: fidelity.as_f64(),
        });
    }
    Ok(outcome)
}

/// Recovery on an undamaged encoded state, with the loss applied
/// internally. The post-loss mixture is carried as its two pure branches
/// (lost photon was `|0>` or `|1>`) instead of a 64×64 density matrix; the
/// statistics and the corrected state are identical to
/// `recover(encoded ρ traced at loss_position)`, at a fraction of the cost.
pub fn recover_ensemble<T: Real, R: Rng + ?Sized>(
    encoded: &PureState<T>,
    loss_position: usize,
    rng: &mut R,
) -> Result<RecoveryOutcome<T>> {
    if encoded.num_qubits() != DATA_QUBITS {
        return domain(format!("encoded state must hold {DATA_QUBITS} qubits"));
    }
    if loss_position >= DATA_QUBITS {
        return domain(format!(
            "loss position {loss_position} outside 0..{DATA_QUBITS}"
        ));
    }
    let ancillae = PureState::basis(2, 0)?;
    let circuit = syndrome_circuit();
    let mut branches = Vec::with_capacity(2);
    for lost in [false, true] {
        let weight = encoded.outcome_probability(&[loss_position], &[lost])?;
        if weight <= T::exact_tol() {
            continue;
        }
        let (_, mut survivors) = encoded.project(&[loss_position], &[lost])?;
        if lost {
            // The photon gun always supplies |0>.
            survivors.apply_mut(&Gate::x(loss_position))?;
        }
        branches.push((weight, survivors.tensor(&ancillae)?.apply_all(&circuit)?));
    }

    let mut probs = [T::zero(); 4];
    for (k, p) in probs.iter_mut().enumerate() {
        let bits = index_to_bits(k, 2);
        for (w, state) in &branches {
            *p = *p + *w * state.outcome_probability(&ANCILLAE, &bits)?;
        }
    }
    let bits = sample_outcome(&probs, 2, rng);
    let probability = probs[bits_to_index(&bits)];

    let mut parts = Vec::with_capacity(2);
    for (w, state) in &branches {
        let p = state.outcome_probability(&ANCILLAE, &bits)?;
        if *w * p <= T::exact_tol() {
            continue;
        }
        let (_, post) = state.project(&ANCILLAE, &bits)?;
        let data = post
            .discard_collapsed(Z_ANCILLA, bits[1])?
            .discard_collapsed(X_ANCILLA, bits[0])?;
        parts.push((data, *w * p / probability));
    }
    let projected = match parts.len() {
        1 => parts.pop().map(|(s, _)| s).expect("one part"),
        _ => DensityMatrix::from_ensemble(&parts)?
            .to_pure()
            .ok_or(Error::RecoveryFailure {
                loss_position,
                fidelity: f64::NAN,
            })?,
    };
    let record = MeasurementRecord::new(ANCILLAE.to_vec(), bits, probability);
    finish(record, projected, loss_position)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_words_parse_and_print() {
        for w in PauliWord::ALL {
            assert_eq!(w.label().parse::<PauliWord>().unwrap(), w);
        }
        assert!("Y".parse::<PauliWord>().is_err());
    }

    #[test]
    fn xz_acts_z_first() {
        let s = PureState::<f64>::from_kets(&[(1.0, "0"), (1.0, "1")]).unwrap();
        let out = PauliWord::XZ.apply(&s, 0).unwrap();
        let expected = PureState::from_kets(&[(-1.0, "0"), (1.0, "1")]).unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn syndrome_circuit_layout() {
        let c = syndrome_circuit();
        assert_eq!(c.len(), 12);
        assert_eq!(c.iter().filter(|g| g.targets().len() == 2).count(), 8);
    }

    #[test]
    fn trace_rejects_bad_inputs() {
        let rho = PureState::<f64>::from_bits("0000").unwrap().to_density();
        assert!(recovery_trace(&rho, 0).is_err());
        let rho3 = PureState::<f64>::from_bits("000").unwrap().to_density();
        assert!(recovery_trace(&rho3, 4).is_err());
    }
}
