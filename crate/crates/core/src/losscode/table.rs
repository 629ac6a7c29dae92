use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::recovery::{project_syndrome, PauliWord};
use super::{encode, DATA_QUBITS};
use crate::error::{domain, Error, Result};
use crate::simcore::{bits_to_index, index_to_bits, MeasurementRecord, PureState};

/// Ancilla outcome → Pauli correction, for one loss position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrectionTable {
    pub loss_position: usize,
    /// Indexed by the outcome `(x_ancilla, z_ancilla)` read as a 2-bit integer.
    pub entries: [PauliWord; 4],
}

/// One row of the JSON export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    pub loss_position: usize,
    pub outcome_bits: String,
    pub pauli_word: PauliWord,
}

impl CorrectionTable {
    pub fn correction(&self, outcome: &[bool]) -> PauliWord {
        self.entries[bits_to_index(outcome) & 3]
    }

    pub fn records(&self) -> Vec<CorrectionRecord> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, w)| CorrectionRecord {
                loss_position: self.loss_position,
                outcome_bits: MeasurementRecord::<f64>::bit_string(&index_to_bits(k, 2)),
                pauli_word: *w,
            })
            .collect()
    }
}

/// Logical inputs the correction must fix simultaneously: the four basis
/// states pin each codeword up to its own phase, and the uniform
/// superposition forces those phases to agree.
fn probe_states() -> Vec<PureState<f64>> {
    let mut probes: Vec<PureState<f64>> = (0..4)
        .map(|k| PureState::basis(2, k).expect("basis"))
        .collect();
    probes.push(PureState::from_real(&[1.0, 1.0, 1.0, 1.0]).expect("uniform"));
    probes
}

/// Brute-force search, per ancilla outcome, for the unique Pauli word on
/// the substituted photon that restores every probe state.
pub fn derive_correction_table(loss_position: usize) -> Result<CorrectionTable> {
    if loss_position >= DATA_QUBITS {
        return domain(format!(
            "loss position {loss_position} outside 0..{DATA_QUBITS}"
        ));
    }
    let tol = 1e-10;
    let cases: Vec<(PureState<f64>, _)> = probe_states()
        .iter()
        .map(|logical| {
            let encoded = encode(logical)?;
            let damaged = encoded.to_density().partial_trace(loss_position)?;
            Ok((encoded, damaged))
        })
        .collect::<Result<_>>()?;

    let mut entries = [PauliWord::I; 4];
    for (k, entry) in entries.iter_mut().enumerate() {
        let bits = index_to_bits(k, 2);
        let outcome = [bits[0], bits[1]];
        let mut projected = Vec::with_capacity(cases.len());
        for (encoded, damaged) in &cases {
            let (_, state) = project_syndrome(damaged, loss_position, outcome)?;
            projected.push((encoded, state));
        }
        let winners: Vec<PauliWord> = PauliWord::ALL
            .into_iter()
            .filter(|word| {
                projected.iter().all(|(encoded, state)| {
                    word.apply(state, loss_position)
                        .and_then(|fixed| fixed.fidelity(encoded))
                        .is_ok_and(|f| 1.0 - f <= tol)
                })
            })
            .collect();
        match winners.as_slice() {
            [word] => *entry = *word,
            _ => {
                return Err(Error::DerivationFailure {
                    loss_position,
                    outcome: MeasurementRecord::<f64>::bit_string(&bits),
                    candidates: winners.len(),
                })
            }
        }
    }
    Ok(CorrectionTable {
        loss_position,
        entries,
    })
}

/// Tables for all four loss positions, derived once per process.
pub fn correction_tables() -> Result<&'static [CorrectionTable; 4]> {
    static TABLES: OnceLock<Result<[CorrectionTable; 4]>> = OnceLock::new();
    TABLES
        .get_or_init(|| {
            Ok([
                derive_correction_table(0)?,
                derive_correction_table(1)?,
                derive_correction_table(2)?,
                derive_correction_table(3)?,
            ])
        })
        .as_ref()
        .map_err(Clone::clone)
}
