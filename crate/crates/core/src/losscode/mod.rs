//! The two-to-four photon-loss code.
//!
//! Two logical qubits are spread over four photons so that the loss of any
//! single, heralded photon can be undone without discarding the others:
//!
//! ```text
//! |00> -> (|0000> + |1111>)/√2      |01> -> (|0110> + |1001>)/√2
//! |10> -> (|1010> + |0101>)/√2      |11> -> (|1100> + |0011>)/√2
//! ```
//!
//! Recovery measures the two four-body parities `XXXX` and `ZZZZ` through a
//! pair of ancillae and applies a Pauli correction to the replacement photon.

mod recovery;
mod table;

pub use recovery::{
    recover, recover_ensemble, recover_forced, recover_verified, recovery_trace, syndrome_circuit,
    PauliWord, RecoveryOutcome, RecoveryTrace,
};
pub use table::{correction_tables, derive_correction_table, CorrectionRecord, CorrectionTable};

use num_complex::Complex;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::simcore::{Gate, PureState};

pub const LOGICAL_QUBITS: usize = 2;
pub const DATA_QUBITS: usize = 4;
/// Ancilla whose CNOTs couple to every data photon (reads `XXXX`).
pub const X_ANCILLA: usize = 4;
/// Ancilla whose CZs couple to every data photon (reads `ZZZZ`).
pub const Z_ANCILLA: usize = 5;

/// Encoder acting on `|q1 q2 0 0>`, in application order.
pub fn encoder_circuit() -> [Gate; 6] {
    [
        Gate::h(3),
        Gate::cnot(3, 2),
        Gate::cnot(3, 1),
        Gate::cnot(3, 0),
        Gate::cnot(0, 2),
        Gate::cnot(1, 2),
    ]
}

/// The basis codewords as explicit ket pairs, indexed by logical value.
pub const CODEWORD_KETS: [[&str; 2]; 4] = [
    ["0000", "1111"],
    ["0110", "1001"],
    ["1010", "0101"],
    ["1100", "0011"],
];

#[derive(Debug, Clone, PartialEq)]
pub struct Codeword<T> {
    pub logical_bits: [bool; 2],
    pub state: PureState<T>,
}

/// The four basis codewords, built directly from [`CODEWORD_KETS`].
pub fn codewords<T: Real>() -> Vec<Codeword<T>> {
    CODEWORD_KETS
        .iter()
        .enumerate()
        .map(|(k, [a, b])| Codeword {
            logical_bits: [k & 2 != 0, k & 1 != 0],
            state: PureState::from_kets(&[(1.0, a), (1.0, b)]).expect("static kets"),
        })
        .collect()
}

pub fn encode<T: Real>(logical: &PureState<T>) -> Result<PureState<T>> {
    if logical.num_qubits() != LOGICAL_QUBITS {
        return domain(format!(
            "encoder takes {LOGICAL_QUBITS} logical qubits, got {}",
            logical.num_qubits()
        ));
    }
    let ancillae = PureState::basis(2, 0)?;
    logical.tensor(&ancillae)?.apply_all(&encoder_circuit())
}

/// Weight left on the ancilla pair `|00>` after running the encoder
/// backwards; 1 exactly on the code space.
pub fn code_space_weight<T: Real>(encoded: &PureState<T>) -> Result<T> {
    Ok(unencode(encoded)?
        .amplitudes()
        .iter()
        .step_by(4)
        .map(|a| a.norm_sqr())
        .sum())
}

fn unencode<T: Real>(encoded: &PureState<T>) -> Result<PureState<T>> {
    if encoded.num_qubits() != DATA_QUBITS {
        return domain(format!(
            "decoder takes {DATA_QUBITS} qubits, got {}",
            encoded.num_qubits()
        ));
    }
    // Every encoder gate is self-inverse.
    encoded.apply_all(encoder_circuit().iter().rev())
}

/// Inverse of [`encode`]; fails with [`Error::CodeSpaceViolation`] when
/// the ancillae do not come back as `|00>`.
pub fn decode<T: Real>(encoded: &PureState<T>) -> Result<PureState<T>> {
    let raw = unencode(encoded)?;
    let kept: Vec<Complex<T>> = raw.amplitudes().iter().step_by(4).copied().collect();
    let weight: T = kept.iter().map(|a| a.norm_sqr()).sum();
    if (T::one() - weight) > T::code_tol() {
        return Err(Error::CodeSpaceViolation {
            weight: weight.as_f64(),
        });
    }
    PureState::normalized(kept)
}

/// True when `state` lies in the code space within the code tolerance.
pub fn in_code_space<T: Real>(state: &PureState<T>) -> bool {
    code_space_weight(state).is_ok_and(|w| T::one() - w <= T::code_tol())
}
