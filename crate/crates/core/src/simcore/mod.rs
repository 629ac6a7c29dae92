//! Exact dense simulation of small qubit registers.
//!
//! Qubit 0 is the leftmost symbol of a ket: `|0110>` has qubit 0 = 0,
//! qubit 1 = 1, and so on. Registers are capped at [`MAX_QUBITS`].

mod density;
mod gate;
pub(crate) mod measure;
mod state;

pub use density::DensityMatrix;
pub use gate::{Gate, GateKind};
pub use measure::{bits_to_index, index_to_bits, MeasurementRecord};
pub use state::PureState;

use crate::error::Result;
use crate::scalar::Real;

pub const MAX_QUBITS: usize = 8;

/// `|<a|b>|^2`.
pub fn fidelity<T: Real>(a: &PureState<T>, b: &PureState<T>) -> Result<T> {
    a.fidelity(b)
}
