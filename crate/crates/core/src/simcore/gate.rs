use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Z,
    Cnot,
    Cz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z => 1,
            GateKind::Cnot | GateKind::Cz => 2,
        }
    }

    /// Row-major local matrix; for two-qubit kinds the control is the
    /// most significant local bit.
    pub fn matrix<T: Real>(self) -> Vec<Complex<T>> {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        let m = -o;
        match self {
            GateKind::H => {
                let s = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                vec![s, s, s, -s]
            }
            GateKind::X => vec![z, o, o, z],
            GateKind::Z => vec![o, z, z, m],
            GateKind::Cnot => vec![
                o, z, z, z, //
                z, o, z, z, //
                z, z, z, o, //
                z, z, o, z,
            ],
            GateKind::Cz => vec![
                o, z, z, z, //
                z, o, z, z, //
                z, z, o, z, //
                z, z, z, m,
            ],
        }
    }
}

/// A gate bound to concrete qubit indices (control first for two-qubit kinds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    targets: [usize; 2],
}

impl Gate {
    pub fn h(qubit: usize) -> Self {
        Self::single(GateKind::H, qubit)
    }

    pub fn x(qubit: usize) -> Self {
        Self::single(GateKind::X, qubit)
    }

    pub fn z(qubit: usize) -> Self {
        Self::single(GateKind::Z, qubit)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            targets: [control, target],
        }
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cz,
            targets: [control, target],
        }
    }

    fn single(kind: GateKind, qubit: usize) -> Self {
        Self {
            kind,
            targets: [qubit, usize::MAX],
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets[..self.kind.arity()]
    }

    pub fn matrix<T: Real>(&self) -> Vec<Complex<T>> {
        self.kind.matrix()
    }

    /// Checks the targets against a register of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let targets = self.targets();
        if let Some(&bad) = targets.iter().find(|&&q| q >= num_qubits) {
            return domain(format!(
                "{:?} target {bad} out of range for {num_qubits} qubits",
                self.kind
            ));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return domain(format!(
                "{:?} control and target coincide on qubit {}",
                self.kind, targets[0]
            ));
        }
        Ok(())
    }
}

/// Bit mask of `qubit` in a basis index; qubit 0 is the most significant bit.
#[inline]
pub(crate) fn qubit_mask(num_qubits: usize, qubit: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

/// Applies a validated gate in place to the vector
/// `data[offset + i * stride]`, `i in 0..2^num_qubits`.
/// With `conjugate` set the complex conjugate of the gate matrix is used.
pub(crate) fn apply_strided<T: Real>(
    gate: &Gate,
    num_qubits: usize,
    data: &mut [Complex<T>],
    offset: usize,
    stride: usize,
    conjugate: bool,
) {
    let dim = 1usize << num_qubits;
    let mut matrix = gate.matrix::<T>();
    if conjugate {
        matrix.iter_mut().for_each(|c| *c = c.conj());
    }
    let masks: Vec<usize> = gate
        .targets()
        .iter()
        .map(|&q| qubit_mask(num_qubits, q))
        .collect();
    let all = masks.iter().fold(0, |acc, m| acc | m);
    let local = 1usize << masks.len();

    let mut idx = [0usize; 4];
    let mut buf = [Complex::new(T::zero(), T::zero()); 4];
    for base in (0..dim).filter(|i| i & all == 0) {
        for (l, slot) in idx.iter_mut().take(local).enumerate() {
            let mut i = base;
            for (b, m) in masks.iter().enumerate() {
                if l & (1 << (masks.len() - 1 - b)) != 0 {
                    i |= m;
                }
            }
            *slot = offset + i * stride;
        }
        for l in 0..local {
            buf[l] = data[idx[l]];
        }
        for r in 0..local {
            let mut acc = Complex::new(T::zero(), T::zero());
            for c in 0..local {
                acc = acc + matrix[r * local + c] * buf[c];
            }
            data[idx[r]] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_is_unitary() {
        for kind in [
            GateKind::H,
            GateKind::X,
            GateKind::Z,
            GateKind::Cnot,
            GateKind::Cz,
        ] {
            let m = kind.matrix::<f64>();
            let d = 1 << kind.arity();
            for i in 0..d {
                for j in 0..d {
                    let mut acc = Complex::new(0.0, 0.0);
                    for k in 0..d {
                        acc += m[k * d + i].conj() * m[k * d + j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((acc - expect).norm() < 1e-12, "{kind:?} not unitary");
                }
            }
        }
    }

    #[test]
    fn validate_rejects_bad_targets() {
        assert!(Gate::h(3).validate(3).is_err());
        assert!(Gate::cnot(1, 1).validate(3).is_err());
        assert!(Gate::cz(0, 5).validate(4).is_err());
        assert!(Gate::cnot(0, 2).validate(3).is_ok());
        assert_eq!(Gate::x(2).targets(), &[2]);
    }
}
