use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Result of a computational-basis measurement on a subset of qubits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord<T> {
    pub qubit_indices: Vec<usize>,
    /// One bit per entry of `qubit_indices`, in the same order.
    pub outcome_bits: Vec<bool>,
    /// Born-rule probability of this branch in the pre-measurement state.
    pub probability: T,
}

impl<T: Real> MeasurementRecord<T> {
    pub fn new(qubit_indices: Vec<usize>, outcome_bits: Vec<bool>, probability: T) -> Self {
        Self {
            qubit_indices,
            outcome_bits,
            probability,
        }
    }

    /// Outcome as an integer, first measured qubit most significant.
    pub fn outcome_index(&self) -> usize {
        bits_to_index(&self.outcome_bits)
    }

    pub(crate) fn bit_string(bits: &[bool]) -> String {
        bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl<T: Real> fmt::Display for MeasurementRecord<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "qubits {:?} -> |{}> (p = {})",
            self.qubit_indices,
            Self::bit_string(&self.outcome_bits),
            self.probability
        )
    }
}

pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// `width` bits of `index`, most significant first.
pub fn index_to_bits(index: usize, width: usize) -> Vec<bool> {
    (0..width)
        .map(|k| index & (1 << (width - 1 - k)) != 0)
        .collect()
}

pub(crate) fn validate_qubits(
    num_qubits: usize,
    qubits: &[usize],
    outcome: Option<&[bool]>,
) -> Result<()> {
    if qubits.is_empty() {
        return domain("no qubits to measure");
    }
    for (k, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return domain(format!("qubit {q} out of range for {num_qubits} qubits"));
        }
        if qubits[..k].contains(&q) {
            return domain(format!("qubit {q} listed twice"));
        }
    }
    if let Some(bits) = outcome {
        if bits.len() != qubits.len() {
            return domain(format!(
                "{} outcome bits for {} qubits",
                bits.len(),
                qubits.len()
            ));
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn outcome_matches(index: usize, masks: &[usize], outcome: &[bool]) -> bool {
    masks
        .iter()
        .zip(outcome)
        .all(|(m, &bit)| (index & m != 0) == bit)
}

/// Draws an outcome index from (possibly slightly unnormalized) branch
/// probabilities; never returns a zero-probability branch.
pub(crate) fn sample_outcome<T: Real, R: Rng + ?Sized>(
    probs: &[T],
    width: usize,
    rng: &mut R,
) -> Vec<bool> {
    let total: f64 = probs.iter().map(|p| p.as_f64()).sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut chosen = None;
    for (k, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        if p <= 0.0 {
            continue;
        }
        chosen = Some(k);
        acc += p;
        if u < acc {
            break;
        }
    }
    index_to_bits(chosen.unwrap_or(0), width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_helpers_round_trip() {
        for i in 0..8 {
            assert_eq!(bits_to_index(&index_to_bits(i, 3)), i);
        }
        assert_eq!(index_to_bits(1, 2), vec![false, true]);
    }

    #[test]
    fn duplicate_and_out_of_range_rejected() {
        assert!(validate_qubits(3, &[0, 0], None).is_err());
        assert!(validate_qubits(3, &[3], None).is_err());
        assert!(validate_qubits(3, &[0, 1], Some(&[true])).is_err());
        assert!(validate_qubits(3, &[2, 0], Some(&[true, false])).is_ok());
    }
}
