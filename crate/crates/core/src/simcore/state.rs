use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::gate::{apply_strided, qubit_mask, Gate};
use super::measure::{outcome_matches, validate_qubits, MeasurementRecord};
use super::{DensityMatrix, MAX_QUBITS};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Normalized state vector of a register of at most [`MAX_QUBITS`] qubits.
///
/// Basis index bit `num_qubits - 1 - k` holds qubit `k`, so `|0110>` reads
/// left to right as qubits 0..3.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureState<T> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

pub(crate) fn qubits_for_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return domain(format!("length {len} is not a power of two"));
    }
    let n = len.trailing_zeros() as usize;
    if n == 0 || n > MAX_QUBITS {
        return domain(format!("{n} qubits outside 1..={MAX_QUBITS}"));
    }
    Ok(n)
}

impl<T: Real> PureState<T> {
    /// Wraps an amplitude vector, rejecting non-normalized input.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::exact_tol() {
            return domain(format!("state norm^2 {norm} differs from 1"));
        }
        Ok(state)
    }

    /// Wraps and rescales an arbitrary nonzero vector.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let norm: T = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::min_positive_value() {
            return domain("cannot normalize the zero vector");
        }
        amplitudes.iter_mut().for_each(|a| *a = *a / norm);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Real-amplitude superposition; convenient for writing kets from tables.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(
            amplitudes
                .iter()
                .map(|&a| Complex::new(T::lit(a), T::zero()))
                .collect(),
        )
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS || index >> num_qubits != 0 {
            return domain(format!("basis |{index}> invalid for {num_qubits} qubits"));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Computational basis ket from a bit string such as `"0110"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = parse_bits(bits)?;
        Self::basis(bits.len(), index)
    }

    /// Normalized sum of equally weighted signed kets, e.g. `[(1.0, "0110"), (1.0, "1001")]`.
    pub fn from_kets(terms: &[(f64, &str)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return domain("empty ket list");
        };
        let n = first.len();
        qubits_for_len(1 << n.min(63))?;
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        for &(coeff, bits) in terms {
            if bits.len() != n {
                return domain(format!("ket {bits} has the wrong width"));
            }
            let k = parse_bits(bits)?;
            amplitudes[k] = amplitudes[k] + Complex::new(T::lit(coeff), T::zero());
        }
        Self::normalized(amplitudes)
    }

    /// Haar-random state: normalized vector of i.i.d. complex Gaussians.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return domain(format!("{num_qubits} qubits outside 1..={MAX_QUBITS}"));
        }
        let amplitudes = (0..1usize << num_qubits)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::normalized(amplitudes)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `U|psi>` for a single gate.
    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_mut(gate)?;
        Ok(out)
    }

    pub fn apply_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        apply_strided(gate, self.num_qubits, &mut self.amplitudes, 0, 1, false);
        Ok(())
    }

    /// Applies `gates` in order.
    pub fn apply_all<'a>(&self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<Self> {
        let mut out = self.clone();
        for gate in gates {
            out.apply_mut(gate)?;
        }
        Ok(out)
    }

    /// `|self> ⊗ |other>`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return domain(format!("tensor product of {n} qubits exceeds {MAX_QUBITS}"));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| *a * *b))
            .collect();
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.num_qubits != other.num_qubits {
            return domain(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * *b
            }))
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        let f = self.inner(other)?.norm_sqr();
        Ok(f.min(T::one()))
    }

    pub fn to_density(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(self)
    }

    /// Probability that measuring `qubits` yields `outcome`.
    pub fn outcome_probability(&self, qubits: &[usize], outcome: &[bool]) -> Result<T> {
        validate_qubits(self.num_qubits, qubits, Some(outcome))?;
        let masks = masks(self.num_qubits, qubits);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| outcome_matches(*i, &masks, outcome))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects onto a fixed outcome of `qubits` and renormalizes. The
    /// measured qubits stay in the register, collapsed.
    pub fn project(
        &self,
        qubits: &[usize],
        outcome: &[bool],
    ) -> Result<(MeasurementRecord<T>, Self)> {
        let probability = self.outcome_probability(qubits, outcome)?;
        if probability <= T::exact_tol() {
            return Err(Error::ImpossibleBranch {
                qubits: qubits.to_vec(),
                outcome: MeasurementRecord::<T>::bit_string(outcome),
                probability: probability.as_f64(),
            });
        }
        let masks = masks(self.num_qubits, qubits);
        let scale = probability.sqrt();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if outcome_matches(i, &masks, outcome) {
                    *a / scale
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        Ok((
            MeasurementRecord::new(qubits.to_vec(), outcome.to_vec(), probability),
            Self {
                num_qubits: self.num_qubits,
                amplitudes,
            },
        ))
    }

    /// Born-rule measurement of `qubits` in the computational basis.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<(MeasurementRecord<T>, Self)> {
        validate_qubits(self.num_qubits, qubits, None)?;
        let masks = masks(self.num_qubits, qubits);
        let mut probs = vec![T::zero(); 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[outcome_index(i, &masks)] = probs[outcome_index(i, &masks)] + a.norm_sqr();
        }
        let outcome = super::measure::sample_outcome(&probs, qubits.len(), rng);
        self.project(qubits, &outcome)
    }

    /// Drops `qubit` when it is known to be in the basis state `value`
    /// (e.g. a collapsed ancilla). Fails if the state has weight elsewhere.
    pub fn discard_collapsed(&self, qubit: usize, value: bool) -> Result<Self> {
        validate_qubits(self.num_qubits, &[qubit], None)?;
        if self.num_qubits < 2 {
            return domain("cannot discard the only qubit");
        }
        let mask = qubit_mask(self.num_qubits, qubit);
        let mut amplitudes = Vec::with_capacity(self.dim() / 2);
        let mut stray = T::zero();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if (i & mask != 0) == value {
                amplitudes.push(*a);
            } else {
                stray = stray + a.norm_sqr();
            }
        }
        if stray > T::code_tol() {
            return domain(format!(
                "qubit {qubit} is not collapsed to {}: stray weight {stray}",
                u8::from(value)
            ));
        }
        Self::normalized(amplitudes)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }
}

fn masks(num_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    qubits.iter().map(|&q| qubit_mask(num_qubits, q)).collect()
}

fn outcome_index(i: usize, masks: &[usize]) -> usize {
    masks
        .iter()
        .fold(0, |acc, m| (acc << 1) | usize::from(i & m != 0))
}

pub(crate) fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > MAX_QUBITS {
        return domain(format!("bit string {bits:?} has invalid width"));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => domain(format!("bit string {bits:?} contains {c:?}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn hadamard_on_zero() {
        let plus = PureState::<f64>::from_bits("0")
            .unwrap()
            .apply(&Gate::h(0))
            .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(plus.max_abs_diff(&PureState::new(vec![c(s), c(s)]).unwrap()) < 1e-15);
    }

    #[test]
    fn cnot_control_first() {
        let out = PureState::<f64>::from_bits("10")
            .unwrap()
            .apply(&Gate::cnot(0, 1))
            .unwrap();
        assert_eq!(out, PureState::from_bits("11").unwrap());
        let out = PureState::<f64>::from_bits("01")
            .unwrap()
            .apply(&Gate::cnot(0, 1))
            .unwrap();
        assert_eq!(out, PureState::from_bits("01").unwrap());
    }

    #[test]
    fn invalid_target_is_domain_error() {
        let s = PureState::<f64>::from_bits("00").unwrap();
        assert!(matches!(s.apply(&Gate::x(2)), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_unnormalized_and_bad_length() {
        assert!(PureState::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(PureState::new(vec![c(1.0), c(0.0), c(0.0)]).is_err());
        assert!(PureState::<f64>::basis(9, 0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::<f64>::from_bits("0").unwrap();
        let one = PureState::<f64>::from_bits("1").unwrap();
        let plus = zero.apply(&Gate::h(0)).unwrap();
        assert!((zero.fidelity(&zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(zero.fidelity(&one).unwrap().abs() < 1e-12);
        assert!((zero.fidelity(&plus).unwrap() - 0.5).abs() < 1e-12);
        let two = PureState::<f64>::from_bits("00").unwrap();
        assert!(zero.fidelity(&two).is_err());
    }

    #[test]
    fn project_pure_state() {
        let bell = PureState::<f64>::from_kets(&[(1.0, "00"), (1.0, "11")]).unwrap();
        let (rec, post) = bell.project(&[1], &[true]).unwrap();
        assert!((rec.probability - 0.5).abs() < 1e-12);
        assert_eq!(post, PureState::from_bits("11").unwrap());
        let zero = PureState::<f64>::from_bits("00").unwrap();
        assert!(matches!(
            zero.project(&[0], &[true]),
            Err(Error::ImpossibleBranch { .. })
        ));
    }

    #[test]
    fn random_state_is_normalized_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let s = PureState::<f64>::random(3, &mut a).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(s, PureState::random(3, &mut b).unwrap());
    }

    #[test]
    fn discard_collapsed_qubit() {
        let s = PureState::<f64>::from_kets(&[(1.0, "010"), (1.0, "110")]).unwrap();
        let reduced = s.discard_collapsed(2, false).unwrap();
        assert_eq!(reduced.num_qubits(), 2);
        assert!(s.discard_collapsed(2, true).is_err());
        assert!(s.discard_collapsed(0, false).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let s = PureState::<f32>::from_kets(&[(1.0, "0"), (1.0, "1")]).unwrap();
        let back = s.apply(&Gate::h(0)).unwrap();
        assert!((back.fidelity(&PureState::from_bits("0").unwrap()).unwrap() - 1.0).abs() < 1e-5);
    }
}
