use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use super::gate::{apply_strided, qubit_mask, Gate};
use super::measure::{outcome_matches, sample_outcome, validate_qubits, MeasurementRecord};
use super::state::qubits_for_len;
use super::{PureState, MAX_QUBITS};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Dense density operator, row-major, same qubit ordering as [`PureState`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix<T> {
    num_qubits: usize,
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Wraps a row-major matrix after checking Hermiticity and unit trace.
    /// Positivity is checked separately by [`DensityMatrix::validate`].
    pub fn new(num_qubits: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return domain(format!("{num_qubits} qubits outside 1..={MAX_QUBITS}"));
        }
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return domain(format!("{} entries for a {dim}x{dim} matrix", data.len()));
        }
        let rho = Self {
            num_qubits,
            dim,
            data,
        };
        rho.check_hermitian_trace()?;
        Ok(rho)
    }

    pub fn from_pure(state: &PureState<T>) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in amps {
            for b in amps {
                data.push(*a * b.conj());
            }
        }
        Self {
            num_qubits: state.num_qubits(),
            dim,
            data,
        }
    }

    /// `Σ w_k |ψ_k><ψ_k|`; weights must sum to 1.
    pub fn from_ensemble(ensemble: &[(PureState<T>, T)]) -> Result<Self> {
        let Some((first, _)) = ensemble.first() else {
            return domain("empty ensemble");
        };
        let n = first.num_qubits();
        let dim = first.dim();
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (state, w) in ensemble {
            if state.num_qubits() != n {
                return domain("ensemble members differ in width");
            }
            if *w < T::zero() {
                return domain(format!("negative ensemble weight {w}"));
            }
            let amps = state.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    data[i * dim + j] = data[i * dim + j] + amps[i] * amps[j].conj() * *w;
                }
            }
        }
        Self::new(n, data)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        qubits_for_len(1usize << num_qubits.min(63))?;
        let dim = 1usize << num_qubits;
        let w = Complex::new(T::one() / T::lit(dim as f64), T::zero());
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = w;
        }
        Ok(Self {
            num_qubits,
            dim,
            data,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.get(i, i)
        })
    }

    /// `Tr ρ²`; equals 1 exactly for pure states.
    pub fn purity(&self) -> T {
        // Tr ρ² = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    fn check_hermitian_trace(&self) -> Result<()> {
        let tol = T::exact_tol();
        for i in 0..self.dim {
            for j in i..self.dim {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return domain(format!("matrix not Hermitian at ({i},{j})"));
                }
            }
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return domain(format!("trace {tr} differs from 1"));
        }
        Ok(())
    }

    /// Eigenvalues in ascending order (computed in `f64`).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let c = self.get(i, j);
            Complex::new(c.re.as_f64(), c.im.as_f64())
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Full invariant check: Hermitian, unit trace, eigenvalues ≥ −1e-10.
    pub fn validate(&self) -> Result<()> {
        self.check_hermitian_trace()?;
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return domain(format!("negative eigenvalue {min:e}"));
        }
        Ok(())
    }

    /// `UρU†`.
    pub fn apply(&self, gate: &Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_mut(gate)?;
        Ok(out)
    }

    pub fn apply_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let (n, dim) = (self.num_qubits, self.dim);
        for col in 0..dim {
            apply_strided(gate, n, &mut self.data, col, dim, false);
        }
        for row in 0..dim {
            apply_strided(gate, n, &mut self.data, row * dim, 1, true);
        }
        Ok(())
    }

    pub fn apply_all<'a>(&self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<Self> {
        let mut out = self.clone();
        for gate in gates {
            out.apply_mut(gate)?;
        }
        Ok(out)
    }

    /// Traces out `qubit`; the remaining qubits keep their relative order.
    pub fn partial_trace(&self, qubit: usize) -> Result<Self> {
        if self.num_qubits < 2 {
            return domain("partial trace needs at least two qubits");
        }
        if qubit >= self.num_qubits {
            return domain(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            ));
        }
        let n = self.num_qubits - 1;
        let dim = 1usize << n;
        let low_bits = self.num_qubits - 1 - qubit;
        let insert = |i: usize, bit: usize| {
            let high = (i >> low_bits) << (low_bits + 1);
            let low = i & ((1 << low_bits) - 1);
            high | (bit << low_bits) | low
        };
        let mut data = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                data.push(
                    self.get(insert(a, 0), insert(b, 0)) + self.get(insert(a, 1), insert(b, 1)),
                );
            }
        }
        Ok(Self {
            num_qubits: n,
            dim,
            data,
        })
    }

    /// Inserts the single-qubit state `fresh` so it becomes qubit `position`.
    pub fn embed(&self, fresh: &PureState<T>, position: usize) -> Result<Self> {
        if fresh.num_qubits() != 1 {
            return domain("embedded state must be a single qubit");
        }
        if position > self.num_qubits {
            return domain(format!(
                "position {position} beyond {} qubits",
                self.num_qubits
            ));
        }
        let n = self.num_qubits + 1;
        if n > MAX_QUBITS {
            return domain(format!("embedding exceeds {MAX_QUBITS} qubits"));
        }
        let dim = 1usize << n;
        let mask = qubit_mask(n, position);
        let low_bits = n - 1 - position;
        let remove = |i: usize| ((i >> (low_bits + 1)) << low_bits) | (i & ((1 << low_bits) - 1));
        let f = fresh.amplitudes();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            let fi = f[usize::from(i & mask != 0)];
            for j in 0..dim {
                let fj = f[usize::from(j & mask != 0)];
                data.push(self.get(remove(i), remove(j)) * fi * fj.conj());
            }
        }
        Ok(Self {
            num_qubits: n,
            dim,
            data,
        })
    }

    /// `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return domain(format!("tensor product of {n} qubits exceeds {MAX_QUBITS}"));
        }
        let dim = self.dim * other.dim;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            let (ia, ib) = (i / other.dim, i % other.dim);
            for j in 0..dim {
                let (ja, jb) = (j / other.dim, j % other.dim);
                data.push(self.get(ia, ja) * other.get(ib, jb));
            }
        }
        Ok(Self {
            num_qubits: n,
            dim,
            data,
        })
    }

    pub fn outcome_probability(&self, qubits: &[usize], outcome: &[bool]) -> Result<T> {
        validate_qubits(self.num_qubits, qubits, Some(outcome))?;
        let masks = self.masks(qubits);
        Ok((0..self.dim)
            .filter(|&i| outcome_matches(i, &masks, outcome))
            .map(|i| self.get(i, i).re)
            .sum())
    }

    /// Projects `qubits` onto `outcome` and renormalizes.
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
        let masks = self.masks(qubits);
        let keep: Vec<bool> = (0..self.dim)
            .map(|i| outcome_matches(i, &masks, outcome))
            .collect();
        let zero = Complex::new(T::zero(), T::zero());
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.dim {
            for j in 0..self.dim {
                data.push(if keep[i] && keep[j] {
                    self.get(i, j) / probability
                } else {
                    zero
                });
            }
        }
        Ok((
            MeasurementRecord::new(qubits.to_vec(), outcome.to_vec(), probability),
            Self {
                num_qubits: self.num_qubits,
                dim: self.dim,
                data,
            },
        ))
    }

    /// Samples a computational-basis outcome of `qubits` from `rng`.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<(MeasurementRecord<T>, Self)> {
        validate_qubits(self.num_qubits, qubits, None)?;
        let masks = self.masks(qubits);
        let mut probs = vec![T::zero(); 1 << qubits.len()];
        for i in 0..self.dim {
            let k = masks
                .iter()
                .fold(0, |acc, m| (acc << 1) | usize::from(i & m != 0));
            probs[k] = probs[k] + self.get(i, i).re;
        }
        let outcome = sample_outcome(&probs, qubits.len(), rng);
        self.project(qubits, &outcome)
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_with(&self, state: &PureState<T>) -> Result<T> {
        if state.num_qubits() != self.num_qubits {
            return domain("dimension mismatch in fidelity");
        }
        let a = state.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc = acc + a[i].conj() * self.get(i, j) * a[j];
            }
        }
        Ok(acc.re)
    }

    /// The state vector of a rank-one ρ, up to global phase; `None` if
    /// `Tr ρ²` is not 1 within the code tolerance.
    pub fn to_pure(&self) -> Option<PureState<T>> {
        if (self.purity() - T::one()).abs() > T::code_tol() {
            return None;
        }
        let pivot = (0..self.dim).max_by(|&a, &b| {
            self.get(a, a)
                .re
                .partial_cmp(&self.get(b, b).re)
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let amplitudes = (0..self.dim).map(|i| self.get(i, pivot)).collect();
        PureState::normalized(amplitudes).ok()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    fn masks(&self, qubits: &[usize]) -> Vec<usize> {
        qubits
            .iter()
            .map(|&q| qubit_mask(self.num_qubits, q))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(bits: &str) -> PureState<f64> {
        PureState::from_bits(bits).unwrap()
    }

    #[test]
    fn x_flips_projector() {
        let rho = ket("0").to_density().apply(&Gate::x(0)).unwrap();
        assert!(rho.max_abs_diff(&ket("1").to_density()) < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_invariant() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(3).unwrap();
        for gate in [Gate::h(1), Gate::cnot(2, 0), Gate::cz(0, 1), Gate::z(2)] {
            assert!(mixed.apply(&gate).unwrap().max_abs_diff(&mixed) < 1e-12);
        }
    }

    #[test]
    fn bell_pair_reduces_to_identity_over_two() {
        let bell = PureState::<f64>::from_kets(&[(1.0, "00"), (1.0, "11")]).unwrap();
        let half = DensityMatrix::maximally_mixed(1).unwrap();
        for q in 0..2 {
            let r = bell.to_density().partial_trace(q).unwrap();
            assert!(r.max_abs_diff(&half) < 1e-12);
        }
    }

    #[test]
    fn product_state_partial_trace() {
        let psi = PureState::<f64>::from_kets(&[(1.0, "0"), (2.0, "1")]).unwrap();
        let phi = PureState::<f64>::from_kets(&[(3.0, "0"), (-1.0, "1")]).unwrap();
        let joint = psi.tensor(&phi).unwrap().to_density();
        assert!(
            joint
                .partial_trace(1)
                .unwrap()
                .max_abs_diff(&psi.to_density())
                < 1e-12
        );
        assert!(
            joint
                .partial_trace(0)
                .unwrap()
                .max_abs_diff(&phi.to_density())
                < 1e-12
        );
    }

    #[test]
    fn partial_trace_errors() {
        let one = ket("0").to_density();
        assert!(one.partial_trace(0).is_err());
        assert!(ket("00").to_density().partial_trace(2).is_err());
    }

    #[test]
    fn embed_round_trip_and_bounds() {
        let psi = PureState::<f64>::from_kets(&[(1.0, "01"), (1.0, "10")]).unwrap();
        let rho = psi.to_density();
        for pos in 0..=2 {
            let big = rho.embed(&ket("0"), pos).unwrap();
            assert_eq!(big.num_qubits(), 3);
            assert!((big.trace().re - 1.0).abs() < 1e-12);
            assert!(big.partial_trace(pos).unwrap().max_abs_diff(&rho) < 1e-12);
        }
        assert!(rho.embed(&ket("0"), 3).is_err());
        assert!(rho.embed(&ket("00"), 0).is_err());
    }

    #[test]
    fn measure_certain_outcome() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let (rec, post) = ket("0").to_density().measure(&[0], &mut rng).unwrap();
        assert_eq!(rec.outcome_bits, vec![false]);
        assert!((rec.probability - 1.0).abs() < 1e-12);
        assert!(post.max_abs_diff(&ket("0").to_density()) < 1e-12);
    }

    #[test]
    fn impossible_branch() {
        let rho = ket("00").to_density();
        assert!(matches!(
            rho.project(&[0, 1], &[false, true]),
            Err(Error::ImpossibleBranch { .. })
        ));
    }

    #[test]
    fn new_rejects_non_hermitian() {
        let c = |r: f64, i: f64| Complex::new(r, i);
        let bad = vec![c(0.5, 0.0), c(0.1, 0.1), c(0.1, 0.1), c(0.5, 0.0)];
        assert!(DensityMatrix::new(1, bad).is_err());
        let bad_trace = vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)];
        assert!(DensityMatrix::new(1, bad_trace).is_err());
    }

    #[test]
    fn validate_detects_negative_eigenvalue() {
        let c = |r: f64| Complex::new(r, 0.0);
        let rho = DensityMatrix::new(1, vec![c(0.5), c(0.9), c(0.9), c(0.5)]).unwrap();
        assert!(rho.validate().is_err());
        assert!(ket("01").to_density().validate().is_ok());
    }

    #[test]
    fn to_pure_recovers_state_up_to_phase() {
        let psi = PureState::<f64>::from_kets(&[(1.0, "00"), (-2.0, "10"), (0.5, "11")]).unwrap();
        let back = psi.to_density().to_pure().unwrap();
        assert!((back.fidelity(&psi).unwrap() - 1.0).abs() < 1e-12);
        assert!(DensityMatrix::<f64>::maximally_mixed(2)
            .unwrap()
            .to_pure()
            .is_none());
    }
}
