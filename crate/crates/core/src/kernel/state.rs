//! Pure and mixed register states.
//!
//! Basis index bit `n-1-q` holds qubit `q`, so `|0000⟩` is index 0 and
//! `|1000⟩` (qubit 0 flipped) is index 8.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::pauli::PauliString;
use crate::kernel::C64;

/// Largest register a dense state vector is allowed to hold.
pub const MAX_STATE_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-10;

/// A single-qubit gate as a row-major 2×2 array.
pub type Gate1 = [[C64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_letter(c: char) -> Option<Axis> {
        match c.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }
}

/// `R^α(θ) = exp(-iθσ^α/2)`.
pub fn rotation_gate(axis: Axis, theta: f64) -> Gate1 {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let z = C64::new(0.0, 0.0);
    match axis {
        Axis::X => [
            [C64::new(c, 0.0), C64::new(0.0, -s)],
            [C64::new(0.0, -s), C64::new(c, 0.0)],
        ],
        Axis::Y => [
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)],
        ],
        Axis::Z => [[C64::new(c, -s), z], [z, C64::new(c, s)]],
    }
}

/// Operations shared by state vectors and density matrices.
///
/// Every method returns a new state; inputs are never modified.
pub trait QuantumState: Clone + Send + Sync {
    fn n_qubits(&self) -> usize;

    fn apply_single_qubit(&self, qubit: usize, gate: &Gate1) -> Result<Self>;

    /// Multiplies basis state `b` by `diag[b]` (a diagonal unitary).
    fn apply_diagonal(&self, diag: &[C64]) -> Result<Self>;

    fn apply_swap(&self, a: usize, b: usize) -> Result<Self>;

    /// `⟨P⟩`; `P` must be Hermitian.
    fn expectation(&self, p: &PauliString) -> Result<f64>;

    /// `|⟨ψ|φ⟩|²` for a pure state, `⟨ψ|ρ|ψ⟩` for a mixed one.
    fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64>;

    fn to_density(&self) -> DensityMatrix;

    /// Reduced state on `keep`, kept qubits renumbered in ascending order.
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

pub fn apply_rotation<S: QuantumState>(qubit: usize, axis: Axis, theta: f64, state: &S) -> Result<S> {
    state.apply_single_qubit(qubit, &rotation_gate(axis, theta))
}

pub fn expectation<S: QuantumState>(p: &PauliString, state: &S) -> Result<f64> {
    state.expectation(p)
}

/// Pure-vs-pure or pure-vs-mixed fidelity, see [`QuantumState::fidelity_with_pure`].
pub fn state_fidelity<S: QuantumState>(psi: &StateVector, sigma: &S) -> Result<f64> {
    sigma.fidelity_with_pure(psi)
}

fn check_qubit(qubit: usize, n_qubits: usize) -> Result<()> {
    if qubit >= n_qubits {
        return Err(Error::QubitIndex {
            index: qubit,
            n_qubits,
        });
    }
    Ok(())
}

fn check_sizes(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::SizeMismatch { left: a, right: b });
    }
    Ok(())
}

#[inline]
pub(crate) fn qubit_bit(n_qubits: usize, qubit: usize) -> usize {
    1usize << (n_qubits - 1 - qubit)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "StateVector",
                n_qubits,
                max: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::AmplitudeLength {
                len: index,
                expected: dim,
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Basis state from a bit label such as `"0110"` (qubit 0 first).
    pub fn from_bits(bits: &str) -> Result<Self> {
        let mut index = 0usize;
        for (pos, ch) in bits.chars().enumerate() {
            index = (index << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => {
                        return Err(Error::Format {
                            line: 0,
                            msg: format!("bad bit {ch:?} at position {pos}"),
                        })
                    }
                };
        }
        Self::basis(bits.chars().count(), index)
    }

    /// Takes amplitudes that must already have unit norm (within 1e-10).
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::from_amplitudes_unnormalized(n_qubits, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let mut state = Self::from_amplitudes_unnormalized(n_qubits, amplitudes)?;
        let norm = state.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        for a in &mut state.amplitudes {
            *a /= norm;
        }
        Ok(state)
    }

    fn from_amplitudes_unnormalized(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(Error::TooManyQubits {
                what: "StateVector",
                n_qubits,
                max: MAX_STATE_QUBITS,
            });
        }
        let expected = 1usize << n_qubits;
        if amplitudes.len() != expected {
            return Err(Error::AmplitudeLength {
                len: amplitudes.len(),
                expected,
            });
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_sizes(self.n_qubits, other.n_qubits)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Nonzero amplitudes as `(basis index, amplitude)` pairs.
    pub fn support(&self, tol: f64) -> Vec<(usize, C64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, a)| (i, *a))
            .collect()
    }

    pub fn to_column(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(&self.amplitudes)
    }

    pub fn from_column(n_qubits: usize, v: &nalgebra::DVector<C64>) -> Result<Self> {
        Self::from_amplitudes_unnormalized(n_qubits, v.iter().copied().collect())
    }

    /// Applies a dense `2^n × 2^n` matrix.
    pub fn apply_matrix(&self, m: &DMatrix<C64>) -> Result<Self> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: self.dim(),
            });
        }
        Self::from_column(self.n_qubits, &(m * self.to_column()))
    }

    pub(crate) fn scaled_add(&self, a: C64, other: &StateVector, b: C64) -> StateVector {
        StateVector {
            n_qubits: self.n_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> StateVector {
        debug_assert_eq!(amplitudes.len(), 1usize << n_qubits);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_single_qubit(&self, qubit: usize, gate: &Gate1) -> Result<Self> {
        check_qubit(qubit, self.n_qubits)?;
        let bit = qubit_bit(self.n_qubits, qubit);
        let mut out = self.amplitudes.clone();
        for i0 in 0..out.len() {
            if i0 & bit != 0 {
                continue;
            }
            let i1 = i0 | bit;
            let a0 = self.amplitudes[i0];
            let a1 = self.amplitudes[i1];
            out[i0] = gate[0][0] * a0 + gate[0][1] * a1;
            out[i1] = gate[1][0] * a0 + gate[1][1] * a1;
        }
        Ok(StateVector::from_raw(self.n_qubits, out))
    }

    fn apply_diagonal(&self, diag: &[C64]) -> Result<Self> {
        if diag.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: diag.len(),
                right: self.dim(),
            });
        }
        let out = self
            .amplitudes
            .iter()
            .zip(diag)
            .map(|(a, d)| a * d)
            .collect();
        Ok(StateVector::from_raw(self.n_qubits, out))
    }

    fn apply_swap(&self, a: usize, b: usize) -> Result<Self> {
        check_qubit(a, self.n_qubits)?;
        check_qubit(b, self.n_qubits)?;
        let perm = swap_permutation(self.n_qubits, a, b);
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            out[perm(i)] = *amp;
        }
        Ok(StateVector::from_raw(self.n_qubits, out))
    }

    fn expectation(&self, p: &PauliString) -> Result<f64> {
        check_sizes(self.n_qubits, p.n_qubits())?;
        if !p.is_hermitian() {
            return Err(Error::NonHermitian(p.phase()));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (b, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (target, coeff) = p.act_on_basis(b);
            acc += self.amplitudes[target].conj() * coeff * amp;
        }
        Ok(acc.re)
    }

    fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        Ok(psi.inner(self)?.norm_sqr())
    }

    fn to_density(&self) -> DensityMatrix {
        let v = self.to_column();
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: &v * v.adjoint(),
        }
    }
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        crate::kernel::linalg::partial_trace_pure(self, keep)
    }
}

/// Maps a basis index to its image under exchange of qubits `a` and `b`.
pub(crate) fn swap_permutation(n_qubits: usize, a: usize, b: usize) -> impl Fn(usize) -> usize {
    let ba = qubit_bit(n_qubits, a);
    let bb = qubit_bit(n_qubits, b);
    move |i| {
        let va = i & ba != 0;
        let vb = i & bb != 0;
        if va == vb {
            i
        } else {
            i ^ ba ^ bb
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<C64>,
}

/// Largest register a dense density matrix is allowed to hold.
pub const MAX_DENSITY_QUBITS: usize = 12;

impl DensityMatrix {
    /// Wraps a matrix after checking shape, Hermiticity and unit trace
    /// (both within 1e-10). Positivity is not required.
    pub fn from_matrix(n_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                what: "DensityMatrix",
                n_qubits,
                max: MAX_DENSITY_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: dim,
            });
        }
        let herm_err = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_err > NORM_TOL {
            return Err(Error::Config(format!(
                "density matrix is not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::Config(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        Ok(DensityMatrix { n_qubits, matrix })
    }

    pub(crate) fn from_raw(n_qubits: usize, matrix: DMatrix<C64>) -> DensityMatrix {
        DensityMatrix { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let m = DMatrix::<C64>::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Self::from_matrix(n_qubits, m)
    }

    /// `(1-ε) I/2^n + ε |ψ⟩⟨ψ|`.
    pub fn pseudo_pure(psi: &StateVector, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: epsilon,
                range: "[0, 1]",
            });
        }
        let mixed = Self::maximally_mixed(psi.n_qubits())?;
        let pure = psi.to_density();
        Ok(mixed.mix(&pure, epsilon))
    }

    /// `(1-w)·self + w·other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * C64::new(1.0 - w, 0.0) + &other.matrix * C64::new(w, 0.0),
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        crate::kernel::linalg::hermitian_eigen(&self.matrix).0
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.eigenvalues().first().is_none_or(|&l| l >= -tol)
    }

    pub fn apply_matrix(&self, u: &DMatrix<C64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: u.nrows(),
                right: self.dim(),
            });
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: u * &self.matrix * u.adjoint(),
        })
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_single_qubit(&self, qubit: usize, gate: &Gate1) -> Result<Self> {
        check_qubit(qubit, self.n_qubits)?;
        let bit = qubit_bit(self.n_qubits, qubit);
        let dim = self.dim();
        let mut m = self.matrix.clone();
        // U ρ: mix row pairs
        for col in 0..dim {
            for r0 in 0..dim {
                if r0 & bit != 0 {
                    continue;
                }
                let r1 = r0 | bit;
                let a0 = m[(r0, col)];
                let a1 = m[(r1, col)];
                m[(r0, col)] = gate[0][0] * a0 + gate[0][1] * a1;
                m[(r1, col)] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
        // (Uρ) U†: mix column pairs with conjugated gate entries
        for c0 in 0..dim {
            if c0 & bit != 0 {
                continue;
            }
            let c1 = c0 | bit;
            for row in 0..dim {
                let a0 = m[(row, c0)];
                let a1 = m[(row, c1)];
                m[(row, c0)] = a0 * gate[0][0].conj() + a1 * gate[0][1].conj();
                m[(row, c1)] = a0 * gate[1][0].conj() + a1 * gate[1][1].conj();
            }
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    fn apply_diagonal(&self, diag: &[C64]) -> Result<Self> {
        if diag.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: diag.len(),
                right: self.dim(),
            });
        }
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |r, c| diag[r] * self.matrix[(r, c)] * diag[c].conj());
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    fn apply_swap(&self, a: usize, b: usize) -> Result<Self> {
        check_qubit(a, self.n_qubits)?;
        check_qubit(b, self.n_qubits)?;
        let perm = swap_permutation(self.n_qubits, a, b);
        let dim = self.dim();
        // perm is an involution
        let m = DMatrix::from_fn(dim, dim, |r, c| self.matrix[(perm(r), perm(c))]);
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    fn expectation(&self, p: &PauliString) -> Result<f64> {
        check_sizes(self.n_qubits, p.n_qubits())?;
        if !p.is_hermitian() {
            return Err(Error::NonHermitian(p.phase()));
        }
        // Tr(Pρ) = Σ_c coeff(c) ρ[c, c⊕x]
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..self.dim() {
            let (r, coeff) = p.act_on_basis(c);
            acc += coeff * self.matrix[(c, r)];
        }
        Ok(acc.re)
    }

    fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        check_sizes(self.n_qubits, psi.n_qubits())?;
        let v = psi.to_column();
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    fn to_density(&self) -> DensityMatrix {
        self.clone()
    }
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        crate::kernel::linalg::partial_trace_mixed(self, keep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::testing::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rotation_zero_angle_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = StateVector::from_amplitudes(3, random_amplitudes(&mut rng, 3)).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let out = apply_rotation(1, axis, 0.0, &psi).unwrap();
            assert_eq!(out, psi);
        }
    }

    #[test]
    fn ry_half_pi_on_zero() {
        let psi = StateVector::zero(1).unwrap();
        let out = apply_rotation(0, Axis::Y, FRAC_PI_2, &psi).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - c(h)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(h)).norm() < 1e-15);
    }

    #[test]
    fn ry_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = StateVector::from_amplitudes(2, random_amplitudes(&mut rng, 2)).unwrap();
        let there = apply_rotation(0, Axis::Y, FRAC_PI_2, &psi).unwrap();
        let back = apply_rotation(0, Axis::Y, -FRAC_PI_2, &there).unwrap();
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_matches_dense_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = StateVector::from_amplitudes(3, random_amplitudes(&mut rng, 3)).unwrap();
        for (axis, letter) in [(Axis::X, 'X'), (Axis::Y, 'Y'), (Axis::Z, 'Z')] {
            let theta = 0.731;
            let gen = embed_1q(3, 2, &pauli_2x2(letter));
            let u = expm_minus_i(&gen, theta / 2.0);
            let expected = psi.apply_matrix(&u).unwrap();
            let got = apply_rotation(2, axis, theta, &psi).unwrap();
            for (a, b) in got.amplitudes().iter().zip(expected.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
            let rho = psi.to_density();
            let got_rho = apply_rotation(2, axis, theta, &rho).unwrap();
            let exp_rho = rho.apply_matrix(&u).unwrap();
            assert!(dense_close(got_rho.matrix(), exp_rho.matrix(), 1e-12));
        }
    }

    #[test]
    fn bad_qubit_index() {
        let psi = StateVector::zero(2).unwrap();
        assert!(matches!(
            apply_rotation(2, Axis::X, 1.0, &psi),
            Err(Error::QubitIndex { .. })
        ));
    }

    #[test]
    fn all_up_is_zp_eigenstate() {
        let psi = StateVector::zero(4).unwrap();
        let zp = PauliString::parse("ZZZZ").unwrap();
        assert_eq!(expectation(&zp, &psi).unwrap(), 1.0);
        assert_eq!(expectation(&zp, &psi.to_density()).unwrap(), 1.0);
    }

    #[test]
    fn expectation_matches_dense_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let label = random_label(&mut rng, 4);
            let p = PauliString::parse(&label).unwrap();
            let psi = StateVector::from_amplitudes(4, random_amplitudes(&mut rng, 4)).unwrap();
            let rho = psi.to_density();
            let dense = (kron_labels(&label) * rho.matrix()).trace();
            assert!(dense.im.abs() < 1e-12);
            assert!((expectation(&p, &psi).unwrap() - dense.re).abs() < 1e-12);
            assert!((expectation(&p, &rho).unwrap() - dense.re).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_expectation_rejected() {
        let psi = StateVector::zero(1).unwrap();
        let p = PauliString::parse("Z").unwrap().with_phase(crate::kernel::Phase::I);
        assert!(matches!(psi.expectation(&p), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn swap_moves_excitation() {
        let psi = StateVector::from_bits("1000").unwrap();
        let out = psi.apply_swap(0, 3).unwrap();
        assert_eq!(out, StateVector::from_bits("0001").unwrap());
        let rho = psi.to_density().apply_swap(0, 3).unwrap();
        assert!((rho.matrix()[(1, 1)] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn fidelity_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = StateVector::from_amplitudes(4, random_amplitudes(&mut rng, 4)).unwrap();
        assert!((state_fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);

        let a = StateVector::from_bits("0000").unwrap();
        let b = StateVector::from_bits("1111").unwrap();
        assert_eq!(state_fidelity(&a, &b).unwrap(), 0.0);

        for eps in [0.0, 1e-5, 0.3, 1.0] {
            let rho = DensityMatrix::pseudo_pure(&psi, eps).unwrap();
            let expected = (1.0 - eps) / 16.0 + eps;
            assert!((state_fidelity(&psi, &rho).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(matches!(
            StateVector::from_amplitudes(1, vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::from_amplitudes(2, vec![c(1.0), c(0.0)]),
            Err(Error::AmplitudeLength { .. })
        ));
    }
}
