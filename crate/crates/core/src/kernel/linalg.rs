//! Dense eigensystems, exact propagation, partial traces and entropy.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kernel::hamiltonian::HamiltonianSpec;
use crate::kernel::state::{DensityMatrix, QuantumState, StateVector, MAX_DENSITY_QUBITS};
use crate::kernel::C64;

/// Default qubit limit for anything that diagonalizes a dense Hamiltonian.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Column `k` of the returned matrix is the eigenvector of value `k`.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `exp(-i t M)` for a dense Hermitian `M`.
pub fn hermitian_exp(m: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(m);
    phases_to_unitary(&values, &vectors, t)
}

fn phases_to_unitary(values: &[f64], vectors: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let mut scaled = vectors.clone();
    for (k, lambda) in values.iter().enumerate() {
        let ph = C64::from_polar(1.0, -lambda * t);
        for r in 0..scaled.nrows() {
            scaled[(r, k)] *= ph;
        }
    }
    scaled * vectors.adjoint()
}

#[derive(Debug, Clone)]
pub struct Eigensystem {
    n_qubits: usize,
    values: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Eigensystem {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvectors as matrix columns, same order as [`Eigensystem::values`].
    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn state(&self, k: usize) -> StateVector {
        StateVector::from_raw(self.n_qubits, self.vectors.column(k).iter().copied().collect())
    }

    pub fn states(&self) -> Vec<StateVector> {
        (0..self.values.len()).map(|k| self.state(k)).collect()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (k, lambda) in self.values.iter().enumerate() {
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= *lambda;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-iHt)` as a dense matrix.
    pub fn propagator(&self, t: f64) -> DMatrix<C64> {
        phases_to_unitary(&self.values, &self.vectors, t)
    }

    pub fn evolve(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: psi.n_qubits(),
            });
        }
        let col = psi.to_column();
        let mut coeffs = self.vectors.adjoint() * col;
        for (k, lambda) in self.values.iter().enumerate() {
            coeffs[k] *= C64::from_polar(1.0, -lambda * t);
        }
        StateVector::from_column(self.n_qubits, &(&self.vectors * coeffs))
    }

    /// Distinct eigenvalues (within `tol`) with their multiplicities.
    pub fn levels(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((first, count)) if (v - *first).abs() <= tol => *count += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

pub fn eigensystem(h: &HamiltonianSpec) -> Result<Eigensystem> {
    eigensystem_with_cap(h, DEFAULT_DENSE_CAP)
}

pub fn eigensystem_with_cap(h: &HamiltonianSpec, cap: usize) -> Result<Eigensystem> {
    check_cap(h.n_qubits(), cap)?;
    let (values, vectors) = hermitian_eigen(&h.dense());
    Ok(Eigensystem {
        n_qubits: h.n_qubits(),
        values,
        vectors,
    })
}

fn check_cap(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits > cap {
        return Err(Error::DenseCap { n_qubits, cap });
    }
    Ok(())
}

/// `exp(-iHt)` as a dense matrix.
pub fn propagator(h: &HamiltonianSpec, t: f64) -> Result<DMatrix<C64>> {
    Ok(eigensystem(h)?.propagator(t))
}

/// `exp(-iHt)|ψ⟩` through the eigensystem of `H`.
pub fn evolve_exact(h: &HamiltonianSpec, t: f64, psi: &StateVector) -> Result<StateVector> {
    if psi.n_qubits() != h.n_qubits() {
        return Err(Error::SizeMismatch {
            left: h.n_qubits(),
            right: psi.n_qubits(),
        });
    }
    eigensystem(h)?.evolve(t, psi)
}

fn validate_keep(keep: &[usize], n_qubits: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidSubset("keep set is empty".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::InvalidSubset(format!("repeated qubit in {keep:?}")));
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= n_qubits) {
        return Err(Error::InvalidSubset(format!(
            "qubit {q} out of range for {n_qubits} qubits"
        )));
    }
    if sorted.len() > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            what: "reduced density matrix",
            n_qubits: sorted.len(),
            max: MAX_DENSITY_QUBITS,
        });
    }
    Ok(sorted)
}

/// Maps (kept index, traced index) pairs to a full basis index.
struct Split {
    keep_bits: Vec<usize>,
    trace_bits: Vec<usize>,
}

impl Split {
    fn new(n_qubits: usize, keep: &[usize]) -> Split {
        let bit = |q: usize| 1usize << (n_qubits - 1 - q);
        let keep_bits = keep.iter().map(|&q| bit(q)).collect();
        let trace_bits = (0..n_qubits)
            .filter(|q| !keep.contains(q))
            .map(bit)
            .collect();
        Split {
            keep_bits,
            trace_bits,
        }
    }

    fn spread(bits: &[usize], index: usize) -> usize {
        let k = bits.len();
        bits.iter()
            .enumerate()
            .filter(|(j, _)| index >> (k - 1 - j) & 1 == 1)
            .fold(0, |acc, (_, b)| acc | b)
    }

    fn full(&self, a: usize, t: usize) -> usize {
        Self::spread(&self.keep_bits, a) | Self::spread(&self.trace_bits, t)
    }
}

/// Reduced state of a pure register; kept qubits are renumbered in
/// ascending order.
pub(crate) fn partial_trace_pure(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = validate_keep(keep, psi.n_qubits())?;
    let split = Split::new(psi.n_qubits(), &keep);
    let dim_a = 1usize << keep.len();
    let dim_t = 1usize << (psi.n_qubits() - keep.len());
    // psi as a dim_a × dim_t matrix, then ρ = M M†
    let amps = psi.amplitudes();
    let m = DMatrix::from_fn(dim_a, dim_t, |a, t| amps[split.full(a, t)]);
    Ok(DensityMatrix::from_raw(keep.len(), &m * m.adjoint()))
}

pub(crate) fn partial_trace_mixed(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = validate_keep(keep, rho.n_qubits())?;
    let split = Split::new(rho.n_qubits(), &keep);
    let dim_a = 1usize << keep.len();
    let dim_t = 1usize << (rho.n_qubits() - keep.len());
    let m = rho.matrix();
    let out = DMatrix::from_fn(dim_a, dim_a, |a, b| {
        (0..dim_t)
            .map(|t| m[(split.full(a, t), split.full(b, t))])
            .sum()
    });
    Ok(DensityMatrix::from_raw(keep.len(), out))
}

pub fn partial_trace<S: QuantumState>(state: &S, keep: &[usize]) -> Result<DensityMatrix> {
    state.partial_trace(keep)
}

/// Eigenvalues at or below this contribute nothing to the entropy; this
/// also absorbs small negative eigenvalues left by reconstruction round-off.
pub const ENTROPY_CLIP: f64 = 1e-15;

/// Von Neumann entropy in bits.
pub fn entropy_bits(rho: &DensityMatrix) -> f64 {
    let s: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&p| p > ENTROPY_CLIP)
        .map(|p| -p * p.log2())
        .sum();
    s.max(0.0)
}
