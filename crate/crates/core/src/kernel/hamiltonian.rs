use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::pauli::{PauliString, Phase};
use crate::kernel::state::{QuantumState, StateVector};
use crate::kernel::C64;

/// A real-weighted sum of Hermitian Pauli strings.
///
/// Terms are kept canonical: every stored string has phase `+1` (a `-1`
/// phase is folded into the coefficient), no two terms share the same
/// masks, and zero coefficients are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl HamiltonianSpec {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        PauliString::identity(n_qubits)?;
        Ok(HamiltonianSpec {
            n_qubits,
            terms: Vec::new(),
        })
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut h = Self::zero(n_qubits)?;
        for (c, p) in terms {
            h.add_term(c, p)?;
        }
        Ok(h)
    }

    /// Adds `coeff · p`, merging with an existing term on the same operator.
    pub fn add_term(&mut self, coeff: f64, p: PauliString) -> Result<()> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        let sign = p.phase().sign().ok_or(Error::NonHermitian(p.phase()))?;
        let coeff = coeff * sign;
        let p = p.with_phase(Phase::ONE);
        match self.terms.iter().position(|(_, q)| *q == p) {
            Some(i) => {
                self.terms[i].0 += coeff;
                if self.terms[i].0 == 0.0 {
                    self.terms.remove(i);
                }
            }
            None if coeff != 0.0 => self.terms.push((coeff, p)),
            None => {}
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn coefficient(&self, p: &PauliString) -> f64 {
        let sign = p.phase().sign().unwrap_or(0.0);
        let key = p.with_phase(Phase::ONE);
        self.terms
            .iter()
            .find(|(_, q)| *q == key)
            .map_or(0.0, |(c, _)| c * sign)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self {
            n_qubits: self.n_qubits,
            terms: Vec::with_capacity(self.terms.len()),
        };
        for (c, p) in &self.terms {
            // cannot fail: same size, phase +1
            let _ = out.add_term(c * factor, p.clone());
        }
        out
    }

    pub fn plus(&self, other: &HamiltonianSpec) -> Result<Self> {
        let mut out = self.clone();
        for (c, p) in &other.terms {
            out.add_term(*c, p.clone())?;
        }
        Ok(out)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.x_mask() == 0)
    }

    /// Diagonal of a Z-only Hamiltonian, indexed by basis state.
    pub fn diagonal(&self) -> Option<Vec<f64>> {
        if !self.is_diagonal() {
            return None;
        }
        let dim = 1usize << self.n_qubits;
        Some(
            (0..dim)
                .map(|b| {
                    self.terms
                        .iter()
                        .map(|(c, p)| c * p.act_on_basis(b).1.re)
                        .sum()
                })
                .collect(),
        )
    }

    pub fn dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, p) in &self.terms {
            for col in 0..dim {
                let (row, v) = p.act_on_basis(col);
                m[(row, col)] += v * *c;
            }
        }
        m
    }

    /// `H|ψ⟩` term by term.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: psi.n_qubits(),
            });
        }
        let amps = psi.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for (c, p) in &self.terms {
            for (b, a) in amps.iter().enumerate() {
                let (t, v) = p.act_on_basis(b);
                out[t] += v * a * *c;
            }
        }
        Ok(StateVector::from_raw(self.n_qubits, out))
    }
}
