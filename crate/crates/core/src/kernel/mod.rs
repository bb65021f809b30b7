//! Pauli algebra, register states and dense linear algebra.

mod apply;
mod hamiltonian;
pub mod linalg;
mod pauli;
mod state;

#[cfg(test)]
pub(crate) mod testing;

pub type C64 = num_complex::Complex64;

pub use apply::{apply_pauli, apply_pauli_exponential};
pub use hamiltonian::HamiltonianSpec;
pub use linalg::{
    entropy_bits, eigensystem, eigensystem_with_cap, evolve_exact, hermitian_eigen,
    hermitian_exp, partial_trace, propagator, Eigensystem, DEFAULT_DENSE_CAP,
};
pub use pauli::{Pauli, PauliString, Phase, MAX_PAULI_QUBITS};
pub use state::{
    apply_rotation, expectation, rotation_gate, state_fidelity, Axis, DensityMatrix, Gate1,
    QuantumState, StateVector, MAX_DENSITY_QUBITS, MAX_STATE_QUBITS,
};
