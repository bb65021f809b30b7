//! Classical simulation of adiabatic preparation, NMR pulse compilation and
//! tomography of the topological sectors of the Wen-plaquette model.

pub mod error;
pub mod kernel;
pub mod wen;
pub mod adiabatic;
pub mod nmr;
pub mod tomography;
pub mod pipeline;

pub use error::{Error, Result};
pub use kernel::{
    apply_pauli, apply_pauli_exponential, apply_rotation, entropy_bits, eigensystem,
    evolve_exact, expectation, partial_trace, state_fidelity, Axis, DensityMatrix,
    HamiltonianSpec, Pauli, PauliString, Phase, QuantumState, StateVector, C64,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
