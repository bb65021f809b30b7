//! Shared fixtures for the criterion benches.

use std::f64::consts::FRAC_PI_2;

use toposim_core::kernel::linalg::hermitian_exp;
use toposim_core::nmr::{ControlWaveform, MoleculeSpec};
use toposim_core::wen::{build_lattice, topological_sector, TorusLattice};
use toposim_core::{HamiltonianSpec, Pauli, PauliString, StateVector, C64};

pub fn lattice(side: usize) -> TorusLattice {
    build_lattice(side).expect("even side")
}

pub fn sector(side: usize, nu1: u8, nu2: u8) -> StateVector {
    topological_sector(&lattice(side), nu1, nu2).expect("valid sector")
}

/// Deterministic dense state with no zero amplitudes.
pub fn spread_state(n: usize) -> StateVector {
    let amps = (0..1usize << n)
        .map(|i| C64::new(1.0 + (i % 7) as f64, (i % 5) as f64 - 2.0))
        .collect();
    StateVector::normalized(n, amps).expect("nonzero")
}

pub fn molecule() -> MoleculeSpec {
    MoleculeSpec::synthetic_three_coupling()
}

/// `Π_j R^y_j(π/2)` on four spins.
pub fn ry_all_target() -> nalgebra::DMatrix<C64> {
    let mut h = HamiltonianSpec::zero(4).expect("4 qubits");
    for j in 0..4 {
        h.add_term(0.5, PauliString::single(4, j, Pauli::Y).expect("in range"))
            .expect("same size");
    }
    hermitian_exp(&h.dense(), FRAC_PI_2)
}

/// 100 slices over 1 ms with a fixed smooth pattern.
pub fn waveform() -> ControlWaveform {
    let mut wf = ControlWaveform::zeros(4, 100, 1e-5);
    for (k, row) in wf.amplitudes.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = 2e4 * ((k * 3 + j) as f64 * 0.37).sin();
        }
    }
    wf
}
