//! Four-spin liquid-state NMR model: molecule parameters, pulse sequences,
//! compilation of the Trotter step and GRAPE waveform search.

mod compile;
mod grape;
mod molecule;
mod sequence;

pub use compile::{
    compile_trotter_step, compile_zp_exponential, solve_phase_corrections, trotter_target,
    wen_target, zp_factor_list, zp_target, zp_timing, PhaseSolution, ZpTiming, ANGLE_OFFSETS,
    ANGLE_SIGNS,
};
pub use molecule::{nmr_hamiltonian, MoleculeSpec};
pub use sequence::{
    delay_phases, sequence_unitary, simulate_sequence, unitary_equivalence, Event, PulseSequence,
};
pub use grape::{
    fidelity_and_gradient, optimize_waveform, waveform_unitary, ControlWaveform, GradientMode,
    GrapeOptions, GrapeResult, InitialControls,
};
