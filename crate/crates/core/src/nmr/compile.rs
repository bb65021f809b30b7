//! Delay/rotation compilation of the four-body `Z_p` exponential and of a
//! full Trotter step on a four-spin molecule.
//!
//! The `Z_p` block is built from three refocused two-spin evolutions
//! (couplings J34, J12, J13) wrapped by basis-changing pulses. The factor
//! list below is written in operator order, leftmost acting last; the
//! compiled sequence stores it reversed (time order) and starts with a
//! `R_2^x(π)` frame pulse. Without that pulse the factor list leaves spin 2
//! with an odd number of π rotations, producing `e^{+iαZ_p}` times a Pauli
//! frame instead of `e^{-iαZ_p}`. With the frame pulse, three z corrections
//! cancel the chemical-shift evolution:
//!
//! - `θ1 = -ω1/J34 + π`
//! - `θ2 = +4 ω2 sτ / (π J13)`
//! - `θ3 = ω4/J12 + 4 ω4 sτ / (π J13) + π`
//!
//! [`solve_phase_corrections`] recovers the same choice numerically.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{hermitian_exp, Axis, HamiltonianSpec, PauliString, C64};
use crate::wen::{build_lattice, build_wen_hamiltonian};

use super::sequence::{sequence_unitary, unitary_equivalence, Event, PulseSequence};
use super::MoleculeSpec;

/// Delays (seconds) and z-correction angles of one `Z_p` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZpTiming {
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    /// `θ1, θ2, θ3` from the closed-form expressions without frame correction.
    pub nominal: [f64; 3],
    /// Angles actually emitted.
    pub applied: [f64; 3],
}

/// Sign and offset applied to each nominal angle: `applied = sign·nominal + offset`.
pub const ANGLE_SIGNS: [f64; 3] = [1.0, -1.0, 1.0];
pub const ANGLE_OFFSETS: [f64; 3] = [PI, 0.0, PI];

fn required_coupling(mol: &MoleculeSpec, a: usize, b: usize, name: &'static str) -> Result<f64> {
    let j = mol.j(a, b);
    if j == 0.0 {
        return Err(Error::MissingCoupling(name));
    }
    Ok(j)
}

fn check_inputs(mol: &MoleculeSpec, s: f64, tau: f64) -> Result<()> {
    mol.validate()?;
    if mol.n_spins() != 4 {
        return Err(Error::InvalidMolecule(format!(
            "Z_p compilation needs 4 spins, molecule has {}",
            mol.n_spins()
        )));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: ">= 0",
        });
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::OutOfRange {
            name: "tau",
            value: tau,
            range: ">= 0",
        });
    }
    Ok(())
}

pub fn zp_timing(mol: &MoleculeSpec, s: f64, tau: f64) -> Result<ZpTiming> {
    check_inputs(mol, s, tau)?;
    let j12 = required_coupling(mol, 0, 1, "J12")?;
    let j13 = required_coupling(mol, 0, 2, "J13")?;
    let j34 = required_coupling(mol, 2, 3, "J34")?;
    let (w1, w2, w4) = (mol.omega(0), mol.omega(1), mol.omega(3));
    let nominal = [
        -w1 / j34,
        -4.0 * w2 * s * tau / (PI * j13),
        w4 / j12 + 4.0 * w4 * s * tau / (PI * j13),
    ];
    let applied = std::array::from_fn(|k| ANGLE_SIGNS[k] * nominal[k] + ANGLE_OFFSETS[k]);
    Ok(ZpTiming {
        tau1: 1.0 / (4.0 * j34),
        tau2: 1.0 / (4.0 * j12),
        tau3: 2.0 * s * tau / (PI * j13),
        nominal,
        applied,
    })
}

/// The 27 factors in operator order (leftmost acts last), 0-based spins.
pub fn zp_factor_list(t: &ZpTiming, angles: [f64; 3]) -> Vec<Event> {
    use Axis::{X, Y, Z};
    let r = Event::rot;
    let d = Event::delay;
    vec![
        r(&[0], Z, angles[0]),
        r(&[1], Z, angles[1]),
        r(&[3], Z, angles[2]),
        r(&[2], Y, FRAC_PI_2),
        d(t.tau1),
        r(&[2, 3], Y, PI),
        d(t.tau1),
        r(&[0], Y, -FRAC_PI_2),
        r(&[2], X, -FRAC_PI_2),
        d(t.tau2),
        r(&[0, 1], Y, PI),
        d(t.tau2),
        r(&[0], X, FRAC_PI_2),
        d(t.tau3),
        r(&[0, 2], X, PI),
        d(t.tau3),
        r(&[0], X, FRAC_PI_2),
        d(t.tau2),
        r(&[0, 1], Y, PI),
        d(t.tau2),
        r(&[0], Y, -FRAC_PI_2),
        r(&[2], X, FRAC_PI_2),
        r(&[1], Y, PI),
        d(t.tau1),
        r(&[2, 3], X, PI),
        d(t.tau1),
        r(&[2], Y, FRAC_PI_2),
    ]
}

fn zp_sequence_with(t: &ZpTiming, angles: [f64; 3]) -> Result<PulseSequence> {
    let mut events = vec![Event::rot(&[1], Axis::X, PI)];
    events.extend(zp_factor_list(t, angles).into_iter().rev());
    PulseSequence::from_events(4, events)
}

/// Time-ordered sequence realizing `exp(-i·2sτ·Z_p)` up to global phase.
pub fn compile_zp_exponential(mol: &MoleculeSpec, s: f64, tau: f64) -> Result<PulseSequence> {
    let t = zp_timing(mol, s, tau)?;
    zp_sequence_with(&t, t.applied)
}

pub fn zp_target(s: f64, tau: f64) -> DMatrix<C64> {
    let zp = PauliString::parse("ZZZZ").expect("valid label");
    let h = HamiltonianSpec::from_terms(4, [(2.0 * s, zp)]).expect("valid term");
    hermitian_exp(&h.dense(), tau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSolution {
    pub signs: [f64; 3],
    pub offsets: [f64; 3],
    pub fidelity: f64,
}

impl PhaseSolution {
    pub fn matches_closed_form(&self) -> bool {
        self.signs == ANGLE_SIGNS && self.offsets == ANGLE_OFFSETS
    }
}

/// Searches every sign flip and 0/π offset of the three nominal angles and
/// returns the combination with the highest equivalence to the target.
/// Ties (within 1e-9) keep the first combination in search order, which
/// puts positive signs and zero offsets first.
pub fn solve_phase_corrections(mol: &MoleculeSpec, s: f64, tau: f64) -> Result<PhaseSolution> {
    let t = zp_timing(mol, s, tau)?;
    let target = zp_target(s, tau);
    let mut best: Option<PhaseSolution> = None;
    for code in 0..64u32 {
        let signs: [f64; 3] = std::array::from_fn(|k| if code >> k & 1 == 0 { 1.0 } else { -1.0 });
        let offsets: [f64; 3] = std::array::from_fn(|k| if code >> (k + 3) & 1 == 0 { 0.0 } else { PI });
        let angles = std::array::from_fn(|k| signs[k] * t.nominal[k] + offsets[k]);
        let u = sequence_unitary(mol, &zp_sequence_with(&t, angles)?)?;
        let fidelity = unitary_equivalence(&u, &target)?;
        if best.is_none_or(|b| fidelity > b.fidelity + 1e-9) {
            best = Some(PhaseSolution {
                signs,
                offsets,
                fidelity,
            });
        }
    }
    Ok(best.expect("64 candidates searched"))
}

/// One Trotter step of the 2×2 interpolated Hamiltonian:
/// z half-steps `R^z(-(1-s)τ)` on every spin around the Wen block
/// `e^{+i2sτZ_p}`, `Π R^y(-π/2)`, `e^{+i2sτZ_p}`, `Π R^y(π/2)` (time order).
/// Each `e^{+i2sτZ_p}` is the compiled `Z_p` block conjugated by `R_1^x(π)`.
/// At `s = 0` the Wen block is left out.
pub fn compile_trotter_step(mol: &MoleculeSpec, s: f64, tau: f64) -> Result<PulseSequence> {
    check_inputs(mol, s, tau)?;
    if s > 1.0 {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "[0, 1]",
        });
    }
    let all = [0, 1, 2, 3];
    let half = Event::rot(&all, Axis::Z, -(1.0 - s) * tau);
    let mut seq = PulseSequence::new(4);
    seq.push(half.clone())?;
    if s > 0.0 {
        let zp = compile_zp_exponential(mol, s, tau)?;
        let flip = Event::rot(&[0], Axis::X, PI);
        let mut positive = PulseSequence::new(4);
        positive.push(flip.clone())?;
        positive.extend(&zp)?;
        positive.push(flip)?;
        seq.extend(&positive)?;
        seq.push(Event::rot(&all, Axis::Y, -FRAC_PI_2))?;
        seq.extend(&positive)?;
        seq.push(Event::rot(&all, Axis::Y, FRAC_PI_2))?;
    }
    seq.push(half)?;
    Ok(seq)
}

/// `exp(-i H(s) τ)` for the 2×2 lattice.
pub fn trotter_target(s: f64, tau: f64) -> Result<DMatrix<C64>> {
    let lat = build_lattice(2)?;
    let h = crate::adiabatic::interpolated_hamiltonian(&lat, s)?;
    Ok(hermitian_exp(&h.dense(), tau))
}

/// `exp(-i H_Wen τ)` for the 2×2 lattice.
pub fn wen_target(tau: f64) -> DMatrix<C64> {
    let lat = build_lattice(2).expect("N=2 is valid");
    hermitian_exp(&build_wen_hamiltonian(&lat).dense(), tau)
}
