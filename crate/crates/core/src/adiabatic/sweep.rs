use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{QuantumState, StateVector};
use crate::wen::TorusLattice;

use super::{hamiltonian_derivative, interpolated_hamiltonian, trotter_step, Instant, Schedule, ScheduleKind};

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Index `l` of the propagator just applied, `0..=M`.
    pub step: usize,
    pub s: f64,
    pub ground_energy: f64,
    pub gap: f64,
    /// `‖P_g ψ‖`, the overlap with the instantaneous ground space.
    pub overlap: f64,
    /// `‖P_g ψ‖²`.
    pub population: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub schedule: Schedule,
    pub records: Vec<StepRecord>,
    pub final_state: StateVector,
}

impl SweepReport {
    /// Minimum ground-space overlap over the recorded steps.
    pub fn min_fidelity(&self) -> f64 {
        self.records.iter().map(|r| r.overlap).fold(f64::INFINITY, f64::min)
    }

    pub fn min_population(&self) -> f64 {
        self.records.iter().map(|r| r.population).fold(f64::INFINITY, f64::min)
    }

    pub fn final_fidelity(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.overlap)
    }

    pub fn final_population(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.population)
    }

    /// One row per propagator; all quantities dimensionless (ħ = 1).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,s,ground_energy,gap,overlap,population,epsilon\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.6},{:.12},{:.12},{:.12},{:.12},{:.12}",
                r.step, r.s, r.ground_energy, r.gap, r.overlap, r.population, r.epsilon
            );
        }
        out
    }
}

fn check_start(lat: &TorusLattice, psi0: &StateVector) -> Result<()> {
    if psi0.n_qubits() != lat.n_sites() {
        return Err(Error::SizeMismatch {
            left: lat.n_sites(),
            right: psi0.n_qubits(),
        });
    }
    Ok(())
}

fn sweep_with<F>(lat: &TorusLattice, schedule: &Schedule, psi0: &StateVector, mut step: F) -> Result<SweepReport>
where
    F: FnMut(f64, f64, &Instant, &StateVector) -> Result<StateVector>,
{
    check_start(lat, psi0)?;
    let dh = hamiltonian_derivative(lat)?.dense();
    let tau = schedule.tau();
    let mut psi = psi0.clone();
    let mut records = Vec::with_capacity(schedule.s_values().len());
    for (l, &s) in schedule.s_values().iter().enumerate() {
        let inst = Instant::new(&interpolated_hamiltonian(lat, s)?, &dh)?;
        psi = step(s, tau, &inst, &psi)?;
        let population = inst.ground_population(psi.amplitudes()).min(1.0);
        let ds_dt = schedule.ds_dt(l);
        records.push(StepRecord {
            step: l,
            s,
            ground_energy: inst.ground_energy(),
            gap: inst.gap(),
            overlap: population.sqrt(),
            population,
            epsilon: if ds_dt == 0.0 { 0.0 } else { inst.rate() * ds_dt },
        });
    }
    Ok(SweepReport {
        schedule: schedule.clone(),
        records,
        final_state: psi,
    })
}

/// Applies `exp(-i H(s_l) τ)` for every point of the schedule and tracks the
/// overlap with the instantaneous ground space after each step.
pub fn run_exact_sweep(lat: &TorusLattice, schedule: &Schedule, psi0: &StateVector) -> Result<SweepReport> {
    sweep_with(lat, schedule, psi0, |_, tau, inst, psi| inst.es.evolve(tau, psi))
}

/// Same bookkeeping with a caller-supplied propagator `step(s, τ, ψ)`.
pub fn run_sweep_with<F>(lat: &TorusLattice, schedule: &Schedule, psi0: &StateVector, mut step: F) -> Result<SweepReport>
where
    F: FnMut(f64, f64, &StateVector) -> Result<StateVector>,
{
    sweep_with(lat, schedule, psi0, |s, tau, _, psi| step(s, tau, psi))
}

/// Same bookkeeping as [`run_exact_sweep`] with each propagator replaced by
/// a symmetric Trotter step.
pub fn run_trotter_sweep(lat: &TorusLattice, schedule: &Schedule, psi0: &StateVector) -> Result<SweepReport> {
    sweep_with(lat, schedule, psi0, |s, tau, _, psi| trotter_step(lat, s, tau, psi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MScanRow {
    pub steps: usize,
    pub min_fidelity: f64,
    pub min_population: f64,
    pub final_fidelity: f64,
}

/// One exact sweep from `|0…0⟩` per step count, run in parallel.
pub fn min_fidelity_vs_steps(
    lat: &TorusLattice,
    total_time: f64,
    steps: &[usize],
    kind: ScheduleKind,
) -> Result<Vec<MScanRow>> {
    let psi0 = StateVector::zero(lat.n_sites())?;
    steps
        .par_iter()
        .map(|&m| {
            let schedule = Schedule::build(kind, lat, m, total_time)?;
            let rep = run_exact_sweep(lat, &schedule, &psi0)?;
            Ok(MScanRow {
                steps: m,
                min_fidelity: rep.min_fidelity(),
                min_population: rep.min_population(),
                final_fidelity: rep.final_fidelity(),
            })
        })
        .collect()
}

pub fn mscan_csv(rows: &[MScanRow]) -> String {
    let mut out = String::from("M,min_fidelity,min_population,final_fidelity\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.12},{:.12},{:.12}",
            r.steps, r.min_fidelity, r.min_population, r.final_fidelity
        );
    }
    out
}
