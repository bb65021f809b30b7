//! End-to-end run on the 2×2 torus: adiabatic preparation of the `(0,0)`
//! sector, string operators to reach the other three, tomography of each
//! and fidelities against the ideal sector states.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::adiabatic::{run_exact_sweep, run_sweep_with, Schedule, ScheduleKind, SweepReport};
use crate::error::{Error, Result};
use crate::kernel::{apply_pauli, Axis, DensityMatrix, QuantumState, StateVector};
use crate::nmr::{compile_trotter_step, simulate_sequence, Event, MoleculeSpec, PulseSequence};
use crate::tomography::{
    add_noise, default_plan, fidelity_table, reconstruct, setting_seed, simulate_plan, FidelityRow,
    MeasurementRecord, TomographyPlan,
};
use crate::wen::{build_lattice, string_operator, topological_sector, Flavor, StringPath, TorusLattice, SECTORS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Exact propagators, noiseless readout.
    Ideal,
    /// Compiled pulse sequences, noiseless readout.
    Pulse,
    /// Compiled pulse sequences with amplitude miscalibration and readout noise.
    Noisy,
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(RunMode::Ideal),
            "pulse" | "pulse-compiled" => Ok(RunMode::Pulse),
            "noisy" => Ok(RunMode::Noisy),
            _ => Err(Error::Config(format!("unknown mode '{s}' (ideal, pulse, noisy)"))),
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::Ideal => "ideal",
            RunMode::Pulse => "pulse",
            RunMode::Noisy => "noisy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialState {
    Pure,
    /// `(1-ε) I/16 + ε |0000⟩⟨0000|`; fidelities refer to the deviation part.
    PseudoPure { epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub schedule: ScheduleKind,
    pub steps: usize,
    pub total_time: f64,
    pub mode: RunMode,
    /// Readout noise, used in noisy mode.
    pub noise_sigma: f64,
    /// Standard deviation of the relative pulse-amplitude error, used in noisy mode.
    pub control_error: f64,
    pub psd_project: bool,
    pub init: InitialState,
    pub seed: u64,
    pub molecule: MoleculeSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            schedule: ScheduleKind::Linear,
            steps: crate::adiabatic::DEFAULT_STEPS,
            total_time: crate::adiabatic::DEFAULT_TOTAL_TIME,
            mode: RunMode::Ideal,
            noise_sigma: crate::tomography::DEFAULT_NOISE_SIGMA,
            control_error: 0.01,
            psd_project: true,
            init: InitialState::Pure,
            seed: 0,
            molecule: MoleculeSpec::synthetic_three_coupling(),
        }
    }
}

impl PipelineConfig {
    pub fn readout_sigma(&self) -> f64 {
        if self.mode == RunMode::Noisy {
            self.noise_sigma
        } else {
            0.0
        }
    }

    pub fn angle_sigma(&self) -> f64 {
        if self.mode == RunMode::Noisy {
            self.control_error
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub sweep: SweepReport,
    /// Pure states handed to tomography, sector order.
    pub prepared: Vec<StateVector>,
    pub records: Vec<Vec<MeasurementRecord>>,
    pub reconstructions: Vec<DensityMatrix>,
    pub fidelities: Vec<FidelityRow>,
    pub plan: TomographyPlan,
}

/// `T_x(γ1)^{ν1} T_x(γ2)^{ν2} |ψ⟩`.
pub fn apply_strings(lat: &TorusLattice, nu1: u8, nu2: u8, psi: &StateVector) -> Result<StateVector> {
    let mut out = psi.clone();
    if nu1 == 1 {
        out = apply_pauli(&string_operator(lat, &StringPath::gamma1(lat), Flavor::X)?, &out)?;
    }
    if nu2 == 1 {
        out = apply_pauli(&string_operator(lat, &StringPath::gamma2(lat), Flavor::X)?, &out)?;
    }
    Ok(out)
}

/// Scales every x/y rotation angle by `1 + delta`. z rotations are frame
/// updates and stay exact.
pub fn miscalibrate(seq: &PulseSequence, delta: f64) -> Result<PulseSequence> {
    let events = seq
        .events()
        .iter()
        .map(|e| match e {
            Event::Rotation { spins, axis, angle } if *axis != Axis::Z => Event::Rotation {
                spins: spins.clone(),
                axis: *axis,
                angle: angle * (1.0 + delta),
            },
            d => d.clone(),
        })
        .collect();
    PulseSequence::from_events(seq.n_spins(), events)
}

/// Pulse-amplitude miscalibration of one run, `δ ~ N(0, control_error)`,
/// shared by every x/y pulse of the sweep.
pub fn amplitude_error(cfg: &PipelineConfig) -> f64 {
    let sigma = cfg.angle_sigma();
    if sigma <= 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Normal::new(0.0, sigma).map_or(0.0, |n| n.sample(&mut rng))
}

fn prepare(lat: &TorusLattice, cfg: &PipelineConfig) -> Result<SweepReport> {
    let schedule = Schedule::build(cfg.schedule, lat, cfg.steps, cfg.total_time)?;
    let psi0 = StateVector::zero(lat.n_sites())?;
    match cfg.mode {
        RunMode::Ideal => run_exact_sweep(lat, &schedule, &psi0),
        RunMode::Pulse | RunMode::Noisy => {
            let delta = amplitude_error(cfg);
            run_sweep_with(lat, &schedule, &psi0, |s, tau, psi| {
                let seq = miscalibrate(&compile_trotter_step(&cfg.molecule, s, tau)?, delta)?;
                simulate_sequence(&cfg.molecule, &seq, psi)
            })
        }
    }
}

fn measure(cfg: &PipelineConfig, plan: &TomographyPlan, psi: &StateVector, seed: u64) -> Result<Vec<MeasurementRecord>> {
    let sigma = cfg.readout_sigma();
    match cfg.init {
        InitialState::Pure => simulate_plan(psi, plan, sigma, seed),
        InitialState::PseudoPure { epsilon } => {
            if !(epsilon > 0.0 && epsilon <= 1.0) {
                return Err(Error::OutOfRange {
                    name: "epsilon",
                    value: epsilon,
                    range: "(0, 1]",
                });
            }
            // observables are traceless: the signal is ε times the deviation
            let rho = DensityMatrix::pseudo_pure(psi, epsilon)?;
            let mut recs = simulate_plan(&rho, plan, 0.0, seed)?;
            for (i, r) in recs.iter_mut().enumerate() {
                r.values.iter_mut().for_each(|v| *v /= epsilon);
                add_noise(r, sigma, setting_seed(seed, i))?;
            }
            Ok(recs)
        }
    }
}

/// Readout seed for sector `k` of a run seeded with `base`.
pub fn sector_seed(base: u64, k: usize) -> u64 {
    base.wrapping_add(1 + k as u64 * 1_000_003)
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport> {
    let lat = build_lattice(2).map_err(|e| e.in_stage("lattice"))?;
    let sweep = prepare(&lat, cfg).map_err(|e| e.in_stage("sweep"))?;
    let prepared = SECTORS
        .iter()
        .map(|&(a, b)| apply_strings(&lat, a, b, &sweep.final_state))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("strings"))?;
    let plan = default_plan();
    let mut records = Vec::with_capacity(4);
    let mut reconstructions = Vec::with_capacity(4);
    for (k, psi) in prepared.iter().enumerate() {
        let seed = sector_seed(cfg.seed, k);
        let recs = measure(cfg, &plan, psi, seed).map_err(|e| e.in_stage("readout"))?;
        let rho = reconstruct(&recs, &plan, cfg.psd_project).map_err(|e| e.in_stage("tomography"))?;
        records.push(recs);
        reconstructions.push(rho);
    }
    let ideals = SECTORS
        .iter()
        .map(|&(a, b)| topological_sector(&lat, a, b))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("fidelity"))?;
    let fidelities = fidelity_table(&reconstructions, &ideals).map_err(|e| e.in_stage("fidelity"))?;
    Ok(PipelineReport {
        sweep,
        prepared,
        records,
        reconstructions,
        fidelities,
        plan,
    })
}

/// Mean reconstruction fidelity per sector over `seeds` noisy readouts of
/// the ideal sector states.
pub fn noise_band(sigma: f64, seeds: u64, psd_project: bool) -> Result<[f64; 4]> {
    use rayon::prelude::*;
    let lat = build_lattice(2)?;
    let plan = default_plan();
    let mut out = [0.0; 4];
    for (k, &(a, b)) in SECTORS.iter().enumerate() {
        let psi = topological_sector(&lat, a, b)?;
        let total: f64 = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let recs = simulate_plan(&psi, &plan, sigma, seed.wrapping_mul(4).wrapping_add(k as u64))?;
                let rho = reconstruct(&recs, &plan, psd_project)?;
                rho.fidelity_with_pure(&psi)
            })
            .collect::<Result<Vec<f64>>>()?
            .iter()
            .sum();
        out[k] = total / seeds as f64;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strings_reach_every_sector() {
        let lat = build_lattice(2).unwrap();
        let base = topological_sector(&lat, 0, 0).unwrap();
        for (a, b) in SECTORS {
            let got = apply_strings(&lat, a, b, &base).unwrap();
            let want = topological_sector(&lat, a, b).unwrap();
            assert!((want.inner(&got).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ideal_pipeline() {
        let rep = run_pipeline(&PipelineConfig::default()).unwrap();
        assert_eq!(rep.fidelities.len(), 4);
        for r in &rep.fidelities {
            assert!(r.fidelity >= 0.98, "{r:?}");
        }
    }

    #[test]
    fn pulse_mode_tracks_trotter_sweep() {
        let cfg = PipelineConfig {
            mode: RunMode::Pulse,
            ..PipelineConfig::default()
        };
        let rep = run_pipeline(&cfg).unwrap();
        let lat = build_lattice(2).unwrap();
        let sched = Schedule::linear(cfg.steps, cfg.total_time).unwrap();
        let trot = crate::adiabatic::run_trotter_sweep(&lat, &sched, &StateVector::zero(4).unwrap()).unwrap();
        for (a, b) in rep.sweep.records.iter().zip(&trot.records) {
            assert!((a.population - b.population).abs() < 1e-6);
        }
    }

    #[test]
    fn pseudo_pure_matches_pure_when_noiseless() {
        let base = run_pipeline(&PipelineConfig::default()).unwrap();
        let pps = run_pipeline(&PipelineConfig {
            init: InitialState::PseudoPure { epsilon: 0.2 },
            ..PipelineConfig::default()
        })
        .unwrap();
        for (a, b) in base.fidelities.iter().zip(&pps.fidelities) {
            assert!((a.fidelity - b.fidelity).abs() < 1e-9);
        }
    }

    #[test]
    fn noisy_mode_is_deterministic() {
        let cfg = PipelineConfig {
            mode: RunMode::Noisy,
            seed: 17,
            ..PipelineConfig::default()
        };
        let a = run_pipeline(&cfg).unwrap();
        let b = run_pipeline(&cfg).unwrap();
        assert_eq!(a.fidelities, b.fidelities);
        assert!(a.fidelities.iter().all(|r| r.fidelity < 0.999));
    }
}
