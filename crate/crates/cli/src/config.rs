//! Run configuration: a TOML file with every key optional, then CLI flags on top.
//!
//! ```toml
//! lattice = 2
//! schedule = "linear"        # or "local-adiabatic"
//! steps = 7
//! total_time = 2.9982
//! mode = "ideal"             # ideal | pulse | noisy
//! noise = 0.015              # readout sigma
//! control_error = 0.01       # pulse amplitude sigma, noisy mode
//! seed = 0
//! threshold = 0.99           # sweep: minimum F_min for exit 0
//! scan_max_steps = 30
//! psd_project = true
//! molecule = "molecule.toml" # relative to this file
//! plan = "plan.txt"
//! init = { kind = "pseudo-pure", epsilon = 1e-4 }
//! compile_s = 0.5
//! compile_tau = 0.1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toposim_core::adiabatic::{ScheduleKind, DEFAULT_STEPS, DEFAULT_TOTAL_TIME};
use toposim_core::nmr::MoleculeSpec;
use toposim_core::pipeline::{InitialState, RunMode};
use toposim_core::tomography::{default_plan, TomographyPlan, DEFAULT_NOISE_SIGMA};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: usize,
    pub schedule: ScheduleKind,
    pub steps: usize,
    pub total_time: f64,
    pub mode: RunMode,
    pub noise: f64,
    pub control_error: f64,
    pub seed: u64,
    pub threshold: f64,
    pub scan_max_steps: usize,
    pub psd_project: bool,
    pub init: InitialState,
    pub compile_s: f64,
    pub compile_tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub molecule: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PathBuf>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lattice: 2,
            schedule: ScheduleKind::Linear,
            steps: DEFAULT_STEPS,
            total_time: DEFAULT_TOTAL_TIME,
            mode: RunMode::Ideal,
            noise: DEFAULT_NOISE_SIGMA,
            control_error: 0.01,
            seed: 0,
            threshold: 0.99,
            scan_max_steps: 30,
            psd_project: true,
            init: InitialState::Pure,
            compile_s: 0.5,
            compile_tau: 0.1,
            molecule: None,
            plan: None,
            out: PathBuf::from("toposim-out"),
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

impl RunConfig {
    /// Parses a config file; relative molecule and plan paths resolve against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read(path)?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.molecule, &mut cfg.plan].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Invalid(msg));
        if self.lattice < 2 || !self.lattice.is_multiple_of(2) {
            return bad(format!("lattice must be even and >= 2, got {}", self.lattice));
        }
        if self.steps == 0 || self.scan_max_steps == 0 {
            return bad("steps and scan_max_steps must be >= 1".into());
        }
        if self.schedule == ScheduleKind::Explicit {
            return bad("schedule must be linear or local-adiabatic".into());
        }
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return bad(format!("total_time must be positive, got {}", self.total_time));
        }
        for (name, v) in [("noise", self.noise), ("control_error", self.control_error)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad(format!("threshold must lie in [0, 1], got {}", self.threshold));
        }
        if !(0.0..=1.0).contains(&self.compile_s) || !(self.compile_tau.is_finite() && self.compile_tau >= 0.0) {
            return bad(format!(
                "compile point needs s in [0, 1] and tau >= 0, got s={} tau={}",
                self.compile_s, self.compile_tau
            ));
        }
        if let InitialState::PseudoPure { epsilon } = self.init {
            if !(epsilon > 0.0 && epsilon <= 1.0) {
                return bad(format!("init epsilon must lie in (0, 1], got {epsilon}"));
            }
        }
        Ok(())
    }

    /// Commands that read out four spins only run on the 2×2 torus.
    pub fn require_small_lattice(&self, command: &str) -> CliResult<()> {
        if self.lattice != 2 {
            return Err(CliError::Invalid(format!(
                "{command} runs on the 2x2 lattice only, got lattice = {}",
                self.lattice
            )));
        }
        Ok(())
    }

    pub fn molecule(&self) -> CliResult<MoleculeSpec> {
        match &self.molecule {
            None => Ok(MoleculeSpec::synthetic_three_coupling()),
            Some(p) => MoleculeSpec::from_toml(&read(p)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display()))),
        }
    }

    pub fn plan(&self) -> CliResult<TomographyPlan> {
        match &self.plan {
            None => Ok(default_plan()),
            Some(p) => TomographyPlan::parse(&read(p)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display()))),
        }
    }
}
