//! Interpolation from the polarizing field `H0 = -Σ σz` to the Wen model.

mod schedule;
mod sweep;
mod trotter;

use nalgebra::DMatrix;

pub use schedule::{Schedule, ScheduleKind};
pub use sweep::{
    min_fidelity_vs_steps, mscan_csv, run_exact_sweep, run_sweep_with, run_trotter_sweep, MScanRow, StepRecord,
    SweepReport,
};
pub use trotter::{trotter_step, wen_step_unitary};

use crate::error::{Error, Result};
use crate::kernel::{eigensystem, hermitian_eigen, Eigensystem, HamiltonianSpec, Pauli, PauliString, C64};
use crate::wen::{all_sectors, build_wen_hamiltonian, TorusLattice};

/// Default total sweep time.
pub const DEFAULT_TOTAL_TIME: f64 = 2.9982;
/// Default number of scan steps.
pub const DEFAULT_STEPS: usize = 7;

/// Eigenvalues closer than this are treated as one level.
pub const LEVEL_TOL: f64 = 1e-9;
/// Couplings below this are treated as forbidden transitions.
pub const COUPLING_TOL: f64 = 1e-12;

/// `-Σ_j σ_j^z`.
pub fn h0(n_qubits: usize) -> Result<HamiltonianSpec> {
    let mut h = HamiltonianSpec::zero(n_qubits)?;
    for q in 0..n_qubits {
        h.add_term(-1.0, PauliString::single(n_qubits, q, Pauli::Z)?)?;
    }
    Ok(h)
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `(1-s) H0 + s H_Wen`.
pub fn interpolated_hamiltonian(lat: &TorusLattice, s: f64) -> Result<HamiltonianSpec> {
    check_s(s)?;
    h0(lat.n_sites())?
        .scaled(1.0 - s)
        .plus(&build_wen_hamiltonian(lat).scaled(s))
}

/// `∂H/∂s = H_Wen - H0`.
pub fn hamiltonian_derivative(lat: &TorusLattice) -> Result<HamiltonianSpec> {
    build_wen_hamiltonian(lat).plus(&h0(lat.n_sites())?.scaled(-1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub s: f64,
    pub levels: Vec<f64>,
}

/// Full spectrum at `samples` evenly spaced values of `s`.
pub fn spectrum_curve(lat: &TorusLattice, samples: usize) -> Result<Vec<SpectrumPoint>> {
    if samples < 2 {
        return Err(Error::OutOfRange {
            name: "samples",
            value: samples as f64,
            range: ">= 2",
        });
    }
    (0..samples)
        .map(|k| {
            let s = k as f64 / (samples - 1) as f64;
            let es = eigensystem(&interpolated_hamiltonian(lat, s)?)?;
            Ok(SpectrumPoint {
                s,
                levels: es.values().to_vec(),
            })
        })
        .collect()
}

/// CSV with one row per sample: `s,E0,E1,…`.
pub fn spectrum_csv(curve: &[SpectrumPoint]) -> String {
    let width = curve.first().map_or(0, |p| p.levels.len());
    let mut out = String::from("s");
    for k in 0..width {
        out.push_str(&format!(",E{k}"));
    }
    out.push('\n');
    for p in curve {
        out.push_str(&format!("{:.6}", p.s));
        for e in &p.levels {
            out.push_str(&format!(",{e:.12}"));
        }
        out.push('\n');
    }
    out
}

/// Ground level and the coupling of each excited level to it.
pub(crate) struct Instant {
    pub es: Eigensystem,
    pub ground_dim: usize,
    /// `(energy, ‖⟨e|∂H/∂s|g⟩‖)` per excited level, ascending.
    pub excited: Vec<(f64, f64)>,
}

impl Instant {
    pub fn new(h: &HamiltonianSpec, dh: &DMatrix<C64>) -> Result<Instant> {
        let es = eigensystem(h)?;
        let levels = es.levels(LEVEL_TOL);
        let ground_dim = levels[0].1;
        let v = es.vectors();
        let ground = v.columns(0, ground_dim);
        let dh_g = dh * ground;
        let mut excited = Vec::with_capacity(levels.len() - 1);
        let mut start = ground_dim;
        for &(energy, mult) in &levels[1..] {
            let block = v.columns(start, mult).adjoint() * &dh_g;
            excited.push((energy, spectral_norm(&block)));
            start += mult;
        }
        Ok(Instant {
            es,
            ground_dim,
            excited,
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.es.values()[0]
    }

    /// Gap to the lowest excited level that couples to the ground level,
    /// or to the lowest excited level when none does.
    pub fn gap(&self) -> f64 {
        let e0 = self.ground_energy();
        self.excited
            .iter()
            .find(|(_, c)| *c > COUPLING_TOL)
            .or(self.excited.first())
            .map_or(f64::INFINITY, |(e, _)| e - e0)
    }

    /// `max_e ‖⟨e|∂H/∂s|g⟩‖ / (E_e - E_g)²`, `+∞` for a closing gap.
    pub fn rate(&self) -> f64 {
        let e0 = self.ground_energy();
        self.excited
            .iter()
            .filter(|(_, c)| *c > COUPLING_TOL)
            .map(|&(e, c)| {
                let gap = e - e0;
                if gap <= COUPLING_TOL {
                    f64::INFINITY
                } else {
                    c / (gap * gap)
                }
            })
            .fold(0.0, f64::max)
    }

    /// Squared norm of the projection of `psi` onto the ground level.
    pub fn ground_population(&self, psi: &[C64]) -> f64 {
        let v = self.es.vectors();
        (0..self.ground_dim)
            .map(|k| {
                v.column(k)
                    .iter()
                    .zip(psi)
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C64>()
                    .norm_sqr()
            })
            .sum()
    }
}

fn spectral_norm(block: &DMatrix<C64>) -> f64 {
    if block.is_empty() {
        return 0.0;
    }
    let gram = block.adjoint() * block;
    let (vals, _) = hermitian_eigen(&gram);
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Local adiabatic rate: the adiabaticity at `ds/dt = 1`.
pub fn adiabatic_rate(lat: &TorusLattice, s: f64) -> Result<f64> {
    let h = interpolated_hamiltonian(lat, s)?;
    let dh = hamiltonian_derivative(lat)?.dense();
    Ok(Instant::new(&h, &dh)?.rate())
}

/// `max_e |⟨ψ_g|∂H/∂s · ds/dt|ψ_e⟩| / (E_e - E_g)²` over excited levels
/// with a nonvanishing coupling. A degenerate ground level is handled as a
/// block (spectral norm of the coupling block). Returns `+∞` when a
/// coupled level is degenerate with the ground level.
pub fn adiabaticity(lat: &TorusLattice, s: f64, ds_dt: f64) -> Result<f64> {
    let rate = adiabatic_rate(lat, s)?;
    if ds_dt == 0.0 {
        return Ok(0.0);
    }
    Ok(rate * ds_dt.abs())
}

/// `|⟨ψ_a|∂H/∂s|ψ_b⟩|` over the four sectors. The derivative does not
/// depend on `s`; the argument is validated for symmetry with the other
/// per-point diagnostics.
pub fn sector_transition_check(lat: &TorusLattice, s: f64) -> Result<[[f64; 4]; 4]> {
    check_s(s)?;
    let dh = hamiltonian_derivative(lat)?;
    let sectors = all_sectors(lat)?;
    let images = sectors
        .iter()
        .map(|psi| dh.apply(psi))
        .collect::<Result<Vec<_>>>()?;
    let mut out = [[0.0; 4]; 4];
    for (a, sa) in sectors.iter().enumerate() {
        for (b, hb) in images.iter().enumerate() {
            out[a][b] = sa.inner(hb)?.norm();
        }
    }
    Ok(out)
}
