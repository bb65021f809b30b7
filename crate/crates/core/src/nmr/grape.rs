//! Gradient ascent on piecewise-constant x/y control fields.
//!
//! Slice `k` evolves under `H_NMR + Σ_j (u_x σx_j + u_y σy_j)/2` for `Δt`;
//! amplitudes are in rad/s and clipped to `±max_amplitude`. The figure of
//! merit is the phase-insensitive gate fidelity `|Tr(W†U)|/d`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{hermitian_eigen, Pauli, PauliString, C64};

use super::{nmr_hamiltonian, MoleculeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    /// Exact derivative of each slice propagator.
    Exact,
    /// `∂U_k ≈ -iΔt H_c U_k`; cheap, biased for long slices.
    FirstOrder,
    /// Central differences of the fidelity.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialControls {
    Zero,
    /// Uniform in `±scale·max_amplitude`.
    Random { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrapeOptions {
    pub slices: usize,
    /// Total duration in seconds.
    pub duration: f64,
    /// Bound on each control amplitude, rad/s.
    pub max_amplitude: f64,
    pub max_iterations: usize,
    /// Stop once this fidelity is reached.
    pub target_fidelity: f64,
    /// Stop when the projected gradient norm falls below this.
    pub gradient_tol: f64,
    pub gradient: GradientMode,
    pub initial: InitialControls,
    pub seed: u64,
    /// L-BFGS history length.
    pub memory: usize,
}

impl Default for GrapeOptions {
    fn default() -> Self {
        GrapeOptions {
            slices: 100,
            duration: 1e-3,
            max_amplitude: 2.0 * std::f64::consts::PI * 25e3,
            max_iterations: 500,
            target_fidelity: 0.999,
            gradient_tol: 1e-9,
            gradient: GradientMode::Exact,
            initial: InitialControls::Random { scale: 0.2 },
            seed: 0,
            memory: 12,
        }
    }
}

impl GrapeOptions {
    fn validate(&self) -> Result<()> {
        if self.slices == 0 {
            return Err(Error::Config("GRAPE needs at least one slice".into()));
        }
        for (name, v) in [("duration", self.duration), ("max_amplitude", self.max_amplitude)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    range: "> 0",
                });
            }
        }
        Ok(())
    }
}

/// Piecewise-constant controls; `amplitudes[k][2j]` is `u_x` and
/// `amplitudes[k][2j+1]` is `u_y` of spin `j` during slice `k`, in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlWaveform {
    pub n_spins: usize,
    pub slice_duration: f64,
    pub amplitudes: Vec<Vec<f64>>,
}

impl ControlWaveform {
    pub fn zeros(n_spins: usize, slices: usize, slice_duration: f64) -> Self {
        ControlWaveform {
            n_spins,
            slice_duration,
            amplitudes: vec![vec![0.0; 2 * n_spins]; slices],
        }
    }

    pub fn slices(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn duration(&self) -> f64 {
        self.slice_duration * self.slices() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Columns: slice, start time (s), spin (1-based), u_x and u_y (rad/s).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slice,t_start_s,spin,ux_rad_per_s,uy_rad_per_s\n");
        for (k, row) in self.amplitudes.iter().enumerate() {
            for j in 0..self.n_spins {
                let _ = writeln!(
                    out,
                    "{k},{:.9e},{},{:.9e},{:.9e}",
                    k as f64 * self.slice_duration,
                    j + 1,
                    row[2 * j],
                    row[2 * j + 1]
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct GrapeResult {
    pub waveform: ControlWaveform,
    pub fidelity: f64,
    /// Fidelity at iteration 0 and after every accepted step.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the projected gradient (per unit of `max_amplitude`) at exit.
    pub gradient_norm: f64,
}

struct Problem {
    dim: usize,
    n_controls: usize,
    dt: f64,
    bound: f64,
    drift: DMatrix<C64>,
    controls: Vec<DMatrix<C64>>,
    target_dag: DMatrix<C64>,
}

struct Slice {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
    unitary: DMatrix<C64>,
}

fn unitarity_defect(w: &DMatrix<C64>) -> f64 {
    let d = w.nrows();
    (w.adjoint() * w - DMatrix::<C64>::identity(d, d)).norm()
}

impl Problem {
    fn new(mol: &MoleculeSpec, target: &DMatrix<C64>, slices: usize, duration: f64, bound: f64) -> Result<Self> {
        let n = mol.n_spins();
        let dim = 1usize << n;
        if target.nrows() != dim || target.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: target.nrows(),
            });
        }
        let defect = unitarity_defect(target);
        if defect > 1e-8 {
            return Err(Error::NonUnitaryTarget(defect));
        }
        let half = C64::new(0.5, 0.0);
        let mut controls = Vec::with_capacity(2 * n);
        for j in 0..n {
            for p in [Pauli::X, Pauli::Y] {
                controls.push(PauliString::single(n, j, p)?.dense() * half);
            }
        }
        Ok(Problem {
            dim,
            n_controls: 2 * n,
            dt: duration / slices as f64,
            bound,
            drift: nmr_hamiltonian(mol)?.dense(),
            controls,
            target_dag: target.adjoint(),
        })
    }

    fn slice(&self, u: &[f64]) -> Slice {
        let mut h = self.drift.clone();
        for (c, &a) in self.controls.iter().zip(u) {
            h += c * C64::new(a, 0.0);
        }
        let (values, vectors) = hermitian_eigen(&h);
        let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim,
            values.iter().map(|l| C64::from_polar(1.0, -l * self.dt)),
        ));
        let unitary = &vectors * phases * vectors.adjoint();
        Slice {
            values,
            vectors,
            unitary,
        }
    }

    fn amplitudes(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.chunks(self.n_controls)
            .map(|c| c.iter().map(|v| v * self.bound).collect())
            .collect()
    }

    fn slices(&self, x: &[f64]) -> Vec<Slice> {
        self.amplitudes(x).par_iter().map(|u| self.slice(u)).collect()
    }

    fn overlap(&self, slices: &[Slice]) -> C64 {
        let mut u = DMatrix::<C64>::identity(self.dim, self.dim);
        for s in slices {
            u = &s.unitary * u;
        }
        (&self.target_dag * u).trace()
    }

    fn fidelity(&self, x: &[f64]) -> f64 {
        self.overlap(&self.slices(x)).norm() / self.dim as f64
    }

    /// Fidelity and its gradient with respect to the scaled controls `u/bound`.
    fn fidelity_and_gradient(&self, x: &[f64], mode: GradientMode) -> (f64, Vec<f64>) {
        if mode == GradientMode::FiniteDifference {
            let h = 1e-6;
            let grad = (0..x.len())
                .into_par_iter()
                .map(|i| {
                    let mut p = x.to_vec();
                    p[i] += h;
                    let fp = self.fidelity(&p);
                    p[i] -= 2.0 * h;
                    (fp - self.fidelity(&p)) / (2.0 * h)
                })
                .collect();
            return (self.fidelity(x), grad);
        }
        let slices = self.slices(x);
        let n = slices.len();
        let id = DMatrix::<C64>::identity(self.dim, self.dim);
        // right[k] = U_k…U_1 (right[0] = I), left[k] = W† U_N…U_{k+1}
        let mut right = Vec::with_capacity(n + 1);
        right.push(id);
        for s in &slices {
            let next = &s.unitary * right.last().expect("nonempty");
            right.push(next);
        }
        let mut left = vec![self.target_dag.clone(); n + 1];
        for k in (0..n).rev() {
            left[k] = &left[k + 1] * &slices[k].unitary;
        }
        let g = left[0].trace();
        let fid = g.norm() / self.dim as f64;
        let grad = (0..n)
            .into_par_iter()
            .flat_map_iter(|k| {
                let m = &right[k] * &left[k + 1];
                let s = &slices[k];
                let dgs = self.slice_derivatives(s, &m, mode);
                dgs.into_iter()
                    .map(move |dg| (g.conj() * dg).re / (g.norm().max(1e-300) * self.dim as f64) * self.bound)
            })
            .collect();
        (fid, grad)
    }

    /// `Tr(M ∂U/∂u_c)` for every control `c` of one slice.
    fn slice_derivatives(&self, s: &Slice, m: &DMatrix<C64>, mode: GradientMode) -> Vec<C64> {
        let dt = self.dt;
        match mode {
            GradientMode::FirstOrder => {
                let mu = &s.unitary * m;
                self.controls
                    .iter()
                    .map(|c| C64::new(0.0, -dt) * (c * &mu).trace())
                    .collect()
            }
            _ => {
                let v = &s.vectors;
                let vd = v.adjoint();
                let mp = &vd * m * v;
                let d = self.dim;
                let phi = DMatrix::from_fn(d, d, |a, b| {
                    let (la, lb) = (s.values[a], s.values[b]);
                    let x = dt * (la - lb) / 2.0;
                    let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                    C64::new(0.0, -dt) * C64::from_polar(1.0, -dt * (la + lb) / 2.0) * sinc
                });
                self.controls
                    .iter()
                    .map(|c| {
                        let gmat = &vd * c * v;
                        let mut acc = C64::new(0.0, 0.0);
                        for a in 0..d {
                            for b in 0..d {
                                acc += mp[(b, a)] * gmat[(a, b)] * phi[(a, b)];
                            }
                        }
                        acc
                    })
                    .collect()
            }
        }
    }
}

fn projected_gradient_norm(x: &[f64], grad: &[f64]) -> f64 {
    x.iter()
        .zip(grad)
        .map(|(&xi, &gi)| {
            // ascent direction blocked at an active bound
            if (xi >= 1.0 && gi > 0.0) || (xi <= -1.0 && gi < 0.0) {
                0.0
            } else {
                gi * gi
            }
        })
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two-loop recursion; returns an ascent direction.
fn lbfgs_direction(grad: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y) in memory.iter().rev() {
        let rho = 1.0 / dot(y, s);
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push((a, rho));
    }
    if let Some((s, y)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y), (a, rho)) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q
}

/// Fidelity and gradient (per rad/s) of a waveform.
pub fn fidelity_and_gradient(
    mol: &MoleculeSpec,
    target: &DMatrix<C64>,
    waveform: &ControlWaveform,
    mode: GradientMode,
) -> Result<(f64, Vec<Vec<f64>>)> {
    if waveform.n_spins != mol.n_spins() {
        return Err(Error::SizeMismatch {
            left: mol.n_spins(),
            right: waveform.n_spins,
        });
    }
    // work in units of the largest amplitude so difference steps are meaningful
    let scale = waveform.max_abs().max(1.0);
    let p = Problem::new(mol, target, waveform.slices().max(1), waveform.duration(), scale)?;
    let x: Vec<f64> = waveform.amplitudes.iter().flatten().map(|u| u / scale).collect();
    let (f, g) = p.fidelity_and_gradient(&x, mode);
    Ok((f, g.chunks(p.n_controls).map(|c| c.iter().map(|v| v / scale).collect()).collect()))
}

/// Propagator of a waveform under the molecule's drift Hamiltonian.
pub fn waveform_unitary(mol: &MoleculeSpec, waveform: &ControlWaveform) -> Result<DMatrix<C64>> {
    let d = 1usize << mol.n_spins();
    let p = Problem::new(mol, &DMatrix::identity(d, d), waveform.slices().max(1), waveform.duration(), 1.0)?;
    let mut u = DMatrix::<C64>::identity(d, d);
    for row in &waveform.amplitudes {
        u = p.slice(row).unitary * u;
    }
    Ok(u)
}

pub fn optimize_waveform(mol: &MoleculeSpec, target: &DMatrix<C64>, opts: &GrapeOptions) -> Result<GrapeResult> {
    opts.validate()?;
    let p = Problem::new(mol, target, opts.slices, opts.duration, opts.max_amplitude)?;
    let len = opts.slices * p.n_controls;
    let mut x = match opts.initial {
        InitialControls::Zero => vec![0.0; len],
        InitialControls::Random { scale } => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let s = scale.clamp(0.0, 1.0);
            (0..len).map(|_| if s > 0.0 { rng.random_range(-s..=s) } else { 0.0 }).collect()
        }
    };
    let (mut f, mut grad) = p.fidelity_and_gradient(&x, opts.gradient);
    let mut history = vec![f];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = f >= opts.target_fidelity;
    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let mut accepted = None;
        for use_memory in [true, false] {
            if !use_memory && memory.is_empty() {
                continue;
            }
            let dir = if use_memory && !memory.is_empty() {
                lbfgs_direction(&grad, &memory)
            } else {
                let norm = dot(&grad, &grad).sqrt().max(1e-300);
                grad.iter().map(|g| g / norm * 0.1).collect()
            };
            let mut alpha = 1.0;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| (xi + alpha * di).clamp(-1.0, 1.0)).collect();
                let step: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
                let predicted = dot(&grad, &step);
                if predicted > 0.0 {
                    let ft = p.fidelity(&trial);
                    if ft >= f + 1e-4 * predicted {
                        accepted = Some(trial);
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
            memory.clear();
        }
        let Some(next) = accepted else {
            break;
        };
        let (fn_, gn) = p.fidelity_and_gradient(&next, opts.gradient);
        let s: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        // ascent: curvature pair of the negated objective
        let y: Vec<f64> = grad.iter().zip(&gn).map(|(a, b)| a - b).collect();
        if dot(&s, &y) > 1e-14 {
            memory.push_back((s, y));
            if memory.len() > opts.memory.max(1) {
                memory.pop_front();
            }
        }
        x = next;
        f = fn_;
        grad = gn;
        history.push(f);
        converged = f >= opts.target_fidelity || projected_gradient_norm(&x, &grad) < opts.gradient_tol;
    }
    let gradient_norm = projected_gradient_norm(&x, &grad);
    converged |= gradient_norm < opts.gradient_tol;
    Ok(GrapeResult {
        waveform: ControlWaveform {
            n_spins: mol.n_spins(),
            slice_duration: p.dt,
            amplitudes: p.amplitudes(&x),
        },
        fidelity: f,
        history,
        iterations,
        converged,
        gradient_norm,
    })
}
