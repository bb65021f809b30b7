//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use toposim_core::adiabatic::{
    interpolated_hamiltonian, min_fidelity_vs_steps, mscan_csv, run_exact_sweep, trotter_step, wen_step_unitary,
    Schedule, ScheduleKind, DEFAULT_STEPS, DEFAULT_TOTAL_TIME,
};
use toposim_core::nmr::{
    compile_trotter_step, compile_zp_exponential, optimize_waveform, sequence_unitary, unitary_equivalence,
    waveform_unitary, wen_target, zp_target, ControlWaveform, GradientMode, GrapeOptions, MoleculeSpec,
};
use toposim_core::pipeline::noise_band;
use toposim_core::tomography::{default_plan, plan_coverage, reconstruct, simulate_plan};
use toposim_core::wen::{
    build_lattice, build_wen_hamiltonian, ground_state_superposition, sector_gram_matrix,
    topological_sector, verify_stabilizers, SECTORS,
};
use toposim_core::kernel::linalg::{hermitian_eigen, hermitian_exp};
use toposim_core::{
    eigensystem, entropy_bits, evolve_exact, partial_trace, DensityMatrix, HamiltonianSpec,
    Pauli, PauliString, QuantumState, StateVector, C64,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let amps = (0..1usize << n).map(|_| C64::new(normal.sample(rng), normal.sample(rng))).collect();
    StateVector::normalized(n, amps).unwrap()
}

fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> DensityMatrix {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let g = DMatrix::from_fn(16, rank, |_, _| C64::new(normal.sample(rng), normal.sample(rng)));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix(4, m / tr).unwrap()
}

/// Unitary of a state map, built column by column from basis states.
fn map_unitary(n: usize, f: impl Fn(&StateVector) -> StateVector) -> DMatrix<C64> {
    let d = 1usize << n;
    let mut u = DMatrix::zeros(d, d);
    for col in 0..d {
        let bits = format!("{col:0n$b}");
        let out = f(&StateVector::from_bits(&bits).unwrap());
        u.set_column(col, &out.to_column());
    }
    u
}

fn gate_fidelity(u: &DMatrix<C64>, v: &DMatrix<C64>) -> f64 {
    (u.adjoint() * v).trace().norm() / u.nrows() as f64
}

fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(m);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| c(l.max(0.0).sqrt())),
    ));
    &vecs * d * vecs.adjoint()
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(ρ) σ sqrt(ρ)))²`.
fn uhlmann(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let s = psd_sqrt(rho.matrix());
    let inner = psd_sqrt(&(&s * sigma.matrix() * &s));
    inner.trace().re.powi(2)
}

/// Basis pairs of the four 2×2 sectors, `(|a⟩ + |b⟩)/√2`.
const SECTOR_BITS: [(&str, &str); 4] = [("0000", "1111"), ("0011", "1100"), ("0110", "1001"), ("0101", "1010")];

fn criterion_1() -> Outcome {
    let lat = build_lattice(2).unwrap();
    let mut amp_err: f64 = 0.0;
    let mut stab_err: f64 = 0.0;
    for (&(a, b), (x, y)) in SECTORS.iter().zip(SECTOR_BITS) {
        let psi = topological_sector(&lat, a, b).unwrap();
        let mut want = vec![c(0.0); 16];
        for bits in [x, y] {
            want[usize::from_str_radix(bits, 2).unwrap()] = c(0.5f64.sqrt());
        }
        for (g, w) in psi.amplitudes().iter().zip(&want) {
            amp_err = amp_err.max((g - w).norm());
        }
        let rep = verify_stabilizers(&lat, &psi).unwrap();
        for e in &rep.entries {
            stab_err = stab_err.max((e.value - 1.0).abs());
        }
    }
    let gram = sector_gram_matrix(&lat).unwrap();
    let mut gram_err: f64 = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            gram_err = gram_err.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    outcome(
        amp_err < 1e-12 && gram_err < 1e-12 && stab_err < 1e-9,
        format!("amplitude err {amp_err:.1e}, Gram err {gram_err:.1e}, stabilizer err {stab_err:.1e}"),
    )
}

fn criterion_2() -> Outcome {
    let lat = build_lattice(2).unwrap();
    let es = eigensystem(&build_wen_hamiltonian(&lat)).unwrap();
    let mut counts = [0usize; 3];
    let mut stray = 0;
    for &v in es.values() {
        match [-4.0, 0.0, 4.0].iter().position(|t: &f64| (v - t).abs() < 1e-9) {
            Some(k) => counts[k] += 1,
            None => stray += 1,
        }
    }
    outcome(
        counts == [4, 8, 4] && stray == 0,
        format!("degeneracies of -4/0/+4: {counts:?}, unmatched {stray}"),
    )
}

fn criterion_3() -> Outcome {
    let lat = build_lattice(2).unwrap();
    let psi0 = StateVector::zero(4).unwrap();
    let mut best: f64 = 0.0;
    let mut parts = Vec::new();
    for kind in [ScheduleKind::Linear, ScheduleKind::LocalAdiabatic] {
        let sched = Schedule::build(kind, &lat, DEFAULT_STEPS, DEFAULT_TOTAL_TIME).unwrap();
        let rep = run_exact_sweep(&lat, &sched, &psi0).unwrap();
        best = best.max(rep.min_fidelity());
        parts.push(format!("{kind} F_min {:.5} (population {:.5})", rep.min_fidelity(), rep.min_population()));
    }
    let steps: Vec<usize> = (1..=40).collect();
    let rows = min_fidelity_vs_steps(&lat, DEFAULT_TOTAL_TIME, &steps, ScheduleKind::Linear).unwrap();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("fmin_vs_steps.csv");
    let written = std::fs::write(&path, mscan_csv(&rows)).is_ok();
    let tail: Vec<f64> = rows.iter().filter(|r| r.steps >= 8).map(|r| r.min_fidelity).collect();
    let worst_drop = tail.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        best >= 0.99 && worst_drop <= 0.005 && written,
        format!("{}; M>=8 largest drop {worst_drop:.1e}; scan -> {}", parts.join(", "), path.display()),
    )
}

fn criterion_4() -> Outcome {
    let lat = build_lattice(2).unwrap();
    let h = interpolated_hamiltonian(&lat, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let psi = random_state(&mut rng, 4);
    let taus: Vec<f64> = (0..=16).map(|k| 1e-3 * 10f64.powf(k as f64 / 8.0)).collect();
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .map(|&t| {
            let a = trotter_step(&lat, 0.5, t, &psi).unwrap();
            let b = evolve_exact(&h, t, &psi).unwrap();
            let err = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            (t.ln(), err.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    outcome((slope - 3.0).abs() <= 0.2, format!("log-log slope {slope:.4}"))
}

fn criterion_5() -> Outcome {
    let lat = build_lattice(2).unwrap();
    let hw = build_wen_hamiltonian(&lat);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 1.0;
    for _ in 0..50 {
        let s: f64 = rng.random();
        let tau: f64 = rng.random_range(0.0..2.0);
        let u = map_unitary(4, |psi| wen_step_unitary(&lat, s, tau, psi).unwrap());
        let v = map_unitary(4, |psi| evolve_exact(&hw, s * tau, psi).unwrap());
        worst = worst.min(gate_fidelity(&u, &v));
    }
    outcome(worst >= 1.0 - 1e-12, format!("worst gate fidelity 1 - {:.1e}", 1.0 - worst))
}

fn criterion_6() -> Outcome {
    let mol = MoleculeSpec::synthetic_three_coupling();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_zp: f64 = 1.0;
    for _ in 0..20 {
        let s: f64 = rng.random();
        let tau: f64 = rng.random_range(0.0..1.0);
        let u = sequence_unitary(&mol, &compile_zp_exponential(&mol, s, tau).unwrap()).unwrap();
        worst_zp = worst_zp.min(unitary_equivalence(&u, &zp_target(s, tau)).unwrap());
    }
    let mut worst_step: f64 = 1.0;
    for tau in [0.1, DEFAULT_TOTAL_TIME / DEFAULT_STEPS as f64, 0.9] {
        let u = sequence_unitary(&mol, &compile_trotter_step(&mol, 1.0, tau).unwrap()).unwrap();
        worst_step = worst_step.min(unitary_equivalence(&u, &wen_target(tau)).unwrap());
    }
    outcome(
        worst_zp >= 1.0 - 1e-6 && worst_step >= 1.0 - 1e-6,
        format!(
            "Z_p block worst 1 - {:.1e}; s=1 step worst 1 - {:.1e}",
            1.0 - worst_zp,
            1.0 - worst_step
        ),
    )
}

fn criterion_7() -> Outcome {
    let plan = default_plan();
    let cov = plan_coverage(&plan);
    let shape_ok = plan.len() == 44 && plan.local_patterns() == 28 && plan.swap_gates() == 3;
    let lat = build_lattice(2).unwrap();
    let mut worst: f64 = 1.0;
    for (a, b) in SECTORS {
        let psi = topological_sector(&lat, a, b).unwrap();
        let rho = reconstruct(&simulate_plan(&psi, &plan, 0.0, 0).unwrap(), &plan, false).unwrap();
        worst = worst.min(rho.fidelity_with_pure(&psi).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..20 {
        let rho = random_density(&mut rng, 1 + k % 16);
        let back = reconstruct(&simulate_plan(&rho, &plan, 0.0, 0).unwrap(), &plan, false).unwrap();
        worst = worst.min(uhlmann(&rho, &back));
    }
    outcome(
        shape_ok && cov.complete && cov.covered() == 256 && worst >= 0.9999,
        format!(
            "{} settings, {} local patterns, {} SWAPs, {} coefficients; worst round-trip fidelity {worst:.12}",
            plan.len(),
            plan.local_patterns(),
            plan.swap_gates(),
            cov.covered()
        ),
    )
}

fn criterion_8() -> Outcome {
    let means = noise_band(0.015, 50, true).unwrap();
    let ok = means.iter().all(|m| (0.95..=0.99).contains(m));
    outcome(ok, format!("mean fidelities over 50 seeds {:?}", means.map(|m| (m * 1e4).round() / 1e4)))
}

fn criterion_9() -> Outcome {
    let lat = build_lattice(2).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in SECTORS {
        let psi = topological_sector(&lat, a, b).unwrap();
        for q in 0..4 {
            worst = worst.max((entropy_bits(&partial_trace(&psi, &[q]).unwrap()) - 1.0).abs());
        }
    }
    outcome(worst <= 1e-9, format!("largest |S - 1| = {worst:.1e} bits"))
}

fn criterion_10() -> Outcome {
    let lat = build_lattice(4).unwrap();
    let psi = ground_state_superposition(&lat).unwrap();
    let want = 1.0 / 128f64.sqrt();
    let support = psi.amplitudes().iter().filter(|a| a.norm() > 1e-12).count();
    let amp_err = psi
        .amplitudes()
        .iter()
        .filter(|a| a.norm() > 1e-12)
        .map(|a| (a - c(want)).norm())
        .fold(0.0, f64::max);
    let rep = verify_stabilizers(&lat, &psi).unwrap();
    let stab_err = rep.entries.iter().map(|e| (e.value - 1.0).abs()).fold(0.0, f64::max);
    let others: Vec<StateVector> = SECTORS[1..]
        .iter()
        .map(|&(a, b)| topological_sector(&lat, a, b).unwrap())
        .collect();
    let mut overlap: f64 = 0.0;
    for i in 0..others.len() {
        for j in i + 1..others.len() {
            overlap = overlap.max(others[i].inner(&others[j]).unwrap().norm());
        }
    }
    outcome(
        support == 128 && amp_err < 1e-12 && rep.entries.len() == 16 && stab_err <= 1e-9 && overlap < 1e-12,
        format!(
            "{support} amplitudes (err {amp_err:.1e}), {} stabilizers (err {stab_err:.1e}), max sector overlap {overlap:.1e}",
            rep.entries.len()
        ),
    )
}

fn rotate_all_y(n: usize, angle: f64) -> DMatrix<C64> {
    let mut h = HamiltonianSpec::zero(n).unwrap();
    for j in 0..n {
        h.add_term(0.5, PauliString::single(n, j, Pauli::Y).unwrap()).unwrap();
    }
    hermitian_exp(&h.dense(), angle)
}

fn criterion_11() -> Outcome {
    let mol = MoleculeSpec::synthetic_three_coupling();
    let target = rotate_all_y(4, FRAC_PI_2);
    let opts = GrapeOptions {
        slices: 100,
        duration: 1e-3,
        ..GrapeOptions::default()
    };
    let res = optimize_waveform(&mol, &target, &opts).unwrap();
    let check = gate_fidelity(&target, &waveform_unitary(&mol, &res.waveform).unwrap());
    let monotone = res.history.windows(2).all(|w| w[1] >= w[0]);

    // central differences of an independently evaluated fidelity
    let bound = 2.0 * PI * 25e3;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..10 {
        let mut wf = ControlWaveform::zeros(4, 10, 1e-4);
        for row in &mut wf.amplitudes {
            for v in row.iter_mut() {
                *v = rng.random_range(-bound..bound);
            }
        }
        let (_, grad) = toposim_core::nmr::fidelity_and_gradient(&mol, &target, &wf, GradientMode::Exact).unwrap();
        let h = 1.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..wf.slices() {
            for j in 0..8 {
                let mut p = wf.clone();
                p.amplitudes[k][j] += h;
                let fp = gate_fidelity(&target, &waveform_unitary(&mol, &p).unwrap());
                p.amplitudes[k][j] -= 2.0 * h;
                let fm = gate_fidelity(&target, &waveform_unitary(&mol, &p).unwrap());
                let fd = (fp - fm) / (2.0 * h);
                num += (grad[k][j] - fd).powi(2);
                den += fd * fd;
            }
        }
        worst_rel = worst_rel.max((num / den).sqrt());
    }
    outcome(
        res.fidelity >= 0.99 && (check - res.fidelity).abs() < 1e-9 && monotone && worst_rel <= 1e-5,
        format!(
            "fidelity {:.5} after {} iterations, monotone {monotone}; worst gradient relative error {worst_rel:.1e}",
            res.fidelity, res.iterations
        ),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "sector exactness", Duration::from_secs(1), criterion_1),
        (2, "N=2 spectrum", Duration::from_secs(1), criterion_2),
        (3, "adiabatic sweep", Duration::from_secs(10), criterion_3),
        (4, "Trotter order", Duration::from_secs(5), criterion_4),
        (5, "rotation identity", Duration::from_secs(5), criterion_5),
        (6, "pulse compilation", Duration::from_secs(10), criterion_6),
        (7, "tomography determinacy", Duration::from_secs(30), criterion_7),
        (8, "noise band", Duration::from_secs(120), criterion_8),
        (9, "entanglement", Duration::from_secs(1), criterion_9),
        (10, "N=4 scale check", Duration::from_secs(120), criterion_10),
        (11, "GRAPE", Duration::from_secs(300), criterion_11),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= budget;
        failed += usize::from(!pass);
        println!(
            "{} criterion {id:>2} ({name}): {} [{:.2?} of {:?}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed,
            budget
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
