use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use toposim_core::adiabatic::{trotter_step, min_fidelity_vs_steps, mscan_csv, run_exact_sweep, spectrum_csv, spectrum_curve, Schedule};
use toposim_core::nmr::{
    compile_trotter_step, compile_zp_exponential, sequence_unitary, simulate_sequence, trotter_target,
    unitary_equivalence, zp_target, MoleculeSpec, PulseSequence,
};
use toposim_core::pipeline::{amplitude_error, run_pipeline, sector_seed, PipelineConfig, RunMode};
use toposim_core::tomography::{
    emit_stick_spectrum, fidelity_csv, fidelity_table, imag_grid_csv, plan_coverage, real_grid_csv, reconstruct,
    records_csv, simulate_plan, spectrum_csv as stick_csv,
};
use toposim_core::wen::{build_lattice, sector_gram_matrix, topological_sector, verify_stabilizers, SECTORS};
use toposim_core::{QuantumState, StateVector};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

const SPECTRUM_SAMPLES: usize = 101;

#[derive(Serialize)]
struct FileEntry {
    name: String,
    bytes: usize,
}

#[derive(Serialize)]
struct ErrorModel {
    readout_sigma: f64,
    control_error_sigma: f64,
    amplitude_error: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: &'a str,
    seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sector_seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_model: Option<ErrorModel>,
    config: &'a RunConfig,
    files: Vec<FileEntry>,
}

/// Collects output files under one directory and writes the manifest last.
struct Output {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Output {
    fn create(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: contents.len(),
        });
        Ok(())
    }

    fn finish(self, command: &str, cfg: &RunConfig, sector_seeds: Vec<u64>, error_model: Option<ErrorModel>) -> CliResult<()> {
        let manifest = Manifest {
            tool: "toposim",
            version: env!("CARGO_PKG_VERSION"),
            core_version: toposim_core::VERSION,
            command,
            seed: cfg.seed,
            sector_seeds,
            error_model,
            config: cfg,
            files: self.files,
        };
        let text = toml::to_string(&manifest).map_err(|e| CliError::Invalid(format!("manifest: {e}")))?;
        let path = self.dir.join("manifest.toml");
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

fn tag(sector: (u8, u8)) -> String {
    format!("{}{}", sector.0, sector.1)
}

/// Nonzero amplitudes as CSV.
fn amplitudes_csv(psi: &StateVector) -> String {
    let n = psi.n_qubits();
    let mut out = String::from("index,basis,re,im\n");
    for (i, a) in psi.support(1e-14) {
        let _ = writeln!(out, "{i},{i:0n$b},{:.15},{:.15}", a.re, a.im);
    }
    out
}

fn gram_csv(g: &[[f64; 4]; 4]) -> String {
    let mut out = String::from("sector,00,01,10,11\n");
    for (row, &s) in g.iter().zip(&SECTORS) {
        let _ = write!(out, "{}", tag(s));
        for v in row {
            let _ = write!(out, ",{v:.15}");
        }
        out.push('\n');
    }
    out
}

pub fn sectors(cfg: &RunConfig) -> CliResult<()> {
    let lat = build_lattice(cfg.lattice)?;
    let mut out = Output::create(&cfg.out)?;
    let mut worst: f64 = 1.0;
    for &s in &SECTORS {
        let psi = topological_sector(&lat, s.0, s.1)?;
        worst = worst.min(verify_stabilizers(&lat, &psi)?.min_value());
        out.write(&format!("sector_{}.csv", tag(s)), &amplitudes_csv(&psi))?;
    }
    let gram = sector_gram_matrix(&lat)?;
    out.write("gram.csv", &gram_csv(&gram))?;
    out.finish("sectors", cfg, Vec::new(), None)?;
    println!("lattice {0}x{0}: 4 sectors written, lowest stabilizer expectation {worst:.12}", cfg.lattice);
    if (worst - 1.0).abs() > toposim_core::wen::STABILIZER_TOL {
        return Err(CliError::Threshold(format!("stabilizer expectation {worst} != 1")));
    }
    Ok(())
}

pub fn sweep(cfg: &RunConfig) -> CliResult<()> {
    let lat = build_lattice(cfg.lattice)?;
    let schedule = Schedule::build(cfg.schedule, &lat, cfg.steps, cfg.total_time)?;
    let psi0 = StateVector::zero(lat.n_sites())?;
    let report = run_exact_sweep(&lat, &schedule, &psi0)?;
    let steps: Vec<usize> = (1..=cfg.scan_max_steps).collect();
    let scan = min_fidelity_vs_steps(&lat, cfg.total_time, &steps, cfg.schedule)?;
    let curve = spectrum_curve(&lat, SPECTRUM_SAMPLES)?;

    let mut out = Output::create(&cfg.out)?;
    out.write("sweep.csv", &report.to_csv())?;
    out.write("fmin_vs_steps.csv", &mscan_csv(&scan))?;
    out.write("spectrum.csv", &spectrum_csv(&curve))?;
    out.finish("sweep", cfg, Vec::new(), None)?;

    let f_min = report.min_fidelity();
    println!(
        "{} schedule, M={}, T={}: F_min {f_min:.6}, final {:.6}",
        cfg.schedule,
        cfg.steps,
        cfg.total_time,
        report.final_fidelity()
    );
    if f_min < cfg.threshold {
        return Err(CliError::Threshold(format!("F_min {f_min:.6} below {}", cfg.threshold)));
    }
    Ok(())
}

pub fn compile(cfg: &RunConfig) -> CliResult<()> {
    let mol = cfg.molecule()?;
    let (s, tau) = (cfg.compile_s, cfg.compile_tau);
    let zp = compile_zp_exponential(&mol, s, tau)?;
    let step = compile_trotter_step(&mol, s, tau)?;
    let f_zp = unitary_equivalence(&sequence_unitary(&mol, &zp)?, &zp_target(s, tau))?;
    let step_u = sequence_unitary(&mol, &step)?;
    let f_product = product_formula_equivalence(&mol, &step, s, tau)?;
    let f_step = unitary_equivalence(&step_u, &trotter_target(s, tau)?)?;

    let mut out = Output::create(&cfg.out)?;
    out.write("zp_sequence.txt", &zp.to_text())?;
    out.write("step_sequence.txt", &step.to_text())?;
    let mut report = String::from("block,target,s,tau,events,total_delay_s,fidelity,infidelity\n");
    for (name, target, seq, f) in [
        ("zp", "zp_exponential", &zp, f_zp),
        ("trotter_step", "product_formula", &step, f_product),
        ("trotter_step", "exact_propagator", &step, f_step),
    ] {
        let _ = writeln!(
            report,
            "{name},{target},{s},{tau},{},{:.12e},{f:.15},{:.3e}",
            seq.len(),
            seq.total_delay(),
            (1.0 - f).max(0.0)
        );
    }
    out.write("equivalence.csv", &report)?;
    out.finish("compile", cfg, Vec::new(), None)?;
    println!(
        "{}: Z_p block {} events, fidelity {f_zp:.12}; Trotter step {} events, fidelity {f_product:.12} (product formula), {f_step:.12} (exact)",
        if mol.name.is_empty() { "molecule" } else { &mol.name },
        zp.len(),
        step.len()
    );
    Ok(())
}

/// `|Tr(U† V)| / d` between a compiled sequence and the symmetric product formula, column by column.
fn product_formula_equivalence(mol: &MoleculeSpec, seq: &PulseSequence, s: f64, tau: f64) -> CliResult<f64> {
    let lat = build_lattice(2)?;
    let dim = 1usize << lat.n_sites();
    let mut trace = toposim_core::C64::new(0.0, 0.0);
    for col in 0..dim {
        let basis = StateVector::from_bits(&format!("{col:04b}"))?;
        let want = trotter_step(&lat, s, tau, &basis)?;
        let got = simulate_sequence(mol, seq, &basis)?;
        trace += want.inner(&got)?;
    }
    Ok(trace.norm() / dim as f64)
}

pub fn tomo(cfg: &RunConfig) -> CliResult<()> {
    cfg.require_small_lattice("tomo")?;
    let plan = cfg.plan()?;
    let cov = plan_coverage(&plan);
    if !cov.complete {
        return Err(CliError::Invalid(format!(
            "plan covers {} of 256 coefficients; missing {}",
            cov.covered(),
            cov.missing().join(", ")
        )));
    }
    let lat = build_lattice(2)?;
    let mut out = Output::create(&cfg.out)?;
    out.write("plan.txt", &plan.to_text())?;
    let mut ideals = Vec::with_capacity(4);
    let mut rhos = Vec::with_capacity(4);
    let mut seeds = Vec::with_capacity(4);
    for (k, &s) in SECTORS.iter().enumerate() {
        let psi = topological_sector(&lat, s.0, s.1)?;
        let seed = sector_seed(cfg.seed, k);
        let recs = simulate_plan(&psi, &plan, cfg.noise, seed)?;
        let rho = reconstruct(&recs, &plan, cfg.psd_project)?;
        out.write(&format!("records_{}.csv", tag(s)), &records_csv(&recs))?;
        out.write(&format!("rho_{}_re.csv", tag(s)), &real_grid_csv(&rho))?;
        out.write(&format!("rho_{}_im.csv", tag(s)), &imag_grid_csv(&rho))?;
        ideals.push(psi);
        rhos.push(rho);
        seeds.push(seed);
    }
    let rows = fidelity_table(&rhos, &ideals)?;
    out.write("fidelity.csv", &fidelity_csv(&rows))?;
    out.finish("tomo", cfg, seeds, None)?;
    println!(
        "plan: {} settings, {} local patterns, {} SWAPs, {} coefficients; sigma {}",
        plan.len(),
        plan.local_patterns(),
        plan.swap_gates(),
        cov.covered(),
        cfg.noise
    );
    print_fidelities(&rows);
    Ok(())
}

pub fn full(cfg: &RunConfig) -> CliResult<()> {
    cfg.require_small_lattice("full")?;
    let pcfg = PipelineConfig {
        schedule: cfg.schedule,
        steps: cfg.steps,
        total_time: cfg.total_time,
        mode: cfg.mode,
        noise_sigma: cfg.noise,
        control_error: cfg.control_error,
        psd_project: cfg.psd_project,
        init: cfg.init,
        seed: cfg.seed,
        molecule: cfg.molecule()?,
    };
    let report = run_pipeline(&pcfg)?;
    let mut out = Output::create(&cfg.out)?;
    out.write("sweep.csv", &report.sweep.to_csv())?;
    for (k, &s) in SECTORS.iter().enumerate() {
        let rho = &report.reconstructions[k];
        out.write(&format!("records_{}.csv", tag(s)), &records_csv(&report.records[k]))?;
        out.write(&format!("rho_{}_re.csv", tag(s)), &real_grid_csv(rho))?;
        out.write(&format!("rho_{}_im.csv", tag(s)), &imag_grid_csv(rho))?;
        out.write(&format!("spectrum_{}.csv", tag(s)), &stick_csv(&emit_stick_spectrum(rho, &pcfg.molecule)?))?;
    }
    out.write("fidelity.csv", &fidelity_csv(&report.fidelities))?;
    let error_model = (cfg.mode != RunMode::Ideal).then(|| ErrorModel {
        readout_sigma: pcfg.readout_sigma(),
        control_error_sigma: pcfg.angle_sigma(),
        amplitude_error: amplitude_error(&pcfg),
    });
    let seeds = (0..4).map(|k| sector_seed(cfg.seed, k)).collect();
    out.finish("full", cfg, seeds, error_model)?;
    println!(
        "{} mode, {} schedule M={}: F_min {:.6}",
        cfg.mode,
        cfg.schedule,
        cfg.steps,
        report.sweep.min_fidelity()
    );
    print_fidelities(&report.fidelities);
    Ok(())
}

fn print_fidelities(rows: &[toposim_core::tomography::FidelityRow]) {
    for r in rows {
        println!("sector ({},{}): fidelity {:.6}", r.sector.0, r.sector.1, r.fidelity);
    }
}
