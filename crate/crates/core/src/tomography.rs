//! Four-qubit state tomography from single-spin readout.
//!
//! A measurement applies an optional SWAP between spin 1 and another spin,
//! then π/2 pulses, and records the 16 expectations of
//! `{σx, σy}_1 ⊗ {I, σz}^{⊗3}`. Each observable maps back to one source
//! Pauli coefficient (up to sign); linear inversion averages the coefficients
//! measured more than once.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{
    hermitian_eigen, rotation_gate, state_fidelity, Axis, DensityMatrix, Pauli, PauliString,
    Phase, QuantumState, StateVector, C64,
};
use crate::nmr::MoleculeSpec;

pub const N_SPINS: usize = 4;
pub const N_OBSERVABLES: usize = 16;
pub const DEFAULT_NOISE_SIGMA: f64 = 0.015;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalPulse {
    E,
    X,
    Y,
}

impl LocalPulse {
    fn letter(self) -> char {
        match self {
            LocalPulse::E => 'E',
            LocalPulse::X => 'X',
            LocalPulse::Y => 'Y',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'E' => Some(LocalPulse::E),
            'X' => Some(LocalPulse::X),
            'Y' => Some(LocalPulse::Y),
            _ => None,
        }
    }

    fn axis(self) -> Option<Axis> {
        match self {
            LocalPulse::E => None,
            LocalPulse::X => Some(Axis::X),
            LocalPulse::Y => Some(Axis::Y),
        }
    }
}

/// Local π/2 pulses on the four spins, preceded by an optional
/// `SWAP(1, partner)` (1-based partner in 2..=4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReadoutSetting {
    pub pulses: [LocalPulse; 4],
    pub swap: Option<u8>,
}

impl ReadoutSetting {
    pub fn new(pulses: [LocalPulse; 4], swap: Option<u8>) -> Result<Self> {
        if let Some(p) = swap {
            if !(2..=4).contains(&p) {
                return Err(Error::OutOfRange {
                    name: "swap partner",
                    value: p as f64,
                    range: "2..=4",
                });
            }
        }
        Ok(ReadoutSetting { pulses, swap })
    }

    pub fn pattern(&self) -> String {
        self.pulses.iter().map(|p| p.letter()).collect()
    }
}

impl fmt::Display for ReadoutSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern())?;
        if let Some(p) = self.swap {
            write!(f, "*SWAP1{p}")?;
        }
        Ok(())
    }
}

impl FromStr for ReadoutSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("invalid readout setting '{s}'"));
        let (pattern, swap) = match s.trim().split_once('*') {
            Some((p, sw)) => {
                let partner = sw.strip_prefix("SWAP1").ok_or_else(bad)?;
                (p, Some(partner.parse::<u8>().map_err(|_| bad())?))
            }
            None => (s.trim(), None),
        };
        let letters: Vec<LocalPulse> = pattern.chars().map(LocalPulse::from_letter).collect::<Option<_>>().ok_or_else(bad)?;
        let pulses: [LocalPulse; 4] = letters.try_into().map_err(|_| bad())?;
        ReadoutSetting::new(pulses, swap)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TomographyPlan {
    pub settings: Vec<ReadoutSetting>,
}

fn setting(label: &str) -> ReadoutSetting {
    label.parse().expect("built-in setting")
}

/// The 44-setting plan: 27 patterns `E???` (spin 2 varying fastest) and
/// `YEEE`, then ten settings behind `SWAP12`, four behind `SWAP13` and two
/// behind `SWAP14`. The tenth `SWAP12` entry is `YEEE`; it supplies the
/// `Z_1 Z_2`-type coefficients no other setting reaches.
pub fn default_plan() -> TomographyPlan {
    let letters = ['E', 'X', 'Y'];
    let mut settings = Vec::with_capacity(44);
    for c4 in letters {
        for c3 in letters {
            for c2 in letters {
                settings.push(setting(&format!("E{c2}{c3}{c4}")));
            }
        }
    }
    settings.push(setting("YEEE"));
    for p in ["EEEE", "EEXE", "EEYE", "EEEX", "EEXX", "EEYX", "EEEY", "EEXY", "EEYY", "YEEE"] {
        settings.push(setting(&format!("{p}*SWAP12")));
    }
    for p in ["EEEE", "EEEX", "EEEY", "YEEE"] {
        settings.push(setting(&format!("{p}*SWAP13")));
    }
    for p in ["EEEE", "YEEE"] {
        settings.push(setting(&format!("{p}*SWAP14")));
    }
    TomographyPlan { settings }
}

impl TomographyPlan {
    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    pub fn local_patterns(&self) -> usize {
        let set: std::collections::BTreeSet<_> = self.settings.iter().map(|s| s.pulses).collect();
        set.len()
    }

    pub fn swap_gates(&self) -> usize {
        let set: std::collections::BTreeSet<_> = self.settings.iter().filter_map(|s| s.swap).collect();
        set.len()
    }

    /// One setting per line.
    pub fn to_text(&self) -> String {
        self.settings.iter().map(|s| format!("{s}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let settings = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<_>>()?;
        Ok(TomographyPlan { settings })
    }

    pub fn without(&self, index: usize) -> TomographyPlan {
        let mut settings = self.settings.clone();
        settings.remove(index);
        TomographyPlan { settings }
    }
}

/// The detected observables, index `i` = bit pattern `a b2 b3 b4` with
/// `a` selecting σx/σy on spin 1 and `b_k` selecting I/σz on spin k.
pub fn observables() -> Vec<PauliString> {
    (0..N_OBSERVABLES)
        .map(|i| {
            let mut label = String::with_capacity(4);
            label.push(if i & 8 == 0 { 'X' } else { 'Y' });
            for k in (0..3).rev() {
                label.push(if i >> k & 1 == 0 { 'I' } else { 'Z' });
            }
            PauliString::parse(&label).expect("valid label")
        })
        .collect()
}

/// Heisenberg image of `o` through the readout: `S† L† o L S`, a signed Pauli.
fn source_pauli(setting: &ReadoutSetting, o: &PauliString) -> PauliString {
    let mut p = o.clone();
    for (q, pulse) in setting.pulses.iter().enumerate() {
        if let Some(axis) = pulse.axis() {
            let letter = if axis == Axis::X { Pauli::X } else { Pauli::Y };
            let a = PauliString::single(N_SPINS, q, letter).expect("valid qubit");
            // R(π/2)† P R(π/2) = -i P A for anticommuting P
            if !p.commutes(&a).expect("same size") {
                p = p.multiply(&a).expect("same size");
                p = p.with_phase(p.phase() * Phase::MINUS_I);
            }
        }
    }
    if let Some(partner) = setting.swap {
        let b = partner as usize - 1;
        let (la, lb) = (p.letter(0), p.letter(b));
        let bit = |q: usize| 1u64 << (N_SPINS - 1 - q);
        let (mut x, mut z) = (p.x_mask(), p.z_mask());
        for (q, l) in [(0, lb), (b, la)] {
            x &= !bit(q);
            z &= !bit(q);
            if matches!(l, Pauli::X | Pauli::Y) {
                x |= bit(q);
            }
            if matches!(l, Pauli::Z | Pauli::Y) {
                z |= bit(q);
            }
        }
        p = PauliString::from_masks(N_SPINS, x, z, p.phase()).expect("valid masks");
    }
    p
}

/// Where one observable of one setting lands.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageEntry {
    pub setting: usize,
    pub observable: usize,
    pub sign: f64,
}

#[derive(Debug, Clone)]
pub struct Coverage {
    /// Source label (letters only) to the measurements that determine it.
    pub map: BTreeMap<String, Vec<CoverageEntry>>,
    pub complete: bool,
}

impl Coverage {
    /// Number of coefficients determined, identity included.
    pub fn covered(&self) -> usize {
        self.map.len() + usize::from(!self.map.contains_key("IIII"))
    }

    pub fn missing(&self) -> Vec<String> {
        all_labels().into_iter().filter(|l| l != "IIII" && !self.map.contains_key(l)).collect()
    }
}

fn all_labels() -> Vec<String> {
    let letters = ['I', 'X', 'Y', 'Z'];
    (0..256usize)
        .map(|i| (0..4).map(|k| letters[i >> (2 * (3 - k)) & 3]).collect())
        .collect()
}

pub fn plan_coverage(plan: &TomographyPlan) -> Coverage {
    let obs = observables();
    let mut map: BTreeMap<String, Vec<CoverageEntry>> = BTreeMap::new();
    for (si, s) in plan.settings.iter().enumerate() {
        for (oi, o) in obs.iter().enumerate() {
            let p = source_pauli(s, o);
            map.entry(p.label()).or_default().push(CoverageEntry {
                setting: si,
                observable: oi,
                sign: p.phase().sign().expect("Hermitian image"),
            });
        }
    }
    let complete = map.len() + usize::from(!map.contains_key("IIII")) == 256;
    Coverage { map, complete }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub setting: ReadoutSetting,
    pub values: [f64; N_OBSERVABLES],
    pub noise_sigma: f64,
}

/// Applies the readout to `state` and evaluates the 16 observables, adding
/// Gaussian noise of width `noise_sigma` drawn from a generator seeded by
/// `seed`.
pub fn simulate_readout<S: QuantumState>(
    state: &S,
    setting: &ReadoutSetting,
    noise_sigma: f64,
    seed: u64,
) -> Result<MeasurementRecord> {
    if state.n_qubits() != N_SPINS {
        return Err(Error::SizeMismatch {
            left: N_SPINS,
            right: state.n_qubits(),
        });
    }
    let mut st = match setting.swap {
        Some(p) => state.apply_swap(0, p as usize - 1)?,
        // a self-swap is the identity
        None => state.apply_swap(0, 0)?,
    };
    for (q, pulse) in setting.pulses.iter().enumerate() {
        if let Some(axis) = pulse.axis() {
            st = st.apply_single_qubit(q, &rotation_gate(axis, FRAC_PI_2))?;
        }
    }
    let mut values = [0.0; N_OBSERVABLES];
    for (v, o) in values.iter_mut().zip(observables()) {
        *v = st.expectation(&o)?;
    }
    let mut rec = MeasurementRecord {
        setting: *setting,
        values,
        noise_sigma: 0.0,
    };
    add_noise(&mut rec, noise_sigma, seed)?;
    Ok(rec)
}

/// Adds i.i.d. Gaussian noise of width `sigma` to one record.
pub fn add_noise(record: &mut MeasurementRecord, sigma: f64, seed: u64) -> Result<()> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::OutOfRange {
            name: "noise sigma",
            value: sigma,
            range: ">= 0",
        });
    }
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).expect("finite sigma");
        for v in &mut record.values {
            *v += normal.sample(&mut rng);
        }
    }
    record.noise_sigma = (record.noise_sigma.powi(2) + sigma * sigma).sqrt();
    Ok(())
}

/// Seed of setting `index` derived from a run seed.
pub fn setting_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64 + 1)
}

/// Every setting of a plan, in parallel, with per-setting seeds.
pub fn simulate_plan<S: QuantumState + Sync>(
    state: &S,
    plan: &TomographyPlan,
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<MeasurementRecord>> {
    plan.settings
        .par_iter()
        .enumerate()
        .map(|(i, s)| simulate_readout(state, s, noise_sigma, setting_seed(seed, i)))
        .collect()
}

/// Pauli coefficients `Tr(ρP)` by label, averaged over duplicate measurements.
pub fn coefficients(records: &[MeasurementRecord], plan: &TomographyPlan) -> Result<BTreeMap<String, f64>> {
    if records.len() != plan.len() {
        return Err(Error::RecordCount {
            expected: plan.len(),
            got: records.len(),
        });
    }
    for (r, s) in records.iter().zip(&plan.settings) {
        if r.setting != *s {
            return Err(Error::Config(format!("record for {} does not match plan setting {s}", r.setting)));
        }
    }
    let cov = plan_coverage(plan);
    if !cov.complete {
        return Err(Error::IncompleteCoverage { missing: cov.missing() });
    }
    let mut out = BTreeMap::new();
    out.insert("IIII".to_string(), 1.0);
    for (label, entries) in &cov.map {
        if label == "IIII" {
            continue;
        }
        let sum: f64 = entries.iter().map(|e| e.sign * records[e.setting].values[e.observable]).sum();
        out.insert(label.clone(), sum / entries.len() as f64);
    }
    Ok(out)
}

/// Linear inversion `ρ = (1/16) Σ c_P P`, optionally followed by projection
/// onto the nearest density matrix.
pub fn reconstruct(records: &[MeasurementRecord], plan: &TomographyPlan, psd_project: bool) -> Result<DensityMatrix> {
    let coeffs = coefficients(records, plan)?;
    let dim = 1usize << N_SPINS;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for (label, c) in &coeffs {
        let p = PauliString::parse(label)?;
        for col in 0..dim {
            let (row, coeff) = p.act_on_basis(col);
            m[(row, col)] += coeff * (*c / dim as f64);
        }
    }
    let rho = DensityMatrix::from_matrix(N_SPINS, m)?;
    Ok(if psd_project { nearest_density_matrix(&rho) } else { rho })
}

/// Closest unit-trace positive matrix in the 2-norm with the same
/// eigenvectors: negative weight is removed from the bottom of the spectrum
/// and spread evenly over the remaining eigenvalues.
pub fn nearest_density_matrix(rho: &DensityMatrix) -> DensityMatrix {
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let d = vals.len();
    // ascending order: index 0 is the smallest
    let mut lam = vals.clone();
    let mut acc = 0.0;
    let mut kept = d;
    for i in 0..d {
        let remaining = (d - i) as f64;
        if vals[i] + acc / remaining < 0.0 {
            acc += vals[i];
            lam[i] = 0.0;
            kept -= 1;
        } else {
            break;
        }
    }
    if kept < d {
        for l in lam.iter_mut().skip(d - kept) {
            *l += acc / kept as f64;
        }
    }
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, lam.iter().map(|&l| C64::new(l, 0.0))));
    let m = &vecs * diag * vecs.adjoint();
    DensityMatrix::from_matrix(rho.n_qubits(), m).expect("trace and Hermiticity preserved")
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityRow {
    pub sector: (u8, u8),
    pub fidelity: f64,
}

/// Fidelity of each reconstruction against the ideal sector state, in the
/// order `(0,0), (0,1), (1,0), (1,1)`.
pub fn fidelity_table(reconstructions: &[DensityMatrix], ideals: &[StateVector]) -> Result<Vec<FidelityRow>> {
    if reconstructions.len() != 4 || ideals.len() != 4 {
        return Err(Error::RecordCount {
            expected: 4,
            got: reconstructions.len().min(ideals.len()),
        });
    }
    crate::wen::SECTORS
        .iter()
        .zip(reconstructions.iter().zip(ideals))
        .map(|(&sector, (rho, psi))| {
            Ok(FidelityRow {
                sector,
                fidelity: state_fidelity(psi, rho)?,
            })
        })
        .collect()
}

pub fn fidelity_csv(rows: &[FidelityRow]) -> String {
    let mut out = String::from("nu1,nu2,fidelity\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:.12}", r.sector.0, r.sector.1, r.fidelity);
    }
    out
}

/// Columns: setting, noise sigma, then the 16 observables (dimensionless).
pub fn records_csv(records: &[MeasurementRecord]) -> String {
    let mut out = String::from("setting,noise_sigma");
    for o in observables() {
        let _ = write!(out, ",{}", o.label());
    }
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{:.6}", r.setting, r.noise_sigma);
        for v in r.values {
            let _ = write!(out, ",{v:e}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_records_csv(text: &str) -> Result<Vec<MeasurementRecord>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Format {
            line: n + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + N_OBSERVABLES {
            return Err(bad("expected 18 fields"));
        }
        let setting = fields[0].parse()?;
        let noise_sigma = fields[1].parse().map_err(|_| bad("bad noise sigma"))?;
        let mut values = [0.0; N_OBSERVABLES];
        for (v, f) in values.iter_mut().zip(&fields[2..]) {
            *v = f.parse().map_err(|_| bad("bad value"))?;
        }
        out.push(MeasurementRecord {
            setting,
            values,
            noise_sigma,
        });
    }
    Ok(out)
}

fn grid_csv(rho: &DensityMatrix, part: impl Fn(C64) -> f64) -> String {
    let m = rho.matrix();
    let n = rho.n_qubits();
    let bits = |i: usize| format!("{i:0n$b}");
    let mut out = String::from("row");
    for c in 0..m.ncols() {
        let _ = write!(out, ",{}", bits(c));
    }
    out.push('\n');
    for r in 0..m.nrows() {
        out.push_str(&bits(r));
        for c in 0..m.ncols() {
            let _ = write!(out, ",{:.12}", part(m[(r, c)]));
        }
        out.push('\n');
    }
    out
}

/// Real part of ρ as a grid; rows and columns labelled by basis bits.
pub fn real_grid_csv(rho: &DensityMatrix) -> String {
    grid_csv(rho, |z| z.re)
}

pub fn imag_grid_csv(rho: &DensityMatrix) -> String {
    grid_csv(rho, |z| z.im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    /// Partner spins 2..4, `true` for spin down (`|1⟩`).
    pub partners: [bool; 3],
    pub frequency_hz: f64,
    pub amplitude: C64,
}

/// Spin-1 lines after an `R^y(π/2)` readout on spin 1. The line with
/// partner states `b` sits at `ν1 + Σ_k z_k J_1k / 2` (`z = +1` for `|0⟩`)
/// and carries `⟨σx ⊗ |b⟩⟨b|⟩ + i⟨σy ⊗ |b⟩⟨b|⟩ = 2 ρ'[1b, 0b]`.
pub fn emit_stick_spectrum(rho: &DensityMatrix, mol: &MoleculeSpec) -> Result<Vec<SpectralLine>> {
    mol.validate()?;
    if rho.n_qubits() != N_SPINS || mol.n_spins() != N_SPINS {
        return Err(Error::SizeMismatch {
            left: N_SPINS,
            right: rho.n_qubits().max(mol.n_spins()),
        });
    }
    let after = rho.apply_single_qubit(0, &rotation_gate(Axis::Y, FRAC_PI_2))?;
    let m = after.matrix();
    Ok((0..8usize)
        .map(|b| {
            let partners = [b & 4 != 0, b & 2 != 0, b & 1 != 0];
            let shift: f64 = partners
                .iter()
                .enumerate()
                .map(|(k, &down)| if down { -1.0 } else { 1.0 } * mol.j(0, k + 1) / 2.0)
                .sum();
            SpectralLine {
                partners,
                frequency_hz: mol.shifts_hz[0] + shift,
                amplitude: m[(8 | b, b)] * 2.0,
            }
        })
        .collect())
}

pub fn spectrum_csv(lines: &[SpectralLine]) -> String {
    let mut out = String::from("partners,frequency_hz,amplitude_re,amplitude_im\n");
    for l in lines {
        let p: String = l.partners.iter().map(|&d| if d { '1' } else { '0' }).collect();
        let _ = writeln!(out, "{p},{:.6},{:.12},{:.12}", l.frequency_hz, l.amplitude.re, l.amplitude.im);
    }
    out
}
