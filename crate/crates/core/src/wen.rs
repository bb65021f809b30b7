//! The Wen-plaquette model on an N×N torus.
//!
//! Sites sit on the vertices of the square lattice; face `(r, c)` has the
//! four corners `(r,c) (r,c+1) (r+1,c) (r+1,c+1)` taken mod N. Faces with
//! `r + c` even are white and carry `X_p`, the others are yellow and carry
//! `Z_p`.
//!
//! Sites are numbered row by row in serpentine order: row 0 runs left to
//! right, row 1 right to left, and so on. On the 2×2 torus this puts sites
//! 1 and 4 (qubits 0 and 3) in the same column and sites 1 and 2 in the
//! same row.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernel::{
    apply_pauli, expectation, Pauli, PauliString, Phase, QuantumState, StateVector, C64,
    MAX_STATE_QUBITS,
};

/// Largest side length whose sector states are built densely (16 qubits).
pub const MAX_DENSE_SIDE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Yellow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaquette {
    pub id: usize,
    pub row: usize,
    pub col: usize,
    pub color: Color,
    /// Corner qubits; on the 2×2 torus two corners can coincide.
    pub sites: [usize; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusLattice {
    side: usize,
    plaquettes: Vec<Plaquette>,
}

impl TorusLattice {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 || !side.is_multiple_of(2) {
            return Err(Error::OddLattice(side));
        }
        if side * side > crate::kernel::MAX_PAULI_QUBITS {
            return Err(Error::TooManyQubits {
                what: "TorusLattice",
                n_qubits: side * side,
                max: crate::kernel::MAX_PAULI_QUBITS,
            });
        }
        let mut plaquettes = Vec::with_capacity(side * side);
        for row in 0..side {
            for col in 0..side {
                let (r1, c1) = ((row + 1) % side, (col + 1) % side);
                let site = |r, c| site_index(side, r, c);
                plaquettes.push(Plaquette {
                    id: row * side + col,
                    row,
                    col,
                    color: if (row + col) % 2 == 0 {
                        Color::White
                    } else {
                        Color::Yellow
                    },
                    sites: [site(row, col), site(row, c1), site(r1, col), site(r1, c1)],
                });
            }
        }
        Ok(TorusLattice { side, plaquettes })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_sites(&self) -> usize {
        self.side * self.side
    }

    /// Qubit index of the site at `(row, col)`, both taken mod N.
    pub fn site(&self, row: usize, col: usize) -> usize {
        site_index(self.side, row % self.side, col % self.side)
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn plaquette(&self, id: usize) -> Result<&Plaquette> {
        self.plaquettes.get(id).ok_or(Error::InvalidPlaquette {
            id,
            count: self.plaquettes.len(),
        })
    }

    pub fn of_color(&self, color: Color) -> impl Iterator<Item = &Plaquette> {
        self.plaquettes.iter().filter(move |p| p.color == color)
    }
}

fn site_index(side: usize, row: usize, col: usize) -> usize {
    if row.is_multiple_of(2) {
        row * side + col
    } else {
        row * side + (side - 1 - col)
    }
}

pub fn build_lattice(side: usize) -> Result<TorusLattice> {
    TorusLattice::new(side)
}

/// `X_p` on a white plaquette, `Z_p` on a yellow one.
pub fn plaquette_operator(lat: &TorusLattice, id: usize) -> Result<PauliString> {
    let p = lat.plaquette(id)?;
    let letter = match p.color {
        Color::White => Pauli::X,
        Color::Yellow => Pauli::Z,
    };
    PauliString::on_qubits(lat.n_sites(), &p.sites, letter)
}

/// `-Σ_p X_p - Σ_p Z_p` with coincident plaquettes merged.
pub fn build_wen_hamiltonian(lat: &TorusLattice) -> crate::kernel::HamiltonianSpec {
    let mut h = crate::kernel::HamiltonianSpec::zero(lat.n_sites())
        .expect("lattice size already validated");
    for p in lat.plaquettes() {
        let op = plaquette_operator(lat, p.id).expect("valid id");
        h.add_term(-1.0, op).expect("phase +1");
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringPath {
    sites: Vec<usize>,
    closed: bool,
    class: Option<(u8, u8)>,
}

impl StringPath {
    /// A path through explicit sites. `class` is only meaningful for
    /// closed paths and is checked against the x-flavored operator.
    pub fn new(lat: &TorusLattice, sites: Vec<usize>, closed: bool, class: Option<(u8, u8)>) -> Result<Self> {
        if let Some(&s) = sites.iter().find(|&&s| s >= lat.n_sites()) {
            return Err(Error::InvalidSite {
                site: s,
                count: lat.n_sites(),
            });
        }
        let path = StringPath {
            sites,
            closed,
            class,
        };
        if closed {
            let op = string_operator(lat, &path, Flavor::X)?;
            let found = homology_class(lat, &op);
            if found.is_none() {
                return Err(Error::Config("closed path does not commute with every Z_p".into()));
            }
            if class.is_some() && class != found {
                return Err(Error::Config(format!(
                    "declared class {class:?} but path winds as {found:?}"
                )));
            }
            return Ok(StringPath { class: found, ..path });
        }
        Ok(path)
    }

    /// Column 0 wrapped vertically, class (1, 0).
    pub fn gamma1(lat: &TorusLattice) -> StringPath {
        StringPath {
            sites: (0..lat.side()).map(|r| lat.site(r, 0)).collect(),
            closed: true,
            class: Some((1, 0)),
        }
    }

    /// Row 0 wrapped horizontally, class (0, 1).
    pub fn gamma2(lat: &TorusLattice) -> StringPath {
        StringPath {
            sites: (0..lat.side()).map(|c| lat.site(0, c)).collect(),
            closed: true,
            class: Some((0, 1)),
        }
    }

    /// The contractible loop enclosing a set of white plaquettes: the
    /// sites covered an odd number of times.
    pub fn boundary(lat: &TorusLattice, white: &[usize]) -> Result<StringPath> {
        let mut count = vec![0usize; lat.n_sites()];
        for &id in white {
            let p = lat.plaquette(id)?;
            if p.color != Color::White {
                return Err(Error::Config(format!("plaquette {id} is not white")));
            }
            let mut seen = Vec::with_capacity(4);
            for &s in &p.sites {
                if !seen.contains(&s) {
                    seen.push(s);
                    count[s] += 1;
                }
            }
        }
        let sites = (0..lat.n_sites()).filter(|&s| count[s] % 2 == 1).collect();
        Ok(StringPath {
            sites,
            closed: true,
            class: Some((0, 0)),
        })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn class(&self) -> Option<(u8, u8)> {
        self.class
    }
}

/// `Π_{j∈path} σ_j^flavor`; a site visited twice cancels.
pub fn string_operator(lat: &TorusLattice, path: &StringPath, flavor: Flavor) -> Result<PauliString> {
    let n = lat.n_sites();
    let mut mask = 0u64;
    for &s in path.sites() {
        if s >= n {
            return Err(Error::InvalidSite { site: s, count: n });
        }
        mask ^= 1u64 << (n - 1 - s);
    }
    match flavor {
        Flavor::X => PauliString::from_masks(n, mask, 0, Phase::ONE),
        Flavor::Z => PauliString::from_masks(n, 0, mask, Phase::ONE),
    }
}

/// Winding numbers of a pure X-string that commutes with every `Z_p`.
///
/// Read off from anticommutation with the dual Z-strings along row 0
/// (detects vertical winding) and column 0 (horizontal winding).
pub fn homology_class(lat: &TorusLattice, op: &PauliString) -> Option<(u8, u8)> {
    if op.z_mask() != 0 || op.n_qubits() != lat.n_sites() {
        return None;
    }
    for p in lat.of_color(Color::Yellow) {
        let zp = plaquette_operator(lat, p.id).ok()?;
        if !op.commutes(&zp).ok()? {
            return None;
        }
    }
    let row = string_operator(lat, &StringPath::gamma2(lat), Flavor::Z).ok()?;
    let col = string_operator(lat, &StringPath::gamma1(lat), Flavor::Z).ok()?;
    let nu1 = u8::from(!op.commutes(&row).ok()?);
    let nu2 = u8::from(!op.commutes(&col).ok()?);
    Some((nu1, nu2))
}

#[derive(Debug, Clone)]
pub struct ContractibleGroup {
    pub generators: Vec<PauliString>,
}

impl ContractibleGroup {
    pub fn size(&self) -> u128 {
        1u128 << self.generators.len()
    }

    /// Element labeled by the bit pattern `s` over the generators.
    pub fn element(&self, s: u64) -> PauliString {
        let n = self.generators[0].n_qubits();
        let mut out = PauliString::identity(n).expect("valid size");
        for (k, g) in self.generators.iter().enumerate() {
            if s >> k & 1 == 1 {
                out = out.multiply(g).expect("same size");
            }
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = PauliString> + '_ {
        (0..(1u64 << self.generators.len())).map(|s| self.element(s))
    }
}

/// Independent white plaquettes: all but the last, since the product of
/// every white `X_p` is the identity.
pub fn contractible_group(lat: &TorusLattice) -> ContractibleGroup {
    let whites: Vec<usize> = lat.of_color(Color::White).map(|p| p.id).collect();
    let generators = whites[..whites.len() - 1]
        .iter()
        .map(|&id| plaquette_operator(lat, id).expect("valid id"))
        .collect();
    ContractibleGroup { generators }
}

fn check_dense_side(lat: &TorusLattice) -> Result<()> {
    if lat.side() > MAX_DENSE_SIDE || lat.n_sites() > MAX_STATE_QUBITS {
        return Err(Error::TooManyQubits {
            what: "dense sector state",
            n_qubits: lat.n_sites(),
            max: MAX_DENSE_SIDE * MAX_DENSE_SIDE,
        });
    }
    Ok(())
}

/// `(1/√|G|) Σ_{g∈G} g|00…0⟩`.
pub fn ground_state_superposition(lat: &TorusLattice) -> Result<StateVector> {
    check_dense_side(lat)?;
    let group = contractible_group(lat);
    let n = lat.n_sites();
    let mut amps = vec![C64::new(0.0, 0.0); 1usize << n];
    let weight = 1.0 / (group.size() as f64).sqrt();
    for g in group.elements() {
        // X-type strings map |0…0⟩ to |x_mask⟩ with no phase
        amps[g.x_mask() as usize] += C64::new(weight, 0.0);
    }
    StateVector::from_amplitudes(n, amps)
}

pub fn topological_sector(lat: &TorusLattice, nu1: u8, nu2: u8) -> Result<StateVector> {
    if nu1 > 1 || nu2 > 1 {
        return Err(Error::OutOfRange {
            name: "sector index",
            value: nu1.max(nu2) as f64,
            range: "{0, 1}",
        });
    }
    let mut psi = ground_state_superposition(lat)?;
    if nu1 == 1 {
        psi = apply_pauli(&string_operator(lat, &StringPath::gamma1(lat), Flavor::X)?, &psi)?;
    }
    if nu2 == 1 {
        psi = apply_pauli(&string_operator(lat, &StringPath::gamma2(lat), Flavor::X)?, &psi)?;
    }
    Ok(psi)
}

/// The four sectors in the order (0,0), (0,1), (1,0), (1,1).
pub const SECTORS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

pub fn all_sectors(lat: &TorusLattice) -> Result<Vec<StateVector>> {
    SECTORS
        .iter()
        .map(|&(a, b)| topological_sector(lat, a, b))
        .collect()
}

/// `|⟨ψ_a|ψ_b⟩|` over the four sectors.
pub fn sector_gram_matrix(lat: &TorusLattice) -> Result<[[f64; 4]; 4]> {
    let states = all_sectors(lat)?;
    let mut g = [[0.0; 4]; 4];
    for (a, sa) in states.iter().enumerate() {
        for (b, sb) in states.iter().enumerate() {
            g[a][b] = sa.inner(sb)?.norm();
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerEntry {
    pub plaquette: usize,
    pub color: Color,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerReport {
    pub entries: Vec<StabilizerEntry>,
    pub tol: f64,
}

impl StabilizerReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| (e.value - 1.0).abs() <= self.tol)
    }

    pub fn min_value(&self) -> f64 {
        self.entries.iter().map(|e| e.value).fold(f64::INFINITY, f64::min)
    }
}

pub const STABILIZER_TOL: f64 = 1e-9;

/// `⟨X_p⟩` and `⟨Z_p⟩` for every plaquette.
pub fn verify_stabilizers<S: QuantumState>(lat: &TorusLattice, state: &S) -> Result<StabilizerReport> {
    if state.n_qubits() != lat.n_sites() {
        return Err(Error::SizeMismatch {
            left: lat.n_sites(),
            right: state.n_qubits(),
        });
    }
    let entries = lat
        .plaquettes()
        .iter()
        .map(|p| {
            Ok(StabilizerEntry {
                plaquette: p.id,
                color: p.color,
                value: expectation(&plaquette_operator(lat, p.id)?, state)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(StabilizerReport {
        entries,
        tol: STABILIZER_TOL,
    })
}

/// `index bits re im` per nonzero amplitude, one line each.
pub fn amplitude_table(psi: &StateVector, tol: f64) -> String {
    let n = psi.n_qubits();
    let mut out = String::from("# index basis re im\n");
    for (i, a) in psi.support(tol) {
        let _ = writeln!(out, "{i} {:0width$b} {:.12} {:.12}", i, a.re, a.im, width = n);
    }
    out
}
