use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{apply_rotation, Axis, QuantumState, StateVector, C64, DEFAULT_DENSE_CAP};

use super::{nmr_hamiltonian, MoleculeSpec};

/// A hardware-native event. Spins are 0-based here and 1-based in text.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    /// Instantaneous `Π_{j∈spins} R_j^axis(angle)`.
    Rotation { spins: Vec<usize>, axis: Axis, angle: f64 },
    /// Free evolution under the molecule Hamiltonian, in seconds.
    Delay { seconds: f64 },
}

impl Event {
    pub fn rot(spins: &[usize], axis: Axis, angle: f64) -> Event {
        Event::Rotation {
            spins: spins.to_vec(),
            axis,
            angle,
        }
    }

    pub fn delay(seconds: f64) -> Event {
        Event::Delay { seconds }
    }

    pub fn is_delay(&self) -> bool {
        matches!(self, Event::Delay { .. })
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Rotation { spins, axis, angle } => {
                let list: Vec<String> = spins.iter().map(|s| (s + 1).to_string()).collect();
                write!(f, "ROT {} {} {:.17e}", list.join(","), axis.letter().to_ascii_lowercase(), angle)
            }
            Event::Delay { seconds } => write!(f, "DELAY {seconds:.17e}"),
        }
    }
}

/// Events in time order: `events[0]` acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    n_spins: usize,
    events: Vec<Event>,
}

impl PulseSequence {
    pub fn new(n_spins: usize) -> Self {
        PulseSequence {
            n_spins,
            events: Vec::new(),
        }
    }

    pub fn from_events(n_spins: usize, events: Vec<Event>) -> Result<Self> {
        let mut seq = Self::new(n_spins);
        for e in events {
            seq.push(e)?;
        }
        Ok(seq)
    }

    pub fn push(&mut self, event: Event) -> Result<()> {
        match &event {
            Event::Rotation { spins, angle, .. } => {
                if spins.is_empty() {
                    return Err(Error::Config("rotation on no spins".into()));
                }
                if let Some(&s) = spins.iter().find(|&&s| s >= self.n_spins) {
                    return Err(Error::QubitIndex {
                        index: s,
                        n_qubits: self.n_spins,
                    });
                }
                let mut sorted = spins.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != spins.len() {
                    return Err(Error::Config(format!("repeated spin in rotation {spins:?}")));
                }
                if !angle.is_finite() {
                    return Err(Error::Config(format!("non-finite rotation angle {angle}")));
                }
            }
            Event::Delay { seconds } => {
                if !(seconds.is_finite() && *seconds >= 0.0) {
                    return Err(Error::Config(format!("delay must be finite and >= 0, got {seconds}")));
                }
            }
        }
        self.events.push(event);
        Ok(())
    }

    pub fn extend(&mut self, other: &PulseSequence) -> Result<()> {
        for e in other.events() {
            self.push(e.clone())?;
        }
        Ok(())
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn total_delay(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                Event::Delay { seconds } => *seconds,
                _ => 0.0,
            })
            .sum()
    }

    /// Line format: `SPINS n`, then one `ROT 1,2 y angle` or
    /// `DELAY seconds` per event. `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut out = format!("SPINS {}\n", self.n_spins);
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut seq: Option<PulseSequence> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let bad = |msg: String| Error::Format { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (fields[0], seq.as_mut()) {
                ("SPINS", None) if fields.len() == 2 => {
                    let n = fields[1].parse().map_err(|e| bad(format!("spin count: {e}")))?;
                    seq = Some(PulseSequence::new(n));
                }
                ("SPINS", _) => return Err(bad("SPINS must appear once, first".into())),
                (_, None) => return Err(bad("sequence must start with SPINS n".into())),
                ("ROT", Some(s)) if fields.len() == 4 => {
                    let spins = fields[1]
                        .split(',')
                        .map(|t| match t.parse::<usize>() {
                            Ok(v) if v >= 1 => Ok(v - 1),
                            _ => Err(bad(format!("bad spin {t:?}"))),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let axis = fields[2]
                        .chars()
                        .next()
                        .and_then(|c| Axis::from_letter(c.to_ascii_uppercase()))
                        .filter(|_| fields[2].len() == 1)
                        .ok_or_else(|| bad(format!("bad axis {:?}", fields[2])))?;
                    let angle = fields[3].parse().map_err(|e| bad(format!("angle: {e}")))?;
                    s.push(Event::Rotation { spins, axis, angle }).map_err(|e| bad(e.to_string()))?;
                }
                ("DELAY", Some(s)) if fields.len() == 2 => {
                    let seconds = fields[1].parse().map_err(|e| bad(format!("delay: {e}")))?;
                    s.push(Event::Delay { seconds }).map_err(|e| bad(e.to_string()))?;
                }
                (other, _) => return Err(bad(format!("unrecognized line starting {other:?}"))),
            }
        }
        seq.ok_or(Error::Format {
            line: 0,
            msg: "empty sequence file".into(),
        })
    }
}

/// Diagonal of `exp(-i H t)` for the molecule's (diagonal) Hamiltonian.
pub fn delay_phases(mol: &MoleculeSpec, seconds: f64) -> Result<Vec<C64>> {
    let diag = nmr_hamiltonian(mol)?
        .diagonal()
        .expect("NMR Hamiltonian is diagonal");
    Ok(diag.iter().map(|e| C64::from_polar(1.0, -e * seconds)).collect())
}

fn check_spins(mol: &MoleculeSpec, seq: &PulseSequence, n_state: usize) -> Result<()> {
    if seq.n_spins() != mol.n_spins() {
        return Err(Error::SizeMismatch {
            left: mol.n_spins(),
            right: seq.n_spins(),
        });
    }
    if n_state != mol.n_spins() {
        return Err(Error::SizeMismatch {
            left: mol.n_spins(),
            right: n_state,
        });
    }
    Ok(())
}

/// Ideal instantaneous rotations and exact free evolution.
pub fn simulate_sequence<S: QuantumState>(mol: &MoleculeSpec, seq: &PulseSequence, state: &S) -> Result<S> {
    check_spins(mol, seq, state.n_qubits())?;
    let diag = nmr_hamiltonian(mol)?
        .diagonal()
        .expect("NMR Hamiltonian is diagonal");
    let mut out = state.clone();
    for e in seq.events() {
        out = match e {
            Event::Rotation { spins, axis, angle } => {
                let mut st = out;
                for &q in spins {
                    st = apply_rotation(q, *axis, *angle, &st)?;
                }
                st
            }
            Event::Delay { seconds } => {
                let phases: Vec<C64> = diag.iter().map(|e| C64::from_polar(1.0, -e * seconds)).collect();
                out.apply_diagonal(&phases)?
            }
        };
    }
    Ok(out)
}

/// Dense product of the event unitaries, last event leftmost.
pub fn sequence_unitary(mol: &MoleculeSpec, seq: &PulseSequence) -> Result<DMatrix<C64>> {
    if mol.n_spins() > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCap {
            n_qubits: mol.n_spins(),
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let n = mol.n_spins();
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let out = simulate_sequence(mol, seq, &StateVector::basis(n, col)?)?;
        u.set_column(col, &out.to_column());
    }
    Ok(u)
}

/// `|Tr(U† V)| / d`, insensitive to global phase.
pub fn unitary_equivalence(u: &DMatrix<C64>, v: &DMatrix<C64>) -> Result<f64> {
    if u.shape() != v.shape() || u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch {
            left: u.nrows(),
            right: v.nrows(),
        });
    }
    let tr: C64 = (0..u.ncols())
        .map(|c| u.column(c).iter().zip(v.column(c).iter()).map(|(a, b)| a.conj() * b).sum::<C64>())
        .sum();
    Ok(tr.norm() / u.nrows() as f64)
}
