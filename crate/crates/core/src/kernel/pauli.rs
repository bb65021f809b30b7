//! Pauli strings as paired X/Z bitmasks with a tracked phase.
//!
//! A string on `n` qubits is stored as `phase · ⊗_q σ(x_q, z_q)` where
//! `σ(0,0)=I`, `σ(1,0)=X`, `σ(0,1)=Z` and `σ(1,1)=Y`. Qubit `q` (0-based)
//! occupies bit `n-1-q` of both masks, the same bit it occupies in a
//! computational-basis index, so qubit 0 is the most significant bit.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::C64;

/// Largest register a bitmask string can describe.
pub const MAX_PAULI_QUBITS: usize = 64;

/// A power of `i`: `+1`, `+i`, `-1` or `-i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    /// `i^k` for any integer exponent.
    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    /// `+1.0` or `-1.0` for real phases.
    pub fn sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::from_masks(n_qubits, 0, 0, Phase::ONE)
    }

    pub fn from_masks(n_qubits: usize, x_mask: u64, z_mask: u64, phase: Phase) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_PAULI_QUBITS {
            return Err(Error::TooManyQubits {
                what: "PauliString",
                n_qubits,
                max: MAX_PAULI_QUBITS,
            });
        }
        let valid = full_mask(n_qubits);
        if (x_mask | z_mask) & !valid != 0 {
            return Err(Error::QubitIndex {
                index: 64 - (x_mask | z_mask).leading_zeros() as usize,
                n_qubits,
            });
        }
        Ok(PauliString {
            n_qubits,
            x_mask,
            z_mask,
            phase,
        })
    }

    /// The same letter on every listed qubit, identity elsewhere.
    pub fn on_qubits(n_qubits: usize, qubits: &[usize], letter: Pauli) -> Result<Self> {
        let mut p = Self::identity(n_qubits)?;
        let (xb, zb) = letter.bits();
        for &q in qubits {
            if q >= n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits });
            }
            let bit = p.bit(q);
            if xb {
                p.x_mask |= bit;
            }
            if zb {
                p.z_mask |= bit;
            }
        }
        Ok(p)
    }

    pub fn single(n_qubits: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        Self::on_qubits(n_qubits, &[qubit], letter)
    }

    /// Parses a label such as `"XZIY"`; the first character is qubit 0.
    pub fn parse(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        if chars.is_empty() {
            return Err(Error::EmptyLabel);
        }
        let n = chars.len();
        let mut p = Self::identity(n)?;
        for (pos, ch) in chars.into_iter().enumerate() {
            let letter = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::PauliParse { pos, ch }),
            };
            let (xb, zb) = letter.bits();
            let bit = p.bit(pos);
            if xb {
                p.x_mask |= bit;
            }
            if zb {
                p.z_mask |= bit;
            }
        }
        Ok(p)
    }

    #[inline]
    fn bit(&self, qubit: usize) -> u64 {
        1u64 << (self.n_qubits - 1 - qubit)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        PauliString {
            phase,
            ..self.clone()
        }
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        let bit = self.bit(qubit);
        Pauli::from_bits(self.x_mask & bit != 0, self.z_mask & bit != 0)
    }

    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Hermitian iff the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Letters only, without the phase.
    pub fn label(&self) -> String {
        (0..self.n_qubits).map(|q| self.letter(q).letter()).collect()
    }

    fn check_size(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Number of `Y` letters; `⊗σ = i^{ny} X^x Z^z`.
    fn y_count(&self) -> i64 {
        (self.x_mask & self.z_mask).count_ones() as i64
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_size(other)?;
        let x = self.x_mask ^ other.x_mask;
        let z = self.z_mask ^ other.z_mask;
        // Z^{z_a} X^{x_b} = (-1)^{|z_a & x_b|} X^{x_b} Z^{z_a}
        let swaps = (self.z_mask & other.x_mask).count_ones() as i64;
        let ny_out = (x & z).count_ones() as i64;
        let k = self.phase.power() as i64
            + other.phase.power() as i64
            + self.y_count()
            + other.y_count()
            + 2 * swaps
            - ny_out;
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x_mask: x,
            z_mask: z,
            phase: Phase::from_power(k),
        })
    }

    /// Symplectic form: strings commute iff the overlap parity is even.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_size(other)?;
        let overlap =
            (self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones();
        Ok(overlap.is_multiple_of(2))
    }

    /// Image of basis state `b`: `P|b⟩ = coeff · |b ⊕ x⟩`.
    #[inline]
    pub fn act_on_basis(&self, b: usize) -> (usize, C64) {
        let b64 = b as u64;
        let sign_flips = (self.z_mask & b64).count_ones() as i64;
        let k = self.phase.power() as i64 + self.y_count() + 2 * sign_flips;
        ((b64 ^ self.x_mask) as usize, Phase::from_power(k).to_complex())
    }

    /// Dense `2^n × 2^n` rendering. Only sensible for small registers.
    pub fn dense(&self) -> DMatrix<C64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (row, c) = self.act_on_basis(col);
            m[(row, col)] = c;
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.power() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{}{}", prefix, self.label())
    }
}

pub(crate) fn full_mask(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}
