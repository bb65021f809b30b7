use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{HamiltonianSpec, Pauli, PauliString};

/// Spin system parameters in the rotating frame.
///
/// Shifts and couplings are given in Hz; [`MoleculeSpec::omega`] returns the
/// angular shift `2π·ν` used in the Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeSpec {
    #[serde(default)]
    pub name: String,
    pub shifts_hz: Vec<f64>,
    pub j_hz: Vec<Vec<f64>>,
    /// Longitudinal relaxation times in seconds; stored, not simulated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1_s: Option<Vec<f64>>,
    /// Transverse relaxation times in seconds; stored, not simulated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_s: Option<Vec<f64>>,
}

const SYNTHETIC_SHIFTS_HZ: [f64; 4] = [15_800.0, 6_200.0, -14_500.0, 4_100.0];

impl MoleculeSpec {
    pub fn new(shifts_hz: Vec<f64>, j_hz: Vec<Vec<f64>>) -> Result<Self> {
        let m = MoleculeSpec {
            name: String::new(),
            shifts_hz,
            j_hz,
            t1_s: None,
            t2_s: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// Illustrative four-spin molecule with only J12, J13 and J34 nonzero.
    pub fn synthetic_three_coupling() -> Self {
        let mut j = vec![vec![0.0; 4]; 4];
        set_pair(&mut j, 0, 1, 35.0);
        set_pair(&mut j, 0, 2, 60.0);
        set_pair(&mut j, 2, 3, 20.0);
        MoleculeSpec {
            name: "synthetic-three-coupling".into(),
            shifts_hz: SYNTHETIC_SHIFTS_HZ.to_vec(),
            j_hz: j,
            t1_s: None,
            t2_s: None,
        }
    }

    /// Same shifts with all six couplings nonzero.
    pub fn synthetic_full() -> Self {
        let mut m = Self::synthetic_three_coupling();
        set_pair(&mut m.j_hz, 0, 3, 12.0);
        set_pair(&mut m.j_hz, 1, 2, 25.0);
        set_pair(&mut m.j_hz, 1, 3, 48.0);
        m.name = "synthetic-full".into();
        m
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let m: MoleculeSpec = toml::from_str(text).map_err(|e| Error::InvalidMolecule(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("molecule serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.shifts_hz.len();
        if n == 0 {
            return Err(Error::InvalidMolecule("no spins".into()));
        }
        if let Some(v) = self.shifts_hz.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidMolecule(format!("non-finite shift {v}")));
        }
        if self.j_hz.len() != n || self.j_hz.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMolecule(format!(
                "coupling matrix must be {n}x{n}"
            )));
        }
        for j in 0..n {
            if self.j_hz[j][j] != 0.0 {
                return Err(Error::InvalidMolecule(format!("J[{j}][{j}] must be zero")));
            }
            for k in 0..n {
                if !self.j_hz[j][k].is_finite() {
                    return Err(Error::InvalidMolecule(format!("non-finite J[{j}][{k}]")));
                }
                if self.j_hz[j][k] != self.j_hz[k][j] {
                    return Err(Error::AsymmetricCoupling { j, k });
                }
            }
        }
        for times in [&self.t1_s, &self.t2_s].into_iter().flatten() {
            if times.len() != n {
                return Err(Error::InvalidMolecule("relaxation list length differs from spin count".into()));
            }
        }
        Ok(())
    }

    pub fn n_spins(&self) -> usize {
        self.shifts_hz.len()
    }

    /// Angular shift `2π ν_j` in rad/s (0-based spin).
    pub fn omega(&self, j: usize) -> f64 {
        2.0 * PI * self.shifts_hz[j]
    }

    /// Coupling in Hz (0-based spins).
    pub fn j(&self, a: usize, b: usize) -> f64 {
        self.j_hz[a][b]
    }
}

fn set_pair(j: &mut [Vec<f64>], a: usize, b: usize, v: f64) {
    j[a][b] = v;
    j[b][a] = v;
}

/// `Σ_j (ω_j/2) σz_j + Σ_{j<k} (π J_jk / 2) σz_j σz_k`, in rad/s.
pub fn nmr_hamiltonian(mol: &MoleculeSpec) -> Result<HamiltonianSpec> {
    mol.validate()?;
    let n = mol.n_spins();
    let mut h = HamiltonianSpec::zero(n)?;
    for j in 0..n {
        h.add_term(mol.omega(j) / 2.0, PauliString::single(n, j, Pauli::Z)?)?;
    }
    for j in 0..n {
        for k in j + 1..n {
            h.add_term(PI * mol.j(j, k) / 2.0, PauliString::on_qubits(n, &[j, k], Pauli::Z)?)?;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_molecule_gives_zero_hamiltonian() {
        let m = MoleculeSpec::new(vec![0.0; 4], vec![vec![0.0; 4]; 4]).unwrap();
        let h = nmr_hamiltonian(&m).unwrap();
        assert!(h.terms().is_empty());
    }

    #[test]
    fn diagonal_and_top_entry() {
        let m = MoleculeSpec::synthetic_full();
        let h = nmr_hamiltonian(&m).unwrap();
        assert!(h.is_diagonal());
        let d = h.dense();
        for r in 0..16 {
            for c in 0..16 {
                if r != c {
                    assert_eq!(d[(r, c)].norm(), 0.0);
                }
            }
        }
        let mut want = 0.0;
        for j in 0..4 {
            want += m.omega(j) / 2.0;
            for k in j + 1..4 {
                want += PI * m.j(j, k) / 2.0;
            }
        }
        assert!((d[(0, 0)].re - want).abs() < 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn asymmetric_coupling_rejected() {
        let mut j = vec![vec![0.0; 2]; 2];
        j[0][1] = 10.0;
        assert!(matches!(
            MoleculeSpec::new(vec![1.0, 2.0], j),
            Err(Error::AsymmetricCoupling { .. })
        ));
    }

    #[test]
    fn toml_round_trip() {
        let m = MoleculeSpec::synthetic_full();
        let back = MoleculeSpec::from_toml(&m.to_toml()).unwrap();
        assert_eq!(back, m);
        let text = "shifts_hz = [1.0, 2.0]\nj_hz = [[0.0, 5.0], [5.0, 0.0]]\nt1_s = [1.0, 2.0]\n";
        let parsed = MoleculeSpec::from_toml(text).unwrap();
        assert_eq!(parsed.j(0, 1), 5.0);
        assert!(MoleculeSpec::from_toml("shifts_hz = [1.0]\nj_hz = [[1.0]]\n").is_err());
        assert!(MoleculeSpec::from_toml("shifts_hz = [1.0]\n").is_err());
    }
}
