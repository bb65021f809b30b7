use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::kernel::{
    apply_pauli_exponential, apply_rotation, Axis, HamiltonianSpec, PauliString, QuantumState,
    StateVector,
};
use crate::wen::{build_wen_hamiltonian, TorusLattice};

use super::h0;

/// `Π exp(-i c t P)` over the terms of a Hamiltonian whose terms commute.
fn commuting_exponential(h: &HamiltonianSpec, t: f64, psi: &StateVector) -> Result<StateVector> {
    let mut out = psi.clone();
    for (c, p) in h.terms() {
        out = apply_pauli_exponential(c * t, p, &out)?;
    }
    Ok(out)
}

fn check(lat: &TorusLattice, s: f64, psi: &StateVector) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            range: "[0, 1]",
        });
    }
    if psi.n_qubits() != lat.n_sites() {
        return Err(Error::SizeMismatch {
            left: lat.n_sites(),
            right: psi.n_qubits(),
        });
    }
    Ok(())
}

/// `e^{-i(1-s)H0 τ/2} e^{-i s H_Wen τ} e^{-i(1-s)H0 τ/2} |ψ⟩`.
///
/// Both halves are products of commuting Pauli exponentials, so no dense
/// matrix is formed and the step works at any lattice size.
pub fn trotter_step(lat: &TorusLattice, s: f64, tau: f64, psi: &StateVector) -> Result<StateVector> {
    check(lat, s, psi)?;
    let field = h0(lat.n_sites())?;
    let wen = build_wen_hamiltonian(lat);
    let mut out = commuting_exponential(&field, (1.0 - s) * tau / 2.0, psi)?;
    out = commuting_exponential(&wen, s * tau, &out)?;
    commuting_exponential(&field, (1.0 - s) * tau / 2.0, &out)
}

/// The 2×2 Wen step built from one four-body `Z` exponential and global
/// `y` rotations:
/// `Π R^y(π/2) · e^{+i2sτZ_p} · Π R^y(-π/2) · e^{+i2sτZ_p}`.
pub fn wen_step_unitary(lat: &TorusLattice, s: f64, tau: f64, psi: &StateVector) -> Result<StateVector> {
    if lat.side() != 2 {
        return Err(Error::Config(format!(
            "the rotation-conjugated Wen step exists only for the 2x2 torus, got N={}",
            lat.side()
        )));
    }
    check(lat, s, psi)?;
    let zp = PauliString::parse("ZZZZ")?;
    let rotate_all = |angle: f64, state: &StateVector| -> Result<StateVector> {
        let mut out = state.clone();
        for q in 0..4 {
            out = apply_rotation(q, Axis::Y, angle, &out)?;
        }
        Ok(out)
    };
    let mut out = apply_pauli_exponential(-2.0 * s * tau, &zp, psi)?;
    out = rotate_all(-FRAC_PI_2, &out)?;
    out = apply_pauli_exponential(-2.0 * s * tau, &zp, &out)?;
    rotate_all(FRAC_PI_2, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::interpolated_hamiltonian;
    use crate::kernel::testing::{expm_minus_i, random_amplitudes};
    use crate::kernel::C64;
    use crate::wen::build_lattice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn endpoints_are_exact() {
        let lat = build_lattice(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = StateVector::from_amplitudes(4, random_amplitudes(&mut rng, 4)).unwrap();
        for s in [0.0, 1.0] {
            let h = interpolated_hamiltonian(&lat, s).unwrap().dense();
            let want = psi.apply_matrix(&expm_minus_i(&h, 0.7)).unwrap();
            assert!(max_diff(&trotter_step(&lat, s, 0.7, &psi).unwrap(), &want) < 1e-12);
        }
    }

    #[test]
    fn wen_step_matches_dense_exponential() {
        let lat = build_lattice(2).unwrap();
        let hw = build_wen_hamiltonian(&lat).dense();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let s: f64 = rng.random();
            let tau: f64 = rng.random_range(0.0..1.0);
            let psi = StateVector::from_amplitudes(4, random_amplitudes(&mut rng, 4)).unwrap();
            let want = psi.apply_matrix(&expm_minus_i(&(&hw * C64::new(s, 0.0)), tau)).unwrap();
            let got = wen_step_unitary(&lat, s, tau, &psi).unwrap();
            assert!(max_diff(&got, &want) < 1e-12);
        }
        let psi = StateVector::from_bits("0110").unwrap();
        assert!(max_diff(&wen_step_unitary(&lat, 0.0, 0.4, &psi).unwrap(), &psi) < 1e-15);
        let lat4 = build_lattice(4).unwrap();
        assert!(wen_step_unitary(&lat4, 0.5, 0.1, &StateVector::zero(16).unwrap()).is_err());
    }

    #[test]
    fn step_error_is_third_order() {
        let lat = build_lattice(2).unwrap();
        let h = interpolated_hamiltonian(&lat, 0.5).unwrap().dense();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let psi = StateVector::from_amplitudes(4, random_amplitudes(&mut rng, 4)).unwrap();
        let taus: Vec<f64> = (0..9).map(|k| 1e-3 * 10f64.powf(k as f64 / 4.0)).collect();
        let errs: Vec<f64> = taus
            .iter()
            .map(|&t| {
                let want = psi.apply_matrix(&expm_minus_i(&h, t)).unwrap();
                let got = trotter_step(&lat, 0.5, t, &psi).unwrap();
                got.amplitudes()
                    .iter()
                    .zip(want.amplitudes())
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = taus.iter().zip(&errs).map(|(t, e)| (t.ln(), e.ln())).unzip();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope - 3.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn works_without_dense_matrices_at_n4() {
        let lat = build_lattice(4).unwrap();
        let psi = StateVector::zero(16).unwrap();
        let out = trotter_step(&lat, 0.3, 0.1, &psi).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }
}
