use crate::error::{Error, Result};
use crate::kernel::pauli::PauliString;
use crate::kernel::state::{QuantumState, StateVector};
use crate::kernel::C64;

/// `P|ψ⟩` without materializing `P`.
pub fn apply_pauli(p: &PauliString, psi: &StateVector) -> Result<StateVector> {
    if p.n_qubits() != psi.n_qubits() {
        return Err(Error::SizeMismatch {
            left: p.n_qubits(),
            right: psi.n_qubits(),
        });
    }
    let amps = psi.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (b, amp) in amps.iter().enumerate() {
        let (target, coeff) = p.act_on_basis(b);
        out[target] = coeff * amp;
    }
    Ok(StateVector::from_raw(psi.n_qubits(), out))
}

/// `exp(-iθP)|ψ⟩ = cos θ |ψ⟩ - i sin θ P|ψ⟩` for Hermitian `P`.
pub fn apply_pauli_exponential(theta: f64, p: &PauliString, psi: &StateVector) -> Result<StateVector> {
    if !p.is_hermitian() {
        return Err(Error::NonHermitian(p.phase()));
    }
    let p_psi = apply_pauli(p, psi)?;
    Ok(psi.scaled_add(
        C64::new(theta.cos(), 0.0),
        &p_psi,
        C64::new(0.0, -theta.sin()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::testing::*;
    use crate::kernel::Phase;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    #[test]
    fn identity_leaves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let psi = StateVector::from_amplitudes(3, random_amplitudes(&mut rng, 3)).unwrap();
        let id = PauliString::identity(3).unwrap();
        assert_eq!(apply_pauli(&id, &psi).unwrap(), psi);
    }

    #[test]
    fn x1x2_maps_ghz_sector() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let mut amps = vec![C64::new(0.0, 0.0); 16];
        amps[0b0000] = h;
        amps[0b1111] = h;
        let ghz = StateVector::from_amplitudes(4, amps).unwrap();
        let x12 = PauliString::parse("XXII").unwrap();
        let out = apply_pauli(&x12, &ghz).unwrap();
        let support: Vec<usize> = out.support(1e-12).into_iter().map(|(i, _)| i).collect();
        assert_eq!(support, vec![0b0011, 0b1100]);
        assert!(out.support(1e-12).iter().all(|(_, a)| (a - h).norm() < 1e-15));
    }

    #[test]
    fn random_paulis_match_dense_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let label = random_label(&mut rng, 4);
            let phase = Phase::from_power(rng.random_range(0..4));
            let p = PauliString::parse(&label).unwrap().with_phase(phase);
            let psi = StateVector::from_amplitudes(4, random_amplitudes(&mut rng, 4)).unwrap();
            let dense = kron_labels(&label) * phase.to_complex();
            let expected = psi.apply_matrix(&dense).unwrap();
            let got = apply_pauli(&p, &psi).unwrap();
            for (a, b) in got.amplitudes().iter().zip(expected.amplitudes()) {
                assert!((a - b).norm() < 1e-14);
            }
            assert!((got.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_zero_angle() {
        let psi = StateVector::from_bits("01").unwrap();
        let p = PauliString::parse("XY").unwrap();
        let out = apply_pauli_exponential(0.0, &p, &psi).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn exponential_half_pi_x_on_zero() {
        let psi = StateVector::zero(1).unwrap();
        let x = PauliString::parse("X").unwrap();
        let out = apply_pauli_exponential(FRAC_PI_2, &x, &psi).unwrap();
        let dense = expm_minus_i(&pauli_2x2('X'), FRAC_PI_2);
        let expected = psi.apply_matrix(&dense).unwrap();
        assert!((out.amplitudes()[1] - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(out.amplitudes()[0].norm() < 1e-15);
        for (a, b) in out.amplitudes().iter().zip(expected.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn exponential_matches_dense_expm() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let label = random_label(&mut rng, 3);
            let theta = rng.random_range(-3.0..3.0);
            let sign = if rng.random::<bool>() { Phase::ONE } else { Phase::MINUS_ONE };
            let p = PauliString::parse(&label).unwrap().with_phase(sign);
            let psi = StateVector::from_amplitudes(3, random_amplitudes(&mut rng, 3)).unwrap();
            let dense = kron_labels(&label) * sign.to_complex();
            let expected = psi.apply_matrix(&expm_minus_i(&dense, theta)).unwrap();
            let got = apply_pauli_exponential(theta, &p, &psi).unwrap();
            for (a, b) in got.amplitudes().iter().zip(expected.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_rejects_non_hermitian() {
        let psi = StateVector::zero(1).unwrap();
        let p = PauliString::parse("X").unwrap().with_phase(Phase::I);
        assert!(matches!(
            apply_pauli_exponential(0.3, &p, &psi),
            Err(Error::NonHermitian(_))
        ));
    }
}
