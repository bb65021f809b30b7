//! Dense Kronecker-product oracles used by unit tests.
//!
//! Everything here is built from literal 2×2 matrices and `kronecker`
//! products, never from the bitmask machinery it is used to check.

use nalgebra::DMatrix;
use rand::Rng;

use crate::kernel::C64;

pub fn pauli_2x2(letter: char) -> DMatrix<C64> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match letter {
        'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("bad letter {letter}"),
    }
}

/// `σ_{label[0]} ⊗ σ_{label[1]} ⊗ ...` with qubit 0 leftmost.
pub fn kron_labels(label: &str) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for ch in label.chars() {
        out = out.kronecker(&pauli_2x2(ch));
    }
    out
}

/// Embeds a single-qubit matrix on `qubit` of an `n`-qubit register.
pub fn embed_1q(n: usize, qubit: usize, m: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for q in 0..n {
        if q == qubit {
            out = out.kronecker(m);
        } else {
            out = out.kronecker(&pauli_2x2('I'));
        }
    }
    out
}

/// Matrix exponential `exp(-i t H)` by scaling and squaring of a Taylor series.
pub fn expm_minus_i(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let a = h * C64::new(0.0, -t);
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * a.nrows() as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * C64::new(scale, 0.0);
    let dim = a.nrows();
    let mut result = DMatrix::<C64>::identity(dim, dim);
    let mut term = DMatrix::<C64>::identity(dim, dim);
    for k in 1..30 {
        term = &term * &a * C64::new(1.0 / k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn dense_close(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

pub fn random_label<R: Rng>(rng: &mut R, n: usize) -> String {
    (0..n)
        .map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)])
        .collect()
}

pub fn random_amplitudes<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    let dim = 1usize << n;
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}
