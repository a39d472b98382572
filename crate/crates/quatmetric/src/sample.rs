//! Seeded random generators for matrices and model parameters.
//!
//! The invariant suite and the property tests both draw from here so that a
//! manifest seed reproduces every randomized check byte-for-byte.

use num_complex::Complex64;
use rand::Rng;

use crate::qmatrix::{QMatrix, QVector};
use crate::quat::Quaternion;

pub fn random_quaternion<R: Rng>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

/// Dense matrix with components uniform in [-1, 1].
pub fn random_qmatrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    let mut m = QMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = random_quaternion(rng);
        }
    }
    m
}

pub fn random_qvector<R: Rng>(rng: &mut R, dim: usize) -> QVector {
    QVector::new((0..dim).map(|_| random_quaternion(rng)).collect())
}

/// Invertible matrix, redrawn until the embedding condition number is mild.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let m = random_qmatrix(rng, n, n);
        if let Ok((smin, smax)) = m.singular_value_range() {
            if smin > 0.05 * smax {
                return m;
            }
        }
    }
}

/// Anti-Hermitian matrix: (G - G†)/2 for random G.
pub fn random_anti_hermitian<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let g = random_qmatrix(rng, n, n);
    g.sub(&g.adjoint()).unwrap().scale(0.5)
}

/// Hermitian matrix: (G + G†)/2 for random G.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let g = random_qmatrix(rng, n, n);
    g.add(&g.adjoint()).unwrap().scale(0.5)
}

/// Diagonalizable matrix with imaginary spectrum: T·diag(i·e_k)·T⁻¹ with
/// energies e_k drawn from [0.2, 3.0].
pub fn random_quasi_anti_hermitian<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let t = random_invertible(rng, n);
    let mut d = QMatrix::zeros(n, n);
    for k in 0..n {
        d[(k, k)] = Quaternion::from_complex(Complex64::new(0.0, rng.gen_range(0.2..3.0)));
    }
    t.matmul(&d).unwrap().matmul(&t.inverse().unwrap()).unwrap()
}

/// Similarity-conjugated diagonal with at least one real spectral part ≥ `re`.
pub fn random_real_part_spectrum<R: Rng>(rng: &mut R, n: usize, re: f64) -> QMatrix {
    let t = random_invertible(rng, n);
    let mut d = QMatrix::zeros(n, n);
    for k in 0..n {
        let real = if k == 0 {
            re * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            rng.gen_range(-1.0..1.0)
        };
        d[(k, k)] = Quaternion::from_complex(Complex64::new(real, rng.gen_range(0.2..3.0)));
    }
    t.matmul(&d).unwrap().matmul(&t.inverse().unwrap()).unwrap()
}

/// Non-diagonalizable matrix: T·(Jordan block with imaginary eigenvalue)·T⁻¹.
pub fn random_jordan_block<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let t = random_invertible(rng, n);
    let e = rng.gen_range(0.2..3.0);
    let mut jb = QMatrix::zeros(n, n);
    for k in 0..n {
        jb[(k, k)] = Quaternion::from_complex(Complex64::new(0.0, e));
        if k + 1 < n {
            jb[(k, k + 1)] = Quaternion::ONE;
        }
    }
    t.matmul(&jb).unwrap().matmul(&t.inverse().unwrap()).unwrap()
}

/// Random model parameters (ω, Ω) with |ω| ≤ 5 and |Ω| ≤ 5.
pub fn random_omega_rabi<R: Rng>(rng: &mut R) -> (f64, Complex64) {
    let omega = rng.gen_range(-5.0..5.0);
    let r = rng.gen_range(0.0..5.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    (omega, Complex64::from_polar(r, phase))
}

/// Random metric parameters with a > |z| (positive-definite region).
pub fn random_metric_params<R: Rng>(rng: &mut R) -> (f64, Complex64) {
    let r = rng.gen_range(0.0..2.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let a = r + rng.gen_range(0.05..2.0);
    (a, Complex64::from_polar(r, phase))
}

/// Worst-case greedy nearest-neighbor distance between two complex
/// multisets; used to compare spectra without relying on a total order
/// (sorting by components scrambles ULP-level ties).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let mut best: Option<(usize, f64)> = None;
        for (j, y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.expect("non-empty");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
