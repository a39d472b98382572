//! Dense quaternionic matrices and vectors with right-module semantics.
//!
//! Scalars multiply vectors on the right; matrices act on the left, so
//! M(v·λ) = (Mv)·λ. All numeric back-door work (inverses, spectra, condition
//! estimates) routes through the complex symplectic embedding χ: writing
//! each entry as a + b·j, χ(M) is the 2n×2m block matrix
//! [[A, B], [-conj(B), conj(A)]]. χ is a *-homomorphism: χ(MN) = χ(M)χ(N)
//! and χ(M†) = χ(M)†.

use ndarray::Array2;
use ndarray_linalg::SVD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// Relative singular-value cutoff under which χ(M) is declared singular.
const SINGULAR_RTOL: f64 = 1e-12;
/// Block-symmetry tolerance accepted by [`lift`].
const LIFT_BLOCK_TOL: f64 = 1e-10;

/// Verdict of [`classify`]; Hermitian wins when both residuals pass
/// (only the zero matrix in practice).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hermiticity {
    Hermitian,
    AntiHermitian,
    Neither,
}

/// Dense quaternionic matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QMatrixWire", into = "QMatrixWire")]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

/// JSON shape: {"rows": n, "cols": m, "entries": [[[w,x,y,z], ...], ...]}.
#[derive(Serialize, Deserialize)]
struct QMatrixWire {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Quaternion>>,
}

impl TryFrom<QMatrixWire> for QMatrix {
    type Error = String;
    fn try_from(w: QMatrixWire) -> std::result::Result<Self, String> {
        if w.rows == 0 || w.cols == 0 {
            return Err("matrix dimensions must be positive".into());
        }
        if w.entries.len() != w.rows {
            return Err(format!("expected {} rows, got {}", w.rows, w.entries.len()));
        }
        let mut entries = Vec::with_capacity(w.rows * w.cols);
        for (r, row) in w.entries.iter().enumerate() {
            if row.len() != w.cols {
                return Err(format!("row {} has {} entries, expected {}", r, row.len(), w.cols));
            }
            entries.extend_from_slice(row);
        }
        Ok(QMatrix { rows: w.rows, cols: w.cols, entries })
    }
}

impl From<QMatrix> for QMatrixWire {
    fn from(m: QMatrix) -> Self {
        let entries = (0..m.rows)
            .map(|r| m.entries[r * m.cols..(r + 1) * m.cols].to_vec())
            .collect();
        QMatrixWire { rows: m.rows, cols: m.cols, entries }
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, entries: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for idx in 0..n {
            m[(idx, idx)] = Quaternion::ONE;
        }
        m
    }

    /// Build from a row-major nested slice; all rows must share one length.
    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    /// Build a square complex matrix (entries in span{1, i}).
    pub fn from_complex(c: &Array2<Complex64>) -> Self {
        let (rows, cols) = c.dim();
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for s in 0..cols {
                m[(r, s)] = Quaternion::from_complex(c[(r, s)]);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|q| q.scale(s)).collect(),
        }
    }

    /// Left-multiply every entry by a quaternion scalar.
    pub fn scale_left(&self, s: Quaternion) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&q| s * q).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Hamilton-product matrix multiply.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for s in 0..other.cols {
                let mut acc = Quaternion::ZERO;
                for t in 0..self.cols {
                    acc += self[(r, t)] * other[(t, s)];
                }
                out[(r, s)] = acc;
            }
        }
        Ok(out)
    }

    /// Matrix-vector action; right-linear: M(v·λ) = (Mv)·λ.
    pub fn apply(&self, v: &QVector) -> Result<QVector> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} applied to dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let mut out = vec![Quaternion::ZERO; self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = Quaternion::ZERO;
            for t in 0..self.cols {
                acc += self[(r, t)] * v[t];
            }
            *slot = acc;
        }
        Ok(QVector::new(out))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for s in 0..self.cols {
                out[(s, r)] = self[(r, s)].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|q| q.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn column(&self, c: usize) -> QVector {
        QVector::new((0..self.rows).map(|r| self[(r, c)]).collect())
    }

    pub fn set_column(&mut self, c: usize, v: &QVector) {
        assert_eq!(v.dim(), self.rows);
        for r in 0..self.rows {
            self[(r, c)] = v[r];
        }
    }

    /// Complex symplectic image χ(M) = [[A, B], [-conj(B), conj(A)]].
    pub fn embed(&self) -> Array2<Complex64> {
        let (n, m) = (self.rows, self.cols);
        let mut c = Array2::zeros((2 * n, 2 * m));
        for r in 0..n {
            for s in 0..m {
                let (a, b) = self[(r, s)].split();
                c[(r, s)] = a;
                c[(r, s + m)] = b;
                c[(r + n, s)] = -b.conj();
                c[(r + n, s + m)] = a.conj();
            }
        }
        c
    }

    /// Inverse of [`embed`]; rejects matrices off the block pattern.
    pub fn lift(c: &Array2<Complex64>) -> Result<Self> {
        let (rr, cc) = c.dim();
        if rr % 2 != 0 || cc % 2 != 0 || rr == 0 || cc == 0 {
            return Err(Error::NotSymplecticBlockForm);
        }
        let (n, m) = (rr / 2, cc / 2);
        let scale = c.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
        let mut out = Self::zeros(n, m);
        for r in 0..n {
            for s in 0..m {
                let a = c[(r, s)];
                let b = c[(r, s + m)];
                let da = (c[(r + n, s + m)] - a.conj()).norm();
                let db = (c[(r + n, s)] + b.conj()).norm();
                if da > LIFT_BLOCK_TOL * scale || db > LIFT_BLOCK_TOL * scale {
                    return Err(Error::NotSymplecticBlockForm);
                }
                out[(r, s)] = Quaternion::join(a, b);
            }
        }
        Ok(out)
    }

    /// Inverse through the embedding, with a singular-value condition gate.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let chi = self.embed();
        let inv = invert_complex(&chi)?;
        // The inverse of a symplectic-block matrix keeps the block form.
        Self::lift(&inv)
    }

    /// Smallest and largest singular values of χ(M).
    pub fn singular_value_range(&self) -> Result<(f64, f64)> {
        let chi = self.embed();
        let (_, sv, _) = chi.svd(false, false).map_err(|_| Error::Singular)?;
        let smax = sv.iter().cloned().fold(0.0f64, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok((smin, smax))
    }

    /// Hermitian / anti-Hermitian classification against a relative tolerance.
    pub fn classify(&self, tol: f64) -> Hermiticity {
        assert!(self.is_square(), "classify requires a square matrix");
        let adj = self.adjoint();
        let scale = self.frobenius_norm();
        let herm = self.sub(&adj).unwrap().frobenius_norm() <= tol * scale;
        let anti = self.add(&adj).unwrap().frobenius_norm() <= tol * scale;
        if herm {
            Hermiticity::Hermitian
        } else if anti {
            Hermiticity::AntiHermitian
        } else {
            Hermiticity::Neither
        }
    }

    /// True when every entry lies in span{1, i} within `tol`.
    pub fn is_complex(&self, tol: f64) -> bool {
        self.entries.iter().all(|q| q.is_complex(tol))
    }

    /// The entry-wise complex part, valid when [`is_complex`] holds.
    pub fn complex_part(&self) -> Array2<Complex64> {
        let mut c = Array2::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            for s in 0..self.cols {
                c[(r, s)] = self[(r, s)].complex_part();
            }
        }
        c
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.entries[r * self.cols + c]
    }
}

/// Invert a complex matrix, gating on the SVD condition estimate.
pub(crate) fn invert_complex(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    use ndarray_linalg::Inverse;
    let (_, sv, _) = m.svd(false, false).map_err(|_| Error::Singular)?;
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smin > SINGULAR_RTOL * smax) {
        return Err(Error::Singular);
    }
    m.inv().map_err(|_| Error::Singular)
}

/// Column vector over the right quaternionic module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QVector {
    entries: Vec<Quaternion>,
}

impl QVector {
    pub fn new(entries: Vec<Quaternion>) -> Self {
        assert!(!entries.is_empty(), "vector dimension must be positive");
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![Quaternion::ZERO; dim])
    }

    /// Standard basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[k] = Quaternion::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// ⟨u|v⟩ = Σ conj(u_k)·v_k; quaternion-valued, sesquilinear with
    /// scalars on the right slot.
    pub fn inner(&self, other: &Self) -> Quaternion {
        assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(Quaternion::ZERO, |acc, (&u, &v)| acc + u.conj() * v)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).w.max(0.0).sqrt()
    }

    /// Right scalar multiplication v·λ.
    pub fn scale_right(&self, lambda: Quaternion) -> Self {
        Self::new(self.entries.iter().map(|&q| q * lambda).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    /// Outer product |u⟩⟨v| as a matrix: entry (r,s) = u_r · conj(v_s).
    pub fn outer(&self, other: &Self) -> QMatrix {
        let mut m = QMatrix::zeros(self.dim(), other.dim());
        for r in 0..self.dim() {
            for s in 0..other.dim() {
                m[(r, s)] = self[r] * other[s].conj();
            }
        }
        m
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }
}

impl std::ops::Index<usize> for QVector {
    type Output = Quaternion;
    fn index(&self, k: usize) -> &Quaternion {
        &self.entries[k]
    }
}
