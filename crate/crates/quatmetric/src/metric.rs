//! Metric operators for quasianti-Hermitian quaternionic matrices.
//!
//! A matrix H is η-pseudoanti-Hermitian when ηHη⁻¹ = -H† for an invertible
//! Hermitian η; with a positive-definite η it is quasianti-Hermitian, which
//! happens exactly when H is diagonalizable with imaginary spectrum. This
//! module constructs such metrics from the right eigendecomposition, solves
//! for the full space of metric candidates, computes commutants, and decides
//! whether the metric is unique up to normalization (irreducibility of the
//! operator family).
//!
//! All operator equations are solved as real-linear systems over the real
//! coordinates of the unknown matrix (4 per entry over the quaternions,
//! 2 per entry when restricted to complex entries), with kernels extracted
//! by SVD. The Euclidean inner product on those coordinates coincides with
//! Re tr(A†B), so SVD kernel bases are orthonormal in the trace inner
//! product by construction.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, NotQuasiAntiHermitianReason, Result};
use crate::qmatrix::{QMatrix, QVector};
use crate::quat::Quaternion;
use crate::spectral::{right_eigen, RightSpectrum};

/// Relative SVD threshold for kernel extraction.
const KERNEL_RTOL: f64 = 1e-9;
/// Positive-definiteness gate: min eigenvalue > this times max.
const POSITIVE_RTOL: f64 = 1e-10;
/// Spectrum tolerance used by the quasianti-Hermiticity hypothesis check.
const SPECTRUM_RTOL: f64 = 1e-8;

/// Scalar field over which a linear solve runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarField {
    /// Full quaternionic entries (4 real coordinates per entry).
    Quaternionic,
    /// Entries restricted to span{1, i} (2 real coordinates per entry).
    Complex,
}

/// Hermitian positive-definite metric with a factor certificate η = R†R.
#[derive(Debug, Clone)]
pub struct MetricOperator {
    pub eta: QMatrix,
    /// Present when a factorization η = R†R is available.
    pub factor: Option<QMatrix>,
    /// Positive-definiteness certificate (all η eigenvalues > 0).
    pub positive: bool,
}

/// Real-orthonormal basis of a commutant, with its Hermitian part.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    pub full_basis: Vec<QMatrix>,
    pub hermitian_basis: Vec<QMatrix>,
    /// (full real dimension, Hermitian real dimension).
    pub dims: (usize, usize),
}

/// Hermitian solutions η of η·H_i + H_i†·η = 0 for every H_i.
#[derive(Debug, Clone)]
pub struct MetricSolutionSpace {
    /// Orthonormal (trace inner product) Hermitian basis, unit Frobenius norm.
    pub basis: Vec<QMatrix>,
    /// Positivity verdict per basis element.
    pub element_positive: Vec<bool>,
    /// Fraction of sampled nonnegative cone combinations that are positive.
    pub cone_positive_fraction: f64,
    /// A positive-definite element of the span, when one was found.
    pub positive_example: Option<MetricOperator>,
}

impl MetricSolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Biorthonormal expansion H = Σ |ψ_n,a⟩ i E_n ⟨φ_n,a|.
#[derive(Debug, Clone)]
pub struct BiorthonormalSystem {
    pub psi: Vec<QVector>,
    pub phi: Vec<QVector>,
    /// Energy E_n = |λ_n| ≥ 0 per vector, aligned with `psi`/`phi`.
    pub energies: Vec<f64>,
    /// (energy, degeneracy) per cluster, ascending in energy.
    pub levels: Vec<(f64, usize)>,
}

impl BiorthonormalSystem {
    /// Σ |ψ_n⟩ i E_n ⟨φ_n|, which must reproduce H.
    pub fn reconstruct(&self) -> QMatrix {
        let n = self.psi[0].dim();
        let mut acc = QMatrix::zeros(n, n);
        for ((p, q), &e) in self.psi.iter().zip(&self.phi).zip(&self.energies) {
            let scaled = p.scale_right(Quaternion::I.scale(e));
            acc = acc.add(&scaled.outer(q)).unwrap();
        }
        acc
    }
}

/// Residual of the pseudoanti-Hermiticity condition in the inverse-free form
/// ‖ηH + H†η‖_F / (‖η‖_F·‖H‖_F). Fails on singular η.
pub fn verify_pseudo_antihermitian(eta: &QMatrix, h: &QMatrix) -> Result<f64> {
    if !eta.is_square() || !h.is_square() || eta.rows() != h.rows() {
        return Err(Error::DimensionMismatch(format!(
            "eta {}x{}, H {}x{}",
            eta.rows(),
            eta.cols(),
            h.rows(),
            h.cols()
        )));
    }
    let (smin, smax) = eta.singular_value_range()?;
    if !(smin > 1e-12 * smax) {
        return Err(Error::Singular);
    }
    let lhs = eta.matmul(h)?.add(&h.adjoint().matmul(eta)?)?;
    let denom = eta.frobenius_norm() * h.frobenius_norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs.frobenius_norm() / denom)
}

/// Eigenvalues of a Hermitian quaternionic matrix through the embedding.
///
/// χ(M) is complex Hermitian and its spectrum is the quaternionic spectrum
/// doubled; the returned list is de-doubled (length n, ascending).
pub fn hermitian_eigenvalues(m: &QMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("hermitian_eigenvalues".into()));
    }
    let chi = m.embed();
    let vals = chi.eigh(UPLO::Lower).map_err(|_| Error::Singular)?.0;
    let mut v: Vec<f64> = vals.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(v.into_iter().step_by(2).collect())
}

fn positivity(m: &QMatrix) -> Result<bool> {
    let ev = hermitian_eigenvalues(m)?;
    let max_abs = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    Ok(ev.iter().all(|&e| e > POSITIVE_RTOL * max_abs))
}

/// Construct a positive-definite metric for a diagonalizable matrix with
/// imaginary spectrum: from H = S·D·S⁻¹, take η = S⁻†S⁻¹ = R†R with R = S⁻¹.
///
/// With D imaginary, ηHη⁻¹ = S⁻†DS† = -S⁻†D†S† = -H†, so the condition
/// holds by construction; the residual is re-verified on the result.
pub fn build_metric(h: &QMatrix) -> Result<MetricOperator> {
    let spec = right_eigen(h)?;
    check_quasi_hypothesis(&spec)?;
    let r = spec.s.inverse().map_err(|_| Error::NotQuasiAntiHermitian {
        reason: NotQuasiAntiHermitianReason::NonDiagonalizable,
    })?;
    let eta = r.adjoint().matmul(&r)?;
    // Symmetrize away rounding asymmetry before certifying.
    let eta = eta.add(&eta.adjoint())?.scale(0.5);
    let positive = positivity(&eta)?;
    Ok(MetricOperator { eta, factor: Some(r), positive })
}

fn check_quasi_hypothesis(spec: &RightSpectrum) -> Result<()> {
    if !spec.diagonalizable {
        return Err(Error::NotQuasiAntiHermitian {
            reason: NotQuasiAntiHermitianReason::NonDiagonalizable,
        });
    }
    if !spec.is_imaginary_spectrum(SPECTRUM_RTOL) {
        return Err(Error::NotQuasiAntiHermitian {
            reason: NotQuasiAntiHermitianReason::RealSpectrumPart,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Real-linear solves
// ---------------------------------------------------------------------------

fn coords_per_entry(field: ScalarField) -> usize {
    match field {
        ScalarField::Quaternionic => 4,
        ScalarField::Complex => 2,
    }
}

/// Unit coordinate matrix for coordinate index `idx`.
fn basis_matrix(n: usize, field: ScalarField, idx: usize) -> QMatrix {
    let per = coords_per_entry(field);
    let (entry, comp) = (idx / per, idx % per);
    let (r, c) = (entry / n, entry % n);
    let mut m = QMatrix::zeros(n, n);
    m[(r, c)] = match comp {
        0 => Quaternion::ONE,
        1 => Quaternion::I,
        2 => Quaternion::J,
        _ => Quaternion::K,
    };
    m
}

fn flatten(m: &QMatrix) -> Vec<f64> {
    m.entries()
        .iter()
        .flat_map(|q| [q.w, q.x, q.y, q.z])
        .collect()
}

fn unflatten(n: usize, field: ScalarField, coords: &Array1<f64>) -> QMatrix {
    let per = coords_per_entry(field);
    let mut m = QMatrix::zeros(n, n);
    for (idx, &v) in coords.iter().enumerate() {
        let (entry, comp) = (idx / per, idx % per);
        let (r, c) = (entry / n, entry % n);
        let q = &mut m[(r, c)];
        match comp {
            0 => q.w = v,
            1 => q.x = v,
            2 => q.y = v,
            _ => q.z = v,
        }
    }
    m
}

/// Kernel of the stacked real-linear constraints, as coordinate vectors.
/// Constraints are closures mapping a candidate matrix to a residual matrix.
fn solve_kernel(
    n: usize,
    field: ScalarField,
    constraints: &[&dyn Fn(&QMatrix) -> QMatrix],
) -> Vec<Array1<f64>> {
    let dim = n * n * coords_per_entry(field);
    let rows = constraints.len() * 4 * n * n;
    let mut a = Array2::<f64>::zeros((rows.max(1), dim));
    for col in 0..dim {
        let e = basis_matrix(n, field, col);
        let mut row0 = 0;
        for cons in constraints {
            let res = flatten(&cons(&e));
            for (k, v) in res.into_iter().enumerate() {
                a[(row0 + k, col)] = v;
            }
            row0 += 4 * n * n;
        }
    }
    if constraints.is_empty() {
        // No constraints: the whole coordinate space is the kernel.
        return (0..dim)
            .map(|k| {
                let mut v = Array1::zeros(dim);
                v[k] = 1.0;
                v
            })
            .collect();
    }
    let (_, sv, vt) = a.svd(false, true).expect("real SVD");
    let vt = vt.expect("right singular vectors");
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let thresh = KERNEL_RTOL * smax.max(1e-300);
    let mut kernel = Vec::new();
    for row in 0..vt.nrows() {
        let s = if row < sv.len() { sv[row] } else { 0.0 };
        if s <= thresh {
            kernel.push(vt.row(row).to_owned());
        }
    }
    kernel
}

fn check_family(hs: &[QMatrix], dim: usize) -> Result<()> {
    for h in hs {
        if !h.is_square() || h.rows() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {0}x{0}, got {1}x{2}",
                dim,
                h.rows(),
                h.cols()
            )));
        }
    }
    Ok(())
}

/// Commutant {T : [T, H_i] = 0 ∀i} over the given scalar field, as a
/// real-orthonormal basis together with its Hermitian sub-basis.
pub fn commutant_in(hs: &[QMatrix], dim: usize, field: ScalarField) -> Result<CommutantBasis> {
    check_family(hs, dim)?;
    let comm: Vec<Box<dyn Fn(&QMatrix) -> QMatrix>> = hs
        .iter()
        .map(|h| {
            let h = h.clone();
            Box::new(move |t: &QMatrix| {
                t.matmul(&h).unwrap().sub(&h.matmul(t).unwrap()).unwrap()
            }) as Box<dyn Fn(&QMatrix) -> QMatrix>
        })
        .collect();
    let refs: Vec<&dyn Fn(&QMatrix) -> QMatrix> = comm.iter().map(|b| b.as_ref()).collect();
    let full: Vec<QMatrix> = solve_kernel(dim, field, &refs)
        .iter()
        .map(|v| unflatten(dim, field, v))
        .collect();

    let herm_cons: &dyn Fn(&QMatrix) -> QMatrix = &|t: &QMatrix| t.sub(&t.adjoint()).unwrap();
    let mut refs_h = refs.clone();
    refs_h.push(herm_cons);
    let hermitian: Vec<QMatrix> = solve_kernel(dim, field, &refs_h)
        .iter()
        .map(|v| unflatten(dim, field, v))
        .collect();

    let dims = (full.len(), hermitian.len());
    Ok(CommutantBasis { full_basis: full, hermitian_basis: hermitian, dims })
}

/// Quaternionic commutant of a family of square matrices.
pub fn commutant(hs: &[QMatrix], dim: usize) -> Result<CommutantBasis> {
    commutant_in(hs, dim, ScalarField::Quaternionic)
}

/// Hermitian solutions of the linearized metric condition
/// η·H_i + H_i†·η = 0 for every H_i, over the given field.
pub fn metric_solution_space_in(
    hs: &[QMatrix],
    dim: usize,
    field: ScalarField,
) -> Result<MetricSolutionSpace> {
    check_family(hs, dim)?;
    let mut cons: Vec<Box<dyn Fn(&QMatrix) -> QMatrix>> = hs
        .iter()
        .map(|h| {
            let h = h.clone();
            Box::new(move |e: &QMatrix| {
                e.matmul(&h).unwrap().add(&h.adjoint().matmul(e).unwrap()).unwrap()
            }) as Box<dyn Fn(&QMatrix) -> QMatrix>
        })
        .collect();
    cons.push(Box::new(|e: &QMatrix| e.sub(&e.adjoint()).unwrap()));
    let refs: Vec<&dyn Fn(&QMatrix) -> QMatrix> = cons.iter().map(|b| b.as_ref()).collect();
    let basis: Vec<QMatrix> = solve_kernel(dim, field, &refs)
        .iter()
        .map(|v| unflatten(dim, field, v))
        .collect();

    let element_positive: Vec<bool> = basis
        .iter()
        .map(|b| positivity(b).unwrap_or(false))
        .collect();

    // Sample the nonnegative cone of the basis (both sign orientations per
    // element) for positive-definite combinations. Deterministic seed: the
    // result is part of reproducible CLI output.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut positive_example: Option<QMatrix> = None;
    let mut hits = 0usize;
    let samples = if basis.is_empty() { 0 } else { 100 };
    for _ in 0..samples {
        let mut combo = QMatrix::zeros(dim, dim);
        for b in &basis {
            combo = combo.add(&b.scale(rng.gen_range(-1.0..1.0))).unwrap();
        }
        if positivity(&combo).unwrap_or(false) {
            hits += 1;
            if positive_example.is_none() {
                positive_example = Some(combo);
            }
        }
    }
    // Prefer a single positive basis element as the reported example.
    for (b, &p) in basis.iter().zip(&element_positive) {
        if p {
            positive_example = Some(b.clone());
            break;
        }
    }
    let positive_example = positive_example.map(|eta| {
        let norm = eta.frobenius_norm();
        let eta = eta.scale(1.0 / norm);
        MetricOperator { eta, factor: None, positive: true }
    });
    let cone_positive_fraction = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    Ok(MetricSolutionSpace {
        basis,
        element_positive,
        cone_positive_fraction,
        positive_example,
    })
}

/// Quaternionic metric solution space.
pub fn metric_solution_space(hs: &[QMatrix], dim: usize) -> Result<MetricSolutionSpace> {
    metric_solution_space_in(hs, dim, ScalarField::Quaternionic)
}

/// A family is irreducible iff its Hermitian commutant is spanned by the
/// identity alone; the certificate is that Hermitian basis.
pub fn is_irreducible_in(
    hs: &[QMatrix],
    dim: usize,
    field: ScalarField,
) -> Result<(bool, Vec<QMatrix>)> {
    let c = commutant_in(hs, dim, field)?;
    Ok((c.dims.1 == 1, c.hermitian_basis))
}

pub fn is_irreducible(hs: &[QMatrix], dim: usize) -> Result<(bool, Vec<QMatrix>)> {
    is_irreducible_in(hs, dim, ScalarField::Quaternionic)
}

// ---------------------------------------------------------------------------
// Biorthonormal systems
// ---------------------------------------------------------------------------

/// Fix the residual complex phase of an eigenvector column: the leading
/// significant split-component is rotated real-positive. Complex phases
/// commute with i, so the right eigenvalue representative +i·E is preserved.
fn fix_phase(v: &QVector) -> QVector {
    let scale = v.norm();
    for &q in v.entries() {
        if q.norm() > 1e-8 * scale.max(1.0) {
            let (a, b) = q.split();
            let c = if a.norm() > 1e-8 * scale.max(1.0) {
                a.conj() / a.norm()
            } else {
                b / b.norm()
            };
            return v.scale_right(Quaternion::from_complex(c));
        }
    }
    v.clone()
}

/// Biorthonormal decomposition H = Σ |ψ_n,a⟩ i E_n ⟨φ_n,a| with
/// ⟨φ_m,b|ψ_n,a⟩ = δ_mn δ_ba; φ columns come from (S†)⁻¹, so orthonormality
/// and completeness hold by construction.
pub fn biorthonormal(h: &QMatrix) -> Result<BiorthonormalSystem> {
    let spec = right_eigen(h)?;
    check_quasi_hypothesis(&spec)?;
    let n = h.rows();
    let mut s = QMatrix::zeros(n, n);
    for c in 0..n {
        let col = fix_phase(&spec.s.column(c));
        let norm = col.norm();
        s.set_column(c, &col.scale_right(Quaternion::real(1.0 / norm)));
    }
    let s_inv = s.inverse().map_err(|_| Error::NotQuasiAntiHermitian {
        reason: NotQuasiAntiHermitianReason::NonDiagonalizable,
    })?;
    let phi_mat = s_inv.adjoint();
    let psi: Vec<QVector> = (0..n).map(|c| s.column(c)).collect();
    let phi: Vec<QVector> = (0..n).map(|c| phi_mat.column(c)).collect();
    let energies: Vec<f64> = spec.eigenvalues.iter().map(|l| l.norm()).collect();
    let levels = spec
        .clusters(h.frobenius_norm())
        .into_iter()
        .map(|members| (spec.eigenvalues[members[0]].norm(), members.len()))
        .collect();
    Ok(BiorthonormalSystem { psi, phi, energies, levels })
}
