//! Two-level quantum-optics model: spinorial generators, Hamiltonian
//! assembly, Cayley-Klein time evolution, the secular metric, expectation
//! values, and transition probabilities under both descriptions.
//!
//! Units: ħ = 1, all frequencies angular. The propagator orientation
//! follows the component systems (Ψ'₊ = +iω/2·Ψ₊ + iΩ*·Ψ₋, ...), i.e.
//! U' = H·U with U(0) = 1, so that Ω ≡ 0 gives F(t) = exp(-iωt/2).
//! H(t) is complex-valued by construction, so evolution runs in the complex
//! 2×2 representation and is lifted; the quaternionic path is exercised by
//! the consistency tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricOperator;
use crate::qmatrix::{QMatrix, QVector};
use crate::quat::Quaternion;

/// Cayley-Klein normalization drift allowed along a trajectory.
const CK_DRIFT_TOL: f64 = 1e-9;
/// Step-halving convergence gate for the midpoint integrator.
const STEP_REFINE_TOL: f64 = 1e-10;
/// j/k leakage allowed by [`extract_ck`].
const CK_COMPLEX_TOL: f64 = 1e-10;
/// Unitarity and pattern residual allowed by [`extract_ck`].
const CK_PATTERN_TOL: f64 = 1e-9;

/// Spinorial generators of Eq-free form: J₁ = (i/2)σ₁-like, obeying
/// [J_l, J_m] = -ε_lmn J_n, each anti-Hermitian.
pub fn j_operators() -> (QMatrix, QMatrix, QMatrix) {
    let i = Quaternion::I;
    let half = 0.5;
    let j1 = QMatrix::from_rows(&[
        vec![Quaternion::ZERO, i.scale(half)],
        vec![i.scale(half), Quaternion::ZERO],
    ]);
    let j2 = QMatrix::from_rows(&[
        vec![Quaternion::ZERO, Quaternion::real(half)],
        vec![Quaternion::real(-half), Quaternion::ZERO],
    ]);
    let j3 = QMatrix::from_rows(&[
        vec![i.scale(half), Quaternion::ZERO],
        vec![Quaternion::ZERO, i.scale(-half)],
    ]);
    (j1, j2, j3)
}

/// H = i·[[ω/2, Ω*], [Ω, -ω/2]] = 2Ω₀J₁ + 2Ω₁J₂ + ωJ₃.
pub fn hamiltonian(omega: f64, rabi: Complex64) -> QMatrix {
    let i = Complex64::new(0.0, 1.0);
    QMatrix::from_rows(&[
        vec![
            Quaternion::from_complex(i * omega / 2.0),
            Quaternion::from_complex(i * rabi.conj()),
        ],
        vec![
            Quaternion::from_complex(i * rabi),
            Quaternion::from_complex(-i * omega / 2.0),
        ],
    ])
}

/// The secular metric η = [[a, jz], [-jz, a]]; Hermitian for any (a, z),
/// positive definite exactly when a > |z| (eigenvalues a ± |z|).
pub fn eta_model(a: f64, z: Complex64) -> MetricOperator {
    let jz = Quaternion::J * Quaternion::from_complex(z);
    let eta = QMatrix::from_rows(&[
        vec![Quaternion::real(a), jz],
        vec![-jz, Quaternion::real(a)],
    ]);
    let r = z.norm();
    let positive = a > r;
    let factor = if !positive {
        None
    } else if r == 0.0 {
        Some(QMatrix::identity(2).scale(a.sqrt()))
    } else {
        // η = W·diag(a+|z|, a-|z|)·W† with W columns (1, ∓q̂)/√2, q̂ = jz/|z|;
        // factor R = diag(√(a+|z|), √(a-|z|))·W†.
        let qh = jz.scale(1.0 / r);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w_adj = QMatrix::from_rows(&[
            vec![Quaternion::real(s), qh.scale(s)],
            vec![Quaternion::real(s), -qh.scale(s)],
        ]);
        let mut d = QMatrix::zeros(2, 2);
        d[(0, 0)] = Quaternion::real((a + r).sqrt());
        d[(1, 1)] = Quaternion::real((a - r).sqrt());
        Some(d.matmul(&w_adj).unwrap())
    };
    MetricOperator { eta, factor, positive }
}

/// ⟨ψ|A|ψ⟩, or ⟨ψ|ηA|ψ⟩ when a metric is supplied.
pub fn expectation(
    a_op: &QMatrix,
    psi: &QVector,
    eta: Option<&MetricOperator>,
) -> Result<Quaternion> {
    let av = a_op.apply(psi)?;
    let v = match eta {
        Some(m) => m.eta.apply(&av)?,
        None => av,
    };
    Ok(psi.inner(&v))
}

/// η-norm squared ⟨ψ|η|ψ⟩ (real for Hermitian η).
pub fn eta_norm(psi: &QVector, eta: &MetricOperator) -> Result<f64> {
    let v = eta.eta.apply(psi)?;
    Ok(psi.inner(&v).w)
}

/// (P, P') from a Cayley-Klein sample under the a = 1 convention:
/// P = |G|², P' = |z|²|F|² + |G|².
pub fn transition_probabilities(f: Complex64, g: Complex64, z: Complex64) -> (f64, f64) {
    let p = g.norm_sqr();
    (p, z.norm_sqr() * f.norm_sqr() + p)
}

// ---------------------------------------------------------------------------
// Time profiles and configuration
// ---------------------------------------------------------------------------

mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// One segment of a real-valued time profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RealSegment {
    Constant { t_start: f64, t_end: f64, value: f64 },
    Chirp { t_start: f64, t_end: f64, value_start: f64, value_end: f64 },
}

/// One segment of a complex-valued time profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ComplexSegment {
    Constant {
        t_start: f64,
        t_end: f64,
        #[serde(with = "complex_serde")]
        value: Complex64,
    },
    Chirp {
        t_start: f64,
        t_end: f64,
        #[serde(with = "complex_serde")]
        value_start: Complex64,
        #[serde(with = "complex_serde")]
        value_end: Complex64,
    },
}

trait Segment {
    fn span(&self) -> (f64, f64);
}

impl Segment for RealSegment {
    fn span(&self) -> (f64, f64) {
        match *self {
            RealSegment::Constant { t_start, t_end, .. }
            | RealSegment::Chirp { t_start, t_end, .. } => (t_start, t_end),
        }
    }
}

impl Segment for ComplexSegment {
    fn span(&self) -> (f64, f64) {
        match *self {
            ComplexSegment::Constant { t_start, t_end, .. }
            | ComplexSegment::Chirp { t_start, t_end, .. } => (t_start, t_end),
        }
    }
}

impl RealSegment {
    fn at(&self, t: f64) -> f64 {
        match *self {
            RealSegment::Constant { value, .. } => value,
            RealSegment::Chirp { t_start, t_end, value_start, value_end } => {
                let frac = if t_end > t_start { (t - t_start) / (t_end - t_start) } else { 0.0 };
                value_start + frac * (value_end - value_start)
            }
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, RealSegment::Constant { .. })
    }
}

impl ComplexSegment {
    fn at(&self, t: f64) -> Complex64 {
        match *self {
            ComplexSegment::Constant { value, .. } => value,
            ComplexSegment::Chirp { t_start, t_end, value_start, value_end } => {
                let frac = if t_end > t_start { (t - t_start) / (t_end - t_start) } else { 0.0 };
                value_start + frac * (value_end - value_start)
            }
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, ComplexSegment::Constant { .. })
    }
}

/// Simulation input for the two-level model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    /// ω(t) profile segments, tiling [0, t_max].
    pub omega: Vec<RealSegment>,
    /// Ω(t) = Ω₀(t) + i·Ω₁(t) profile segments, tiling [0, t_max].
    pub rabi: Vec<ComplexSegment>,
    pub metric_a: f64,
    #[serde(with = "complex_serde")]
    pub metric_z: Complex64,
    /// Strictly increasing sample times starting at 0.
    pub t_grid: Vec<f64>,
}

const TILE_TOL: f64 = 1e-12;

fn check_tiling<S: Segment>(name: &str, segments: &[S], t_max: f64) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::ConfigInvalid(format!("{name}: no segments")));
    }
    let mut spans: Vec<(f64, f64)> = segments.iter().map(Segment::span).collect();
    spans.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = t_max.abs().max(1.0);
    if spans[0].0.abs() > TILE_TOL * scale {
        return Err(Error::ConfigInvalid(format!(
            "{name}: first segment starts at {}, expected 0",
            spans[0].0
        )));
    }
    for w in spans.windows(2) {
        let (prev, next) = (w[0], w[1]);
        if (next.0 - prev.1).abs() > TILE_TOL * scale {
            return Err(Error::ConfigInvalid(format!(
                "{name}: gap or overlap between t={} and t={}",
                prev.1, next.0
            )));
        }
    }
    for &(a, b) in &spans {
        if !(b > a) {
            return Err(Error::ConfigInvalid(format!(
                "{name}: empty or reversed segment [{a}, {b}]"
            )));
        }
    }
    let end = spans.last().unwrap().1;
    if end + TILE_TOL * scale < t_max {
        return Err(Error::ConfigInvalid(format!(
            "{name}: segments end at {end}, before t_max = {t_max}"
        )));
    }
    Ok(())
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() {
            return Err(Error::ConfigInvalid("t_grid is empty".into()));
        }
        if self.t_grid[0] != 0.0 {
            return Err(Error::ConfigInvalid("t_grid must start at 0".into()));
        }
        for w in self.t_grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::ConfigInvalid(format!(
                    "t_grid not strictly increasing at t={}",
                    w[1]
                )));
            }
        }
        if !self.t_grid.iter().all(|t| t.is_finite()) {
            return Err(Error::ConfigInvalid("non-finite grid time".into()));
        }
        if !(self.metric_a.is_finite() && self.metric_z.re.is_finite() && self.metric_z.im.is_finite())
        {
            return Err(Error::ConfigInvalid("non-finite metric parameters".into()));
        }
        let t_max = *self.t_grid.last().unwrap();
        check_tiling("omega", &self.omega, t_max)?;
        check_tiling("rabi", &self.rabi, t_max)?;
        Ok(())
    }

    pub fn omega_at(&self, t: f64) -> f64 {
        locate(&self.omega, t).map(|s| s.at(t)).unwrap_or(0.0)
    }

    pub fn rabi_at(&self, t: f64) -> Complex64 {
        locate(&self.rabi, t)
            .map(|s| s.at(t))
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Segment boundaries of either profile inside (a, b).
    fn interior_breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = Vec::new();
        for s in self.omega.iter().map(Segment::span) {
            pts.push(s.0);
            pts.push(s.1);
        }
        for s in self.rabi.iter().map(Segment::span) {
            pts.push(s.0);
            pts.push(s.1);
        }
        pts.retain(|&t| t > a + TILE_TOL && t < b - TILE_TOL);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        pts.dedup_by(|x, y| (*x - *y).abs() <= TILE_TOL);
        pts
    }

    /// True when both profiles are constant throughout [a, b].
    fn constant_on(&self, a: f64, b: f64) -> bool {
        let mid = 0.5 * (a + b);
        locate(&self.omega, mid).map_or(false, RealSegment::is_constant)
            && locate(&self.rabi, mid).map_or(false, ComplexSegment::is_constant)
    }
}

fn locate<S: Segment>(segments: &[S], t: f64) -> Option<&S> {
    segments
        .iter()
        .find(|s| {
            let (a, b) = s.span();
            t >= a - TILE_TOL && t <= b + TILE_TOL
        })
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

/// Sampled Cayley-Klein pair along a trajectory.
#[derive(Debug, Clone)]
pub struct CayleyKlein {
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
}

/// Sampled propagator and derived quantities for one model run.
#[derive(Debug, Clone)]
pub struct EvolutionTrajectory {
    pub times: Vec<f64>,
    pub u: Vec<QMatrix>,
    pub ck: CayleyKlein,
    pub p_standard: Vec<f64>,
    pub p_eta: Vec<f64>,
    pub unitarity_residual: Vec<f64>,
    pub eta_unitarity_residual: Vec<f64>,
}

type C2 = [[Complex64; 2]; 2];

fn c2_mul(a: &C2, b: &C2) -> C2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn c2_sub_norm(a: &C2, b: &C2) -> f64 {
    let mut s = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            s += (a[r][c] - b[r][c]).norm_sqr();
        }
    }
    s.sqrt()
}

const C2_IDENTITY: C2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

/// exp(M) for traceless 2×2 M, via exp(M) = cosh(δ)·1 + sinh(δ)/δ·M
/// with δ² = -det(M). Exact to machine precision, so anti-Hermitian
/// generators produce unitary factors structurally.
fn exp_traceless(m: &C2) -> C2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let delta = (-det).sqrt();
    let (ch, shd) = if delta.norm() < 1e-8 {
        // series: cosh δ ≈ 1 + δ²/2, sinh δ/δ ≈ 1 + δ²/6
        let d2 = delta * delta;
        (
            Complex64::new(1.0, 0.0) + d2 / 2.0 + d2 * d2 / 24.0,
            Complex64::new(1.0, 0.0) + d2 / 6.0 + d2 * d2 / 120.0,
        )
    } else {
        (delta.cosh(), delta.sinh() / delta)
    };
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = shd * m[r][c];
            if r == c {
                out[r][c] += ch;
            }
        }
    }
    out
}

/// The complex 2×2 generator of the component systems: U' = G·U with
/// G = [[iω/2, iΩ*], [iΩ, -iω/2]].
fn generator(config: &ModelConfig, t: f64) -> C2 {
    let i = Complex64::new(0.0, 1.0);
    let omega = config.omega_at(t);
    let rabi = config.rabi_at(t);
    [
        [i * omega / 2.0, i * rabi.conj()],
        [i * rabi, -i * omega / 2.0],
    ]
}

/// Propagator over [a, b]: exact exponential on constant stretches,
/// midpoint-exponential with step halving otherwise.
fn propagate_interval(config: &ModelConfig, a: f64, b: f64) -> C2 {
    let mut step = C2_IDENTITY;
    let mut left = a;
    let mut cuts = config.interior_breakpoints(a, b);
    cuts.push(b);
    for right in cuts {
        let piece = if config.constant_on(left, right) {
            let mut gen = generator(config, 0.5 * (left + right));
            for row in gen.iter_mut() {
                for v in row.iter_mut() {
                    *v *= right - left;
                }
            }
            exp_traceless(&gen)
        } else {
            midpoint_refined(config, left, right)
        };
        step = c2_mul(&piece, &step);
        left = right;
    }
    step
}

fn midpoint_steps(config: &ModelConfig, a: f64, b: f64, substeps: usize) -> C2 {
    let h = (b - a) / substeps as f64;
    let mut u = C2_IDENTITY;
    for k in 0..substeps {
        let mid = a + (k as f64 + 0.5) * h;
        let mut gen = generator(config, mid);
        for row in gen.iter_mut() {
            for v in row.iter_mut() {
                *v *= h;
            }
        }
        u = c2_mul(&exp_traceless(&gen), &u);
    }
    u
}

fn midpoint_refined(config: &ModelConfig, a: f64, b: f64) -> C2 {
    let mut substeps = 1usize;
    let mut prev = midpoint_steps(config, a, b, substeps);
    for _ in 0..22 {
        substeps *= 2;
        let next = midpoint_steps(config, a, b, substeps);
        if c2_sub_norm(&next, &prev) < STEP_REFINE_TOL {
            return next;
        }
        prev = next;
    }
    prev
}

/// Read the Cayley-Klein pair off a 2×2 unitary: pattern [[F*, G], [-G*, F]].
pub fn extract_ck(u: &QMatrix) -> Result<(Complex64, Complex64)> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::DimensionMismatch("extract_ck needs 2x2".into()));
    }
    if !u.is_complex(CK_COMPLEX_TOL) {
        return Err(Error::NotCKForm);
    }
    let prod = u.adjoint().matmul(u)?;
    if prod.sub(&QMatrix::identity(2)).unwrap().frobenius_norm() > CK_PATTERN_TOL {
        return Err(Error::NotCKForm);
    }
    let f = u[(1, 1)].complex_part();
    let g = u[(0, 1)].complex_part();
    let da = (u[(0, 0)].complex_part() - f.conj()).norm();
    let db = (u[(1, 0)].complex_part() + g.conj()).norm();
    if da > CK_PATTERN_TOL || db > CK_PATTERN_TOL {
        return Err(Error::NotCKForm);
    }
    Ok((f, g))
}

/// Integrate the model over its sample grid.
pub fn evolve(config: &ModelConfig) -> Result<EvolutionTrajectory> {
    config.validate()?;
    let eta = eta_model(config.metric_a, config.metric_z);
    let eta_norm_f = eta.eta.frobenius_norm();
    let id = QMatrix::identity(2);

    let mut u = C2_IDENTITY;
    let mut times = Vec::with_capacity(config.t_grid.len());
    let mut u_list = Vec::with_capacity(config.t_grid.len());
    let mut f_list = Vec::new();
    let mut g_list = Vec::new();
    let mut p_standard = Vec::new();
    let mut p_eta = Vec::new();
    let mut unitarity_residual = Vec::new();
    let mut eta_unitarity_residual = Vec::new();

    for (k, &t) in config.t_grid.iter().enumerate() {
        if k > 0 {
            let step = propagate_interval(config, config.t_grid[k - 1], t);
            u = c2_mul(&step, &u);
        }
        let uq = QMatrix::from_rows(&[
            vec![
                Quaternion::from_complex(u[0][0]),
                Quaternion::from_complex(u[0][1]),
            ],
            vec![
                Quaternion::from_complex(u[1][0]),
                Quaternion::from_complex(u[1][1]),
            ],
        ]);
        let (f, g) = extract_ck(&uq)?;
        let drift = (f.norm_sqr() + g.norm_sqr() - 1.0).abs();
        if drift > CK_DRIFT_TOL {
            return Err(Error::ConfigInvalid(format!(
                "integrator lost CK normalization at t={t}: drift {drift}"
            )));
        }
        let (p, pe) = transition_probabilities(f, g, config.metric_z);
        let ur = uq.adjoint().matmul(&uq)?.sub(&id)?.frobenius_norm();
        let ue = uq
            .adjoint()
            .matmul(&eta.eta)?
            .matmul(&uq)?
            .sub(&eta.eta)?
            .frobenius_norm()
            / eta_norm_f;
        times.push(t);
        u_list.push(uq);
        f_list.push(f);
        g_list.push(g);
        p_standard.push(p);
        p_eta.push(pe);
        unitarity_residual.push(ur);
        eta_unitarity_residual.push(ue);
    }

    Ok(EvolutionTrajectory {
        times,
        u: u_list,
        ck: CayleyKlein { f: f_list, g: g_list },
        p_standard,
        p_eta,
        unitarity_residual,
        eta_unitarity_residual,
    })
}

/// Constant-parameter config helper over a uniform grid.
pub fn constant_config(
    omega: f64,
    rabi: Complex64,
    a: f64,
    z: Complex64,
    t_max: f64,
    samples: usize,
) -> ModelConfig {
    let t_grid = if samples <= 1 || t_max == 0.0 {
        vec![0.0]
    } else {
        (0..samples)
            .map(|k| t_max * k as f64 / (samples - 1) as f64)
            .collect()
    };
    let t_end = t_max.max(1e-9);
    ModelConfig {
        omega: vec![RealSegment::Constant { t_start: 0.0, t_end, value: omega }],
        rabi: vec![ComplexSegment::Constant { t_start: 0.0, t_end, value: rabi }],
        metric_a: a,
        metric_z: z,
        t_grid,
    }
}
