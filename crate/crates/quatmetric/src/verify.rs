//! Named invariant suite behind the `verify` CLI subcommand.
//!
//! Every check is deterministic given the manifest seed: each invariant
//! derives its RNG from (seed, invariant index). Residuals are reported
//! alongside the tolerance they are compared against; a global tolerance
//! override replaces every per-invariant tolerance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    self, constant_config, eta_model, evolve, expectation, hamiltonian, j_operators,
};
use crate::error::Error;
use crate::metric::{
    biorthonormal, build_metric, commutant, is_irreducible, is_irreducible_in,
    metric_solution_space, verify_pseudo_antihermitian, ScalarField,
};
use crate::qmatrix::QMatrix;
use crate::quat::Quaternion;
use crate::sample;
use crate::spectral::right_eigen;

/// Outcome of one named invariant.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

struct Check {
    name: &'static str,
    tolerance: f64,
    run: fn(&mut ChaCha8Rng) -> f64,
}

/// Run the full suite; `tol_override`, when given, replaces every tolerance.
pub fn run_suite(seed: u64, tol_override: Option<f64>) -> Vec<InvariantReport> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(idx, check)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37 * idx as u64 + 1));
            let residual = (check.run)(&mut rng);
            let tolerance = tol_override.unwrap_or(check.tolerance);
            InvariantReport {
                name: check.name,
                residual,
                tolerance,
                pass: residual <= tolerance,
            }
        })
        .collect()
}

const CHECKS: &[Check] = &[
    Check { name: "quat_modulus_multiplicative", tolerance: 1e-12, run: quat_modulus },
    Check { name: "quat_associativity", tolerance: 1e-12, run: quat_associativity },
    Check { name: "quat_noncommutativity_witness", tolerance: 1e-15, run: quat_noncommutativity },
    Check { name: "quat_split_join_round_trip", tolerance: 1e-15, run: quat_split_join },
    Check { name: "qmatrix_adjoint_product_rule", tolerance: 1e-12, run: qmatrix_adjoint_product },
    Check { name: "qmatrix_embed_homomorphism", tolerance: 1e-12, run: qmatrix_embed_hom },
    Check { name: "qmatrix_frobenius_embedding_ratio", tolerance: 1e-12, run: qmatrix_frobenius },
    Check { name: "qmatrix_adjoint_inner_product", tolerance: 1e-11, run: qmatrix_adjoint_inner },
    Check { name: "qmatrix_right_linearity", tolerance: 1e-12, run: qmatrix_right_linearity },
    Check { name: "spectral_similarity_invariance", tolerance: 1e-7, run: spectral_similarity },
    Check { name: "spectral_antihermitian_imaginary", tolerance: 1e-9, run: spectral_antiherm },
    Check { name: "spectral_embedding_pairing", tolerance: 1e-9, run: spectral_pairing },
    Check { name: "metric_prop1_forward", tolerance: 1e-8, run: metric_prop1_forward },
    Check { name: "metric_prop1_negative_branch", tolerance: 1e-15, run: metric_prop1_negative },
    Check { name: "metric_uniqueness_iff_irreducibility", tolerance: 1e-15, run: metric_uniqueness },
    Check { name: "metric_commutant_residuals", tolerance: 1e-9, run: metric_commutant_res },
    Check { name: "metric_eta_inner_product_validity", tolerance: 1e-11, run: metric_eta_inner },
    Check { name: "metric_biorthonormal_reconstruction", tolerance: 1e-8, run: metric_biorth },
    Check { name: "dynamics_secular_metric_residual", tolerance: 1e-12, run: dyn_secular },
    Check { name: "dynamics_unitarity", tolerance: 1e-9, run: dyn_unitarity },
    Check { name: "dynamics_eta_unitarity", tolerance: 1e-9, run: dyn_eta_unitarity },
    Check { name: "dynamics_ck_normalization", tolerance: 1e-9, run: dyn_ck_norm },
    Check { name: "dynamics_probability_difference", tolerance: 1e-8, run: dyn_prob_diff },
    Check { name: "dynamics_rabi_closed_form", tolerance: 1e-8, run: dyn_rabi },
    Check { name: "dynamics_expectation_table", tolerance: 1e-10, run: dyn_expectation },
];

fn quat_modulus(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let p = sample::random_quaternion(rng);
        let q = sample::random_quaternion(rng);
        let rel = ((p * q).norm() - p.norm() * q.norm()).abs() / (1.0 + p.norm() * q.norm());
        worst = worst.max(rel);
    }
    worst
}

fn quat_associativity(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let p = sample::random_quaternion(rng);
        let q = sample::random_quaternion(rng);
        let r = sample::random_quaternion(rng);
        let err = ((p * q) * r - p * (q * r)).norm() / (1.0 + (p * q * r).norm());
        worst = worst.max(err);
    }
    worst
}

fn quat_noncommutativity(_rng: &mut ChaCha8Rng) -> f64 {
    (Quaternion::I * Quaternion::J + Quaternion::J * Quaternion::I).norm()
}

fn quat_split_join(rng: &mut ChaCha8Rng) -> f64 {
    for _ in 0..10_000 {
        let p = sample::random_quaternion(rng);
        let (a, b) = p.split();
        if Quaternion::join(a, b) != p {
            return 1.0;
        }
    }
    0.0
}

fn qmatrix_adjoint_product(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = sample::random_qmatrix(rng, 4, 4);
        let b = sample::random_qmatrix(rng, 4, 4);
        let lhs = a.matmul(&b).unwrap().adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint()).unwrap();
        let scale = a.frobenius_norm() * b.frobenius_norm();
        worst = worst.max(lhs.sub(&rhs).unwrap().frobenius_norm() / scale.max(1e-300));
    }
    worst
}

fn qmatrix_embed_hom(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = sample::random_qmatrix(rng, 3, 3);
        let b = sample::random_qmatrix(rng, 3, 3);
        let lhs = a.matmul(&b).unwrap().embed();
        let rhs = a.embed().dot(&b.embed());
        let err: f64 = (&lhs - &rhs).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(err / (a.frobenius_norm() * b.frobenius_norm()).max(1e-300));
    }
    worst
}

fn qmatrix_frobenius(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = sample::random_qmatrix(rng, 3, 4);
        let chi_sq: f64 = m.embed().iter().map(|z| z.norm_sqr()).sum();
        let f_sq = m.frobenius_norm().powi(2);
        worst = worst.max((chi_sq - 2.0 * f_sq).abs() / (1.0 + chi_sq));
    }
    worst
}

fn qmatrix_adjoint_inner(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = sample::random_qmatrix(rng, 4, 4);
        let u = sample::random_qvector(rng, 4);
        let v = sample::random_qvector(rng, 4);
        let lhs = u.inner(&m.apply(&v).unwrap());
        let rhs = m.adjoint().apply(&u).unwrap().inner(&v);
        worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    worst
}

fn qmatrix_right_linearity(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = sample::random_qmatrix(rng, 3, 3);
        let v = sample::random_qvector(rng, 3);
        let lambda = sample::random_quaternion(rng);
        let lhs = m.apply(&v.scale_right(lambda)).unwrap();
        let rhs = m.apply(&v).unwrap().scale_right(lambda);
        worst = worst.max(lhs.sub(&rhs).norm() / (1.0 + rhs.norm()));
    }
    worst
}

fn spectral_similarity(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let h = sample::random_quasi_anti_hermitian(rng, 3);
        let t = sample::random_invertible(rng, 3);
        let conj = t.matmul(&h).unwrap().matmul(&t.inverse().unwrap()).unwrap();
        let a = right_eigen(&h).unwrap();
        let b = right_eigen(&conj).unwrap();
        worst = worst.max(sample::multiset_distance(&a.eigenvalues, &b.eigenvalues));
    }
    worst
}

fn spectral_antiherm(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4] {
        let h = sample::random_anti_hermitian(rng, n);
        let spec = right_eigen(&h).unwrap();
        if !spec.diagonalizable {
            return 1.0;
        }
        for l in &spec.eigenvalues {
            worst = worst.max(l.re.abs() / (1.0 + l.norm()));
        }
    }
    worst
}

fn spectral_pairing(rng: &mut ChaCha8Rng) -> f64 {
    use ndarray_linalg::Eig;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let h = sample::random_qmatrix(rng, 3, 3);
        let spec = right_eigen(&h).unwrap();
        let (chi_vals, _) = h.embed().eig().unwrap();
        let mut expected: Vec<Complex64> = Vec::new();
        for l in &spec.eigenvalues {
            expected.push(*l);
            expected.push(l.conj());
        }
        let got: Vec<Complex64> = chi_vals.to_vec();
        let scale = h.frobenius_norm().max(1.0);
        worst = worst.max(sample::multiset_distance(&expected, &got) / scale);
    }
    worst
}

fn metric_prop1_forward(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let h = sample::random_quasi_anti_hermitian(rng, n);
        match build_metric(&h) {
            Ok(m) if m.positive => {
                worst = worst.max(verify_pseudo_antihermitian(&m.eta, &h).unwrap());
            }
            _ => return 1.0,
        }
    }
    worst
}

fn metric_prop1_negative(rng: &mut ChaCha8Rng) -> f64 {
    for _ in 0..10 {
        let n = rng.gen_range(2..=4);
        let h = sample::random_real_part_spectrum(rng, n, 0.3);
        if !matches!(build_metric(&h), Err(Error::NotQuasiAntiHermitian { .. })) {
            return 1.0;
        }
        let j = sample::random_jordan_block(rng, n);
        if !matches!(build_metric(&j), Err(Error::NotQuasiAntiHermitian { .. })) {
            return 1.0;
        }
    }
    0.0
}

fn spinorial_family() -> Vec<QMatrix> {
    vec![
        hamiltonian(1.0, Complex64::new(0.0, 0.0)),
        hamiltonian(0.0, Complex64::new(1.0, 0.0)),
        hamiltonian(0.0, Complex64::new(0.0, 1.0)),
    ]
}

fn metric_uniqueness(_rng: &mut ChaCha8Rng) -> f64 {
    let hs = spinorial_family();
    let (irr_q, cert_q) = is_irreducible(&hs, 2).unwrap();
    let (irr_c, cert_c) = is_irreducible_in(&hs, 2, ScalarField::Complex).unwrap();
    let sol_q = metric_solution_space(&hs, 2).unwrap();
    let ok = !irr_q && irr_c && cert_q.len() == 3 && cert_c.len() == 1 && sol_q.dim() == 3;
    if ok {
        0.0
    } else {
        1.0
    }
}

fn metric_commutant_res(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let hs = vec![
            sample::random_anti_hermitian(rng, 2),
            sample::random_anti_hermitian(rng, 2),
        ];
        let c = commutant(&hs, 2).unwrap();
        for t in &c.full_basis {
            for h in &hs {
                let res = t.matmul(h).unwrap().sub(&h.matmul(t).unwrap()).unwrap();
                worst = worst.max(
                    res.frobenius_norm()
                        / (t.frobenius_norm() * h.frobenius_norm()).max(1e-300),
                );
            }
        }
    }
    worst
}

fn metric_eta_inner(rng: &mut ChaCha8Rng) -> f64 {
    let sol = metric_solution_space(&spinorial_family(), 2).unwrap();
    let eta = sol.positive_example.unwrap().eta;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let u = sample::random_qvector(rng, 2);
        let v = sample::random_qvector(rng, 2);
        let uv = u.inner(&eta.apply(&v).unwrap());
        let vu = v.inner(&eta.apply(&u).unwrap());
        worst = worst.max((uv - vu.conj()).norm() / (1.0 + uv.norm()));
        let vv = v.inner(&eta.apply(&v).unwrap());
        if vv.w <= 0.0 {
            return 1.0;
        }
    }
    worst
}

fn metric_biorth(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(2..=4);
        let h = sample::random_quasi_anti_hermitian(rng, n);
        let scale = h.frobenius_norm().max(1.0);
        let sys = biorthonormal(&h).unwrap();
        worst = worst.max(sys.reconstruct().sub(&h).unwrap().frobenius_norm() / scale);
        for (a, pa) in sys.phi.iter().enumerate() {
            for (b, pb) in sys.psi.iter().enumerate() {
                let ip = pa.inner(pb);
                let expect = if a == b { Quaternion::ONE } else { Quaternion::ZERO };
                worst = worst.max((ip - expect).norm());
            }
        }
    }
    worst
}

fn dyn_secular(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (omega, rabi) = sample::random_omega_rabi(rng);
        let (a, z) = sample::random_metric_params(rng);
        let h = hamiltonian(omega, rabi);
        let eta = eta_model(a, z);
        worst = worst.max(verify_pseudo_antihermitian(&eta.eta, &h).unwrap());
    }
    worst
}

fn trajectory(rng: &mut ChaCha8Rng) -> (dynamics::ModelConfig, dynamics::EvolutionTrajectory) {
    let (omega, rabi) = sample::random_omega_rabi(rng);
    let z = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.28));
    let cfg = constant_config(omega, rabi, 1.0, z, 10.0, 501);
    let traj = evolve(&cfg).unwrap();
    (cfg, traj)
}

fn dyn_unitarity(rng: &mut ChaCha8Rng) -> f64 {
    let (_, traj) = trajectory(rng);
    traj.unitarity_residual.iter().cloned().fold(0.0, f64::max)
}

fn dyn_eta_unitarity(rng: &mut ChaCha8Rng) -> f64 {
    let (_, traj) = trajectory(rng);
    traj.eta_unitarity_residual.iter().cloned().fold(0.0, f64::max)
}

fn dyn_ck_norm(rng: &mut ChaCha8Rng) -> f64 {
    let (_, traj) = trajectory(rng);
    traj.ck
        .f
        .iter()
        .zip(&traj.ck.g)
        .map(|(f, g)| (f.norm_sqr() + g.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn dyn_prob_diff(rng: &mut ChaCha8Rng) -> f64 {
    let (cfg, traj) = trajectory(rng);
    let z2 = cfg.metric_z.norm_sqr();
    let mut worst = 0.0f64;
    for k in 0..traj.times.len() {
        let diff = traj.p_eta[k] - traj.p_standard[k];
        worst = worst.max((diff - z2 * traj.ck.f[k].norm_sqr()).abs());
    }
    worst
}

fn dyn_rabi(rng: &mut ChaCha8Rng) -> f64 {
    let (omega, rabi) = sample::random_omega_rabi(rng);
    let lam = (omega * omega / 4.0 + rabi.norm_sqr()).sqrt();
    let cfg = constant_config(omega, rabi, 1.0, Complex64::new(0.0, 0.0), 20.0, 401);
    let traj = evolve(&cfg).unwrap();
    let mut worst = 0.0f64;
    for (k, &t) in traj.times.iter().enumerate() {
        let expect = if lam > 0.0 {
            rabi.norm_sqr() * (lam * t).sin().powi(2) / (lam * lam)
        } else {
            0.0
        };
        worst = worst.max((traj.ck.g[k].norm_sqr() - expect).abs());
    }
    worst
}

fn dyn_expectation(rng: &mut ChaCha8Rng) -> f64 {
    use crate::qmatrix::QVector;
    let (j1, j2, j3) = j_operators();
    let plus = QVector::basis(2, 0);
    let minus = QVector::basis(2, 1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (omega, rabi) = sample::random_omega_rabi(rng);
        let z = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.28));
        let h = hamiltonian(omega, rabi);
        let eta = eta_model(1.0, z);
        let kz = Quaternion::K * Quaternion::from_complex(z);
        let jz = Quaternion::J * Quaternion::from_complex(z);
        let mut push = |err: f64| worst = worst.max(err);

        push(expectation(&j1, &plus, None).unwrap().norm());
        push((expectation(&j1, &plus, Some(&eta)).unwrap() + kz.scale(0.5)).norm());
        push((expectation(&j2, &plus, Some(&eta)).unwrap() + jz.scale(0.5)).norm());
        push((expectation(&j3, &plus, Some(&eta)).unwrap() - Quaternion::I.scale(0.5)).norm());
        push((expectation(&j3, &minus, None).unwrap() + Quaternion::I.scale(0.5)).norm());
        push((expectation(&h, &plus, None).unwrap() - Quaternion::I.scale(omega / 2.0)).norm());
        let e = expectation(&h, &plus, Some(&eta)).unwrap();
        push((e - (Quaternion::I.scale(omega / 2.0) - kz * Quaternion::from_complex(rabi))).norm());
        let e = expectation(&h, &minus, Some(&eta)).unwrap();
        push(
            (e - (Quaternion::I.scale(-omega / 2.0) + kz * Quaternion::from_complex(rabi.conj())))
                .norm(),
        );
        // Eq-13-style moduli
        let target = (omega * omega / 4.0 + z.norm_sqr() * rabi.norm_sqr()).sqrt();
        push((expectation(&h, &plus, Some(&eta)).unwrap().norm() - target).abs());
    }
    worst
}
