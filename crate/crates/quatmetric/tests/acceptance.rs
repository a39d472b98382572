//! End-to-end acceptance gate. Each test covers one acceptance criterion
//! and prints a single PASS/FAIL line (visible with `--nocapture`; on
//! assertion failure the line reads FAIL and the test panics).

use num_complex::Complex64;
use quatmetric::dynamics::{
    constant_config, eta_model, evolve, expectation, hamiltonian, j_operators, ComplexSegment,
    EvolutionTrajectory, ModelConfig, RealSegment,
};
use quatmetric::error::{Error, NotQuasiAntiHermitianReason};
use quatmetric::metric::{
    biorthonormal, build_metric, commutant, commutant_in, hermitian_eigenvalues,
    verify_pseudo_antihermitian, ScalarField,
};
use quatmetric::qmatrix::{QMatrix, QVector};
use quatmetric::quat::Quaternion;
use quatmetric::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    number: u32,
    what: &'static str,
    passed: bool,
}

impl Criterion {
    fn start(number: u32, what: &'static str) -> Self {
        Criterion { number, what, passed: false }
    }
    fn pass(mut self) {
        self.passed = true;
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        // Write to the process stdout handle directly: the libtest harness
        // captures the print macros, and these one-line verdicts must be
        // visible in a plain `cargo test` run even when the test passes.
        use std::io::Write;
        let _ = writeln!(
            std::io::stdout(),
            "ACCEPTANCE {:>2}: {} — {}",
            self.number,
            if self.passed { "PASS" } else { "FAIL" },
            self.what
        );
    }
}

fn random_z<R: Rng>(rng: &mut R, max_mod: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..max_mod), rng.gen_range(0.0..std::f64::consts::TAU))
}

#[test]
fn criterion_01_metric_identity() {
    let c = Criterion::start(1, "pseudoanti-Hermiticity identity for the secular metric");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let (omega, rabi) = sample::random_omega_rabi(&mut rng);
        let (a, z) = sample::random_metric_params(&mut rng);
        let h = hamiltonian(omega, rabi);
        let eta = eta_model(a, z);
        let res = verify_pseudo_antihermitian(&eta.eta, &h).unwrap();
        assert!(res <= 1e-12, "residual {res} for omega={omega} rabi={rabi} a={a} z={z}");
    }
    c.pass();
}

#[test]
fn criterion_02_hamiltonian_moduli() {
    let c = Criterion::start(2, "mean-energy moduli in both descriptions, vanishing difference");
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let plus = QVector::basis(2, 0);
    let minus = QVector::basis(2, 1);
    for _ in 0..100 {
        let (omega, rabi) = sample::random_omega_rabi(&mut rng);
        let z = random_z(&mut rng, 0.99);
        let h = hamiltonian(omega, rabi);
        let eta = eta_model(1.0, z);
        let dressed_target = (omega * omega / 4.0 + z.norm_sqr() * rabi.norm_sqr()).sqrt();
        for v in [&plus, &minus] {
            let bare = expectation(&h, v, None).unwrap().norm();
            assert!((bare - omega.abs() / 2.0).abs() <= 1e-10);
            let dressed = expectation(&h, v, Some(&eta)).unwrap().norm();
            assert!((dressed - dressed_target).abs() <= 1e-10);
        }
    }
    // The gap between descriptions decreases monotonically as |z| -> 0.
    let (omega, rabi) = (1.3, Complex64::new(0.7, -0.4));
    let h = hamiltonian(omega, rabi);
    let gap = |zmod: f64| {
        let eta = eta_model(1.0, Complex64::new(zmod, 0.0));
        let plus = QVector::basis(2, 0);
        (expectation(&h, &plus, Some(&eta)).unwrap().norm()
            - expectation(&h, &plus, None).unwrap().norm())
        .abs()
    };
    let (g1, g2, g3) = (gap(0.1), gap(0.01), gap(0.001));
    assert!(g1 > g2 && g2 > g3, "gaps not monotone: {g1} {g2} {g3}");
    assert!(g3 < 1e-5);
    c.pass();
}

#[test]
fn criterion_03_expectation_table() {
    let c = Criterion::start(3, "expectation table for J1, J2, J3, H in both descriptions");
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (j1, j2, j3) = j_operators();
    let plus = QVector::basis(2, 0);
    let minus = QVector::basis(2, 1);
    let tol = 1e-10;
    for _ in 0..100 {
        let (omega, rabi) = sample::random_omega_rabi(&mut rng);
        let z = random_z(&mut rng, 0.99);
        let h = hamiltonian(omega, rabi);
        let eta = eta_model(1.0, z);
        let kz = Quaternion::K * Quaternion::from_complex(z);
        let jz = Quaternion::J * Quaternion::from_complex(z);

        // 1) <±|J1|±> = 0
        assert!(expectation(&j1, &plus, None).unwrap().norm() < tol);
        assert!(expectation(&j1, &minus, None).unwrap().norm() < tol);
        // 2) <±|ηJ1|±> = ∓(1/2)kz
        assert!((expectation(&j1, &plus, Some(&eta)).unwrap() + kz.scale(0.5)).norm() < tol);
        assert!((expectation(&j1, &minus, Some(&eta)).unwrap() - kz.scale(0.5)).norm() < tol);
        // 3) <±|J2|±> = 0
        assert!(expectation(&j2, &plus, None).unwrap().norm() < tol);
        assert!(expectation(&j2, &minus, None).unwrap().norm() < tol);
        // 4) <±|ηJ2|±> = -(1/2)jz on both states (direct evaluation of ηJ2)
        assert!((expectation(&j2, &plus, Some(&eta)).unwrap() + jz.scale(0.5)).norm() < tol);
        assert!((expectation(&j2, &minus, Some(&eta)).unwrap() + jz.scale(0.5)).norm() < tol);
        // 5) <±|J3|±> = <±|ηJ3|±> = ±i/2
        for (v, sign) in [(&plus, 1.0), (&minus, -1.0)] {
            let expect = Quaternion::I.scale(0.5 * sign);
            assert!((expectation(&j3, v, None).unwrap() - expect).norm() < tol);
            assert!((expectation(&j3, v, Some(&eta)).unwrap() - expect).norm() < tol);
        }
        // 6) <±|H|±> = ±(i/2)ω
        assert!((expectation(&h, &plus, None).unwrap() - Quaternion::I.scale(omega / 2.0)).norm() < tol);
        assert!((expectation(&h, &minus, None).unwrap() + Quaternion::I.scale(omega / 2.0)).norm() < tol);
        // 7) <+|ηH|+> = (i/2)ω - kzΩ
        let expect = Quaternion::I.scale(omega / 2.0) - kz * Quaternion::from_complex(rabi);
        assert!((expectation(&h, &plus, Some(&eta)).unwrap() - expect).norm() < tol);
        // 8) <-|ηH|-> = -(i/2)ω + kzΩ* (direct evaluation of ηH)
        let expect = Quaternion::I.scale(-omega / 2.0) + kz * Quaternion::from_complex(rabi.conj());
        assert!((expectation(&h, &minus, Some(&eta)).unwrap() - expect).norm() < tol);
    }
    c.pass();
}

fn chirped_config(samples: usize, z: Complex64) -> ModelConfig {
    let t_max = 12.0;
    let t_grid = (0..samples).map(|k| t_max * k as f64 / (samples - 1) as f64).collect();
    ModelConfig {
        omega: vec![
            RealSegment::Chirp { t_start: 0.0, t_end: 5.0, value_start: -2.0, value_end: 1.5 },
            RealSegment::Constant { t_start: 5.0, t_end: 8.0, value: 1.5 },
            RealSegment::Chirp { t_start: 8.0, t_end: t_max, value_start: 1.5, value_end: 0.2 },
        ],
        rabi: vec![
            ComplexSegment::Constant {
                t_start: 0.0,
                t_end: 4.0,
                value: Complex64::new(0.8, -0.3),
            },
            ComplexSegment::Chirp {
                t_start: 4.0,
                t_end: t_max,
                value_start: Complex64::new(0.8, -0.3),
                value_end: Complex64::new(-0.5, 1.1),
            },
        ],
        metric_a: 1.0,
        metric_z: z,
        t_grid,
    }
}

#[test]
fn criterion_04_probability_difference_chirped() {
    let c = Criterion::start(4, "P' - P = |z|^2 |F|^2 pointwise along a chirped trajectory");
    let z = Complex64::new(0.35, -0.45);
    let cfg = chirped_config(10_001, z);
    let traj = evolve(&cfg).unwrap();
    assert_eq!(traj.times.len(), 10_001);
    let z2 = z.norm_sqr();
    for k in 0..traj.times.len() {
        let diff = traj.p_eta[k] - traj.p_standard[k];
        assert!(
            (diff - z2 * traj.ck.f[k].norm_sqr()).abs() <= 1e-8,
            "t={} diff={} f2={}",
            traj.times[k],
            diff,
            traj.ck.f[k].norm_sqr()
        );
    }
    assert!(traj.p_standard[0].abs() <= 1e-12);
    assert!((traj.p_eta[0] - z2).abs() <= 1e-12);
    c.pass();
}

fn trajectory_invariants(traj: &EvolutionTrajectory, eta: &QMatrix) {
    let eta_scale = eta.frobenius_norm();
    for k in 0..traj.times.len() {
        let f = traj.ck.f[k];
        let g = traj.ck.g[k];
        assert!((f.norm_sqr() + g.norm_sqr() - 1.0).abs() <= 1e-9);
        let u = &traj.u[k];
        let utu = u.adjoint().matmul(u).unwrap();
        let resid = utu.sub(&QMatrix::identity(2)).unwrap().frobenius_norm();
        assert!(resid <= 1e-9, "U†U residual {resid}");
        let uteu = u.adjoint().matmul(eta).unwrap().matmul(u).unwrap();
        let resid = uteu.sub(eta).unwrap().frobenius_norm();
        assert!(resid <= 1e-9 * eta_scale, "U†ηU residual {resid}");
    }
}

#[test]
fn criterion_05_unitarity_both_descriptions() {
    let c = Criterion::start(5, "CK normalization, unitarity, and η-unitarity along trajectories");
    let z = Complex64::new(0.3, 0.2);
    let cfg = chirped_config(2001, z);
    let traj = evolve(&cfg).unwrap();
    trajectory_invariants(&traj, &eta_model(cfg.metric_a, cfg.metric_z).eta);
    let cfg = constant_config(1.0, Complex64::new(0.5, -0.25), 1.0, z, 20.0, 801);
    let traj = evolve(&cfg).unwrap();
    trajectory_invariants(&traj, &eta_model(cfg.metric_a, cfg.metric_z).eta);
    c.pass();
}

#[test]
fn criterion_06_rabi_oracle() {
    let c = Criterion::start(6, "constant-parameter |G|^2 matches the Rabi closed form");
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..10 {
        let (omega, rabi) = sample::random_omega_rabi(&mut rng);
        let lambda = (omega * omega / 4.0 + rabi.norm_sqr()).sqrt();
        let cfg = constant_config(omega, rabi, 1.0, Complex64::new(0.0, 0.0), 20.0, 501);
        let traj = evolve(&cfg).unwrap();
        for (k, &t) in traj.times.iter().enumerate() {
            let oracle = if lambda > 0.0 {
                rabi.norm_sqr() * (lambda * t).sin().powi(2) / (lambda * lambda)
            } else {
                0.0
            };
            assert!(
                (traj.ck.g[k].norm_sqr() - oracle).abs() <= 1e-8,
                "t={t} |G|^2={} oracle={oracle}",
                traj.ck.g[k].norm_sqr()
            );
        }
    }
    c.pass();
}

#[test]
fn criterion_07_proposition_1_both_directions() {
    let c = Criterion::start(7, "Proposition 1: metric construction and typed rejections");
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..100 {
        let n = rng.gen_range(2..=4);
        let h = sample::random_quasi_anti_hermitian(&mut rng, n);
        let metric = build_metric(&h).expect("construction must succeed");
        assert!(metric.positive, "certified metric must be positive definite");
        let res = verify_pseudo_antihermitian(&metric.eta, &h).unwrap();
        assert!(res <= 1e-8, "residual {res}");
    }
    for k in 0..100 {
        let n = rng.gen_range(2..=4);
        if k % 2 == 0 {
            let h = sample::random_real_part_spectrum(&mut rng, n, 0.3);
            match build_metric(&h) {
                Err(Error::NotQuasiAntiHermitian {
                    reason: NotQuasiAntiHermitianReason::RealSpectrumPart,
                }) => {}
                other => panic!("expected RealSpectrumPart error, got {other:?}"),
            }
        } else {
            let h = sample::random_jordan_block(&mut rng, n);
            match build_metric(&h) {
                Err(Error::NotQuasiAntiHermitian {
                    reason: NotQuasiAntiHermitianReason::NonDiagonalizable,
                }) => {}
                other => panic!("expected NonDiagonalizable error, got {other:?}"),
            }
        }
    }
    c.pass();
}

fn spinorial_family() -> Vec<QMatrix> {
    vec![
        hamiltonian(1.0, Complex64::new(0.0, 0.0)),
        hamiltonian(0.0, Complex64::new(1.0, 0.0)),
        hamiltonian(0.0, Complex64::new(0.0, 1.0)),
    ]
}

#[test]
fn criterion_08_commutant_dimensions() {
    let c = Criterion::start(8, "Hermitian commutant dim 3 with secular-metric pattern; complex dim 1");
    let family = spinorial_family();
    let com = commutant(&family, 2).unwrap();
    assert_eq!(com.dims.1, 3, "Hermitian commutant dimension");
    for b in &com.hermitian_basis {
        // secular pattern [[a, jz], [-jz, a]]: real diagonal entries equal
        // to each other, off-diagonal purely j/k with opposite signs.
        let a = b[(0, 0)];
        assert!(a.x.abs() <= 1e-9 && a.y.abs() <= 1e-9 && a.z.abs() <= 1e-9);
        assert!((b[(1, 1)] - a).norm() <= 1e-9);
        let off = b[(0, 1)];
        assert!(off.w.abs() <= 1e-9 && off.x.abs() <= 1e-9);
        assert!((b[(1, 0)] + off).norm() <= 1e-9);
    }
    let com_c = commutant_in(&family, 2, ScalarField::Complex).unwrap();
    assert_eq!(com_c.dims.1, 1, "complex-restricted Hermitian commutant dimension");
    c.pass();
}

#[test]
fn criterion_09_positivity_boundary() {
    let c = Criterion::start(9, "secular metric eigenvalues {a-|z|, a+|z|} and positivity flip");
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for _ in 0..100 {
        let (a, z) = sample::random_metric_params(&mut rng);
        let eta = eta_model(a, z);
        let ev = hermitian_eigenvalues(&eta.eta).unwrap();
        assert_eq!(ev.len(), 2);
        assert!((ev[0] - (a - z.norm())).abs() <= 1e-10);
        assert!((ev[1] - (a + z.norm())).abs() <= 1e-10);
        assert!(eta.positive);
    }
    // verdict flips across a = |z|
    for _ in 0..20 {
        let z = random_z(&mut rng, 2.0) + Complex64::new(0.1, 0.0);
        let eps = 1e-6;
        assert!(eta_model(z.norm() + eps, z).positive);
        assert!(!eta_model(z.norm() - eps, z).positive);
    }
    c.pass();
}

#[test]
fn criterion_10_biorthonormal_invariants() {
    let c = Criterion::start(10, "biorthonormal orthonormality, completeness, reconstruction");
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for _ in 0..50 {
        let n = rng.gen_range(2..=4);
        let h = sample::random_quasi_anti_hermitian(&mut rng, n);
        let scale = h.frobenius_norm().max(1.0);
        let sys = biorthonormal(&h).unwrap();
        // orthonormality <φ_m|ψ_n> = δ_mn
        for (m, phi) in sys.phi.iter().enumerate() {
            for (nn, psi) in sys.psi.iter().enumerate() {
                let ip = phi.inner(psi);
                let expect = if m == nn { Quaternion::ONE } else { Quaternion::ZERO };
                assert!((ip - expect).norm() <= 1e-8);
            }
        }
        // completeness Σ |ψ><φ| = 1
        let mut sum = QMatrix::zeros(n, n);
        for (psi, phi) in sys.psi.iter().zip(&sys.phi) {
            sum = sum.add(&psi.outer(phi)).unwrap();
        }
        assert!(sum.sub(&QMatrix::identity(n)).unwrap().frobenius_norm() <= 1e-8);
        // reconstruction H = Σ |ψ> iE <φ|
        let resid = sys.reconstruct().sub(&h).unwrap().frobenius_norm() / scale;
        assert!(resid <= 1e-8);
    }
    c.pass();
}

#[test]
fn criterion_11_determinism() {
    let c = Criterion::start(11, "byte-identical simulate and verify outputs across same-seed runs");
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_quatmetric");
    let dir = std::env::temp_dir().join("quatmetric-acceptance");
    std::fs::create_dir_all(&dir).unwrap();

    let cfg = constant_config(1.0, Complex64::new(0.5, 0.0), 1.0, Complex64::new(0.3, 0.1), 10.0, 101);
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();

    let mut sim_outputs = Vec::new();
    for run in 0..2 {
        let csv_path = dir.join(format!("run{run}.csv"));
        let out = Command::new(bin)
            .args(["simulate", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&csv_path)
            .output()
            .unwrap();
        assert!(out.status.success(), "simulate failed: {}", String::from_utf8_lossy(&out.stderr));
        sim_outputs.push((std::fs::read(&csv_path).unwrap(), out.stdout));
    }
    assert_eq!(sim_outputs[0], sim_outputs[1], "simulate outputs must be byte-identical");

    let mut verify_outputs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(bin).args(["verify", "--seed", "7"]).output().unwrap();
        assert!(out.status.success(), "verify failed: {}", String::from_utf8_lossy(&out.stderr));
        verify_outputs.push(out.stdout);
    }
    assert_eq!(verify_outputs[0], verify_outputs[1], "verify reports must be byte-identical");
    c.pass();
}
