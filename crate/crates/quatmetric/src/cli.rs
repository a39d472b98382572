//! Command-line interface: `simulate`, `spectrum`, `metric`, `verify`.
//!
//! Exit codes: 0 success, 1 numeric invariant failure, 2 input error,
//! 3 indefinite-metric physics flag (unless `--allow-indefinite`).
//!
//! All floating-point output is formatted with 17 significant digits so
//! repeated runs with the same inputs are byte-identical.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::dynamics::{evolve, ModelConfig};
use crate::error::Error;
use crate::metric::{
    build_metric, is_irreducible, is_irreducible_in, metric_solution_space,
    metric_solution_space_in, verify_pseudo_antihermitian, ScalarField,
};
use crate::qmatrix::QMatrix;
use crate::spectral::right_eigen;
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INDEFINITE: i32 = 3;

const IMAGINARY_SPECTRUM_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(name = "quatmetric", version, about = "Quaternionic metric-operator toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a JSON input file, or inline JSON (starts with '{' or '[')
    #[arg(long)]
    config: String,
    /// Output path; primary output goes to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the two-level model and emit a CSV trajectory plus a JSON summary
    Simulate {
        #[command(flatten)]
        io: ConfigArgs,
        /// Proceed even if the configured metric is not positive definite
        #[arg(long)]
        allow_indefinite: bool,
    },
    /// Right-eigenvalue decomposition of a quaternionic matrix
    Spectrum {
        #[command(flatten)]
        io: ConfigArgs,
        /// Tolerance for the imaginary-spectrum classification
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Metric construction, solution space, and irreducibility for a family
    Metric {
        #[command(flatten)]
        io: ConfigArgs,
    },
    /// Run the named invariant suite
    Verify {
        /// RNG seed for the suite
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every invariant tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by `main` and by the CLI integration tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    if let Err(msg) = check_thread_env() {
        eprintln!("error: {msg}");
        return EXIT_INPUT;
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success exit.
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Simulate { io, allow_indefinite } => cmd_simulate(&io, allow_indefinite),
        Command::Spectrum { io, tol } => cmd_spectrum(&io, tol),
        Command::Metric { io } => cmd_metric(&io),
        Command::Verify { seed, tol, out } => cmd_verify(seed, tol, out.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

type CmdResult = std::result::Result<i32, (i32, String)>;

/// `QUATMETRIC_THREADS` caps worker parallelism. Execution is currently
/// single-threaded, which satisfies any positive cap; the value is still
/// validated so typos fail loudly.
fn check_thread_env() -> std::result::Result<(), String> {
    match std::env::var("QUATMETRIC_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(format!(
                "QUATMETRIC_THREADS must be a positive integer, got {raw:?}"
            )),
        },
        Err(_) => Ok(()),
    }
}

fn load_input(spec: &str) -> std::result::Result<String, (i32, String)> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(spec.to_string());
    }
    fs::read_to_string(spec).map_err(|e| (EXIT_INPUT, format!("cannot read {spec}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> std::result::Result<T, (i32, String)> {
    serde_json::from_str(text).map_err(|e| (EXIT_INPUT, format!("invalid input JSON: {e}")))
}

fn emit(out: Option<&std::path::Path>, body: &str) -> std::result::Result<(), (i32, String)> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| (EXIT_INPUT, format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| (EXIT_INPUT, format!("cannot write stdout: {e}")))
        }
    }
}

fn numeric_exit(e: &Error) -> i32 {
    match e {
        Error::ConfigInvalid(_) | Error::DimensionMismatch(_) => EXIT_INPUT,
        _ => EXIT_INVARIANT,
    }
}

// ---------------------------------------------------------------------------
// JSON / CSV formatting (17 significant digits, deterministic)
// ---------------------------------------------------------------------------

fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

fn json_f64_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| fmt17(*x)).collect();
    format!("[{}]", items.join(","))
}

fn json_qmatrix(m: &QMatrix) -> String {
    let mut rows = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let mut cols = Vec::with_capacity(m.cols());
        for c in 0..m.cols() {
            let q = m[(r, c)];
            cols.push(format!(
                "[{},{},{},{}]",
                fmt17(q.w),
                fmt17(q.x),
                fmt17(q.y),
                fmt17(q.z)
            ));
        }
        rows.push(format!("[{}]", cols.join(",")));
    }
    format!(
        "{{\"rows\":{},\"cols\":{},\"entries\":[{}]}}",
        m.rows(),
        m.cols(),
        rows.join(",")
    )
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_simulate(io: &ConfigArgs, allow_indefinite: bool) -> CmdResult {
    let config: ModelConfig = parse_json(&load_input(&io.config)?)?;
    config
        .validate()
        .map_err(|e| (EXIT_INPUT, e.to_string()))?;
    let eta_positive = config.metric_a > config.metric_z.norm();
    if !eta_positive && !allow_indefinite {
        return Err((
            EXIT_INDEFINITE,
            format!(
                "metric is not positive definite (a = {}, |z| = {}); pass --allow-indefinite to proceed",
                config.metric_a,
                config.metric_z.norm()
            ),
        ));
    }
    let traj = evolve(&config).map_err(|e| (numeric_exit(&e), e.to_string()))?;

    let mut csv = String::from("t,ReF,ImF,ReG,ImG,P,P_eta,unitarity_residual,eta_unitarity_residual\n");
    for k in 0..traj.times.len() {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt17(traj.times[k]),
            fmt17(traj.ck.f[k].re),
            fmt17(traj.ck.f[k].im),
            fmt17(traj.ck.g[k].re),
            fmt17(traj.ck.g[k].im),
            fmt17(traj.p_standard[k]),
            fmt17(traj.p_eta[k]),
            fmt17(traj.unitarity_residual[k]),
            fmt17(traj.eta_unitarity_residual[k]),
        ));
    }
    emit(io.out.as_deref(), &csv)?;

    let max = |xs: &[f64]| xs.iter().cloned().fold(0.0f64, f64::max);
    let summary = format!(
        "{{\"max_unitarity_residual\":{},\"max_eta_unitarity_residual\":{},\"final_P\":{},\"final_P_eta\":{},\"eta_positive\":{}}}\n",
        fmt17(max(&traj.unitarity_residual)),
        fmt17(max(&traj.eta_unitarity_residual)),
        fmt17(*traj.p_standard.last().unwrap()),
        fmt17(*traj.p_eta.last().unwrap()),
        eta_positive
    );
    print!("{summary}");
    Ok(EXIT_OK)
}

fn cmd_spectrum(io: &ConfigArgs, tol: Option<f64>) -> CmdResult {
    let m: QMatrix = parse_json(&load_input(&io.config)?)?;
    if m.rows() != m.cols() {
        return Err((EXIT_INPUT, "spectrum requires a square matrix".into()));
    }
    let spec = right_eigen(&m).map_err(|e| (numeric_exit(&e), e.to_string()))?;
    let pairs: Vec<String> = spec
        .eigenvalues
        .iter()
        .map(|l| format!("[{},{}]", fmt17(l.re), fmt17(l.im)))
        .collect();
    let body = format!(
        "{{\"eigenvalues\":[{}],\"moduli\":{},\"diagonalizable\":{},\"imaginary_spectrum\":{}}}\n",
        pairs.join(","),
        json_f64_list(&spec.eigenvalue_moduli()),
        spec.diagonalizable,
        spec.is_imaginary_spectrum(tol.unwrap_or(IMAGINARY_SPECTRUM_TOL))
    );
    emit(io.out.as_deref(), &body)?;
    Ok(EXIT_OK)
}

fn cmd_metric(io: &ConfigArgs) -> CmdResult {
    let text = load_input(&io.config)?;
    // Accept either a single matrix object or a family as a JSON array.
    let family: Vec<QMatrix> = if text.trim_start().starts_with('[') {
        parse_json(&text)?
    } else {
        vec![parse_json::<QMatrix>(&text)?]
    };
    if family.is_empty() {
        return Err((EXIT_INPUT, "metric requires at least one matrix".into()));
    }
    let n = family[0].rows();
    for m in &family {
        if m.rows() != m.cols() || m.rows() != n {
            return Err((
                EXIT_INPUT,
                "metric requires square matrices of equal dimension".into(),
            ));
        }
    }
    for h in &family {
        match build_metric(h) {
            Ok(_) => {}
            Err(Error::NotQuasiAntiHermitian { reason }) => {
                let body = format!(
                    "{{\"quasianti_hermitian\":false,\"reason\":\"{reason}\",\"eta\":null,\"residual\":null,\"positive\":false,\"solution_space_dim\":null,\"irreducible\":null}}\n"
                );
                emit(io.out.as_deref(), &body)?;
                return Ok(EXIT_OK);
            }
            Err(e) => return Err((numeric_exit(&e), e.to_string())),
        }
    }
    let sol = metric_solution_space(&family, n).map_err(|e| (numeric_exit(&e), e.to_string()))?;
    let (irreducible, _) = is_irreducible(&family, n).map_err(|e| (numeric_exit(&e), e.to_string()))?;
    let (eta_json, residual_json, positive) = match &sol.positive_example {
        Some(metric) => {
            let mut worst = 0.0f64;
            for h in &family {
                let r = verify_pseudo_antihermitian(&metric.eta, h)
                    .map_err(|e| (numeric_exit(&e), e.to_string()))?;
                worst = worst.max(r);
            }
            (json_qmatrix(&metric.eta), fmt17(worst), true)
        }
        None => ("null".to_string(), "null".to_string(), false),
    };
    // For an all-complex family, also solve with the complex scalar field
    // restriction (where the metric is unique up to scale iff irreducible).
    let (cdim_json, cirr_json) = if family.iter().all(|m| m.is_complex(1e-14)) {
        let csol = metric_solution_space_in(&family, n, ScalarField::Complex)
            .map_err(|e| (numeric_exit(&e), e.to_string()))?;
        let (cirr, _) = is_irreducible_in(&family, n, ScalarField::Complex)
            .map_err(|e| (numeric_exit(&e), e.to_string()))?;
        (csol.dim().to_string(), cirr.to_string())
    } else {
        ("null".to_string(), "null".to_string())
    };
    let body = format!(
        "{{\"quasianti_hermitian\":true,\"residual\":{residual_json},\"eta\":{eta_json},\"positive\":{positive},\"solution_space_dim\":{},\"irreducible\":{irreducible},\"complex_solution_space_dim\":{cdim_json},\"complex_irreducible\":{cirr_json}}}\n",
        sol.dim()
    );
    emit(io.out.as_deref(), &body)?;
    Ok(EXIT_OK)
}

fn cmd_verify(seed: u64, tol: Option<f64>, out: Option<&std::path::Path>) -> CmdResult {
    let reports = run_suite(seed, tol);
    let failures = reports.iter().filter(|r| !r.pass).count();
    let items: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "{{\"name\":\"{}\",\"residual\":{},\"tolerance\":{},\"pass\":{}}}",
                r.name,
                fmt17(r.residual),
                fmt17(r.tolerance),
                r.pass
            )
        })
        .collect();
    let body = format!(
        "{{\"seed\":{seed},\"invariants\":[{}],\"checked\":{},\"failed\":{failures}}}\n",
        items.join(","),
        reports.len()
    );
    emit(out, &body)?;
    for r in &reports {
        eprintln!(
            "{} {} (residual {}, tol {})",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            fmt17(r.residual),
            fmt17(r.tolerance)
        );
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_INVARIANT })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_is_valid_json_number() {
        for x in [0.0, -0.0, 1.5, -2.75e-11, 3.141592653589793e15] {
            let s = fmt17(x);
            let parsed: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(parsed.to_bits(), if x == 0.0 { parsed.to_bits() } else { x.to_bits() });
        }
    }

    #[test]
    fn fmt17_round_trips_doubles() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(-1e6..1e6);
            let back: f64 = fmt17(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn qmatrix_json_round_trips() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let m = crate::sample::random_qmatrix(&mut rng, 3, 2);
        let back: QMatrix = serde_json::from_str(&json_qmatrix(&m)).unwrap();
        assert_eq!(m, back);
    }
}
