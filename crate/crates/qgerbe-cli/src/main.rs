//! Command-line surface for the qgerbe library: conformal factorization,
//! cocycle verification, tangent-cocycle generation, and self-tests.
//!
//! Contract: stdout carries JSON only, diagnostics go to stderr. Exit
//! codes: 0 success, 1 parse/usage error, 2 not conformal, 3 check
//! failed, 4 internal inconsistency between the direct checker and the
//! groupoid oracle.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use qgerbe::{
    build_tangent_cocycle, builtin_atlas, check_cocycle, conformal_factorize,
    groupoid_oracle_check, run_selftests, BitorsorCocycle, Error as QgError, JacobianMode,
    Matrix4, BUILTIN_ATLASES,
};

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_CONFORMAL: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(name = "qgerbe", version, about = "quaternionic gerbe toolkit")]
struct Cli {
    /// Print the JSON schemas used by every command, then exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a 4x4 matrix (JSON, 16 reals row-major) as a class p⊗q.
    Factorize(FactorizeArgs),
    /// Verify the cocycle identities of a cocycle file, with the
    /// groupoid oracle cross-check.
    CheckCocycle(CheckArgs),
    /// Generate the tangent cocycle of a builtin atlas.
    Tangent(TangentArgs),
    /// Run the built-in diagnostic suites.
    Selftest(SelftestArgs),
}

/// Optional config file; command-line flags take precedence over its
/// values, which take precedence over defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    tol: Option<f64>,
    seed: Option<u64>,
    samples: Option<usize>,
    jacobian: Option<JacobianKind>,
    fd_step: Option<f64>,
    out: Option<PathBuf>,
    filter: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum JacobianKind {
    Analytic,
    Fd,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file with defaults for the optional flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct FactorizeArgs {
    /// File holding the matrix JSON, or `-` for stdin.
    matrix_file: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// File holding the cocycle JSON, or `-` for stdin.
    cocycle_file: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TangentArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Builtin atlas name.
    #[arg(long)]
    atlas: String,
    /// Own sample points per overlap.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for sample-point generation.
    #[arg(long)]
    seed: Option<u64>,
    /// Jacobian evaluation mode.
    #[arg(long, value_enum)]
    jacobian: Option<JacobianKind>,
    /// Central-difference step for the fd mode.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Write the cocycle JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Only run checks whose `suite/name` contains this substring.
    #[arg(long)]
    filter: Option<String>,
    /// Seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Add one deliberately failing check (harness verification).
    #[arg(long, hide = true)]
    inject_failure: bool,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn library_exit_code(e: &QgError) -> u8 {
    match e {
        QgError::NotConformal { .. } => EXIT_NOT_CONFORMAL,
        _ => EXIT_USAGE,
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, String> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))
        }
    }
}

fn read_input(name: &str) -> Result<String, String> {
    if name == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(s)
    } else {
        std::fs::read_to_string(name).map_err(|e| format!("cannot read {name}: {e}"))
    }
}

fn check_tol(tol: f64) -> Result<f64, String> {
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(format!("tolerance must be positive, got {tol}"))
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("QG_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid QG_THREADS value `{v}`"),
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();

    if cli.schema {
        println!("{}", serde_json::to_string_pretty(&schemas()).unwrap());
        return ExitCode::SUCCESS;
    }

    let Some(command) = cli.command else {
        return fail(EXIT_USAGE, "no subcommand given (try --help)");
    };

    match command {
        Command::Factorize(args) => cmd_factorize(args),
        Command::CheckCocycle(args) => cmd_check_cocycle(args),
        Command::Tangent(args) => cmd_tangent(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

fn cmd_factorize(args: FactorizeArgs) -> ExitCode {
    let cfg = match load_config(&args.common.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let tol = match check_tol(args.common.tol.or(cfg.tol).unwrap_or(1e-9)) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let text = match read_input(&args.matrix_file) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let matrix: Matrix4 = match serde_json::from_str(&text) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_USAGE, format!("bad matrix JSON: {e}")),
    };
    match conformal_factorize(&matrix, tol) {
        Ok(elem) => {
            println!("{}", serde_json::to_string_pretty(&elem).unwrap());
            ExitCode::SUCCESS
        }
        Err(e) => fail(library_exit_code(&e), e),
    }
}

fn cmd_check_cocycle(args: CheckArgs) -> ExitCode {
    let cfg = match load_config(&args.common.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let tol = match check_tol(args.common.tol.or(cfg.tol).unwrap_or(1e-10)) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let text = match read_input(&args.cocycle_file) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let cocycle: BitorsorCocycle = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, format!("bad cocycle JSON: {e}")),
    };
    let direct = match check_cocycle(&cocycle, tol) {
        Ok(r) => r,
        Err(e) => return fail(library_exit_code(&e), e),
    };
    let oracle = match groupoid_oracle_check(&cocycle, tol) {
        Ok(r) => r,
        Err(e) => return fail(library_exit_code(&e), e),
    };
    if direct.pass != oracle.pass {
        return fail(
            EXIT_INCONSISTENT,
            format!(
                "checker disagreement: direct pass={} but groupoid oracle pass={}",
                direct.pass, oracle.pass
            ),
        );
    }
    eprintln!(
        "oracle agrees: pass={}, worst oracle residual {:.3e}",
        oracle.pass,
        oracle.worst.as_ref().map_or(0.0, |w| w.residual)
    );
    println!("{}", serde_json::to_string_pretty(&direct).unwrap());
    if direct.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn cmd_tangent(args: TangentArgs) -> ExitCode {
    let cfg = match load_config(&args.common.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let tol = match check_tol(args.common.tol.or(cfg.tol).unwrap_or(1e-9)) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let samples = args.samples.or(cfg.samples).unwrap_or(8);
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let kind = args.jacobian.or(cfg.jacobian).unwrap_or(JacobianKind::Analytic);
    let fd_step = args.fd_step.or(cfg.fd_step).unwrap_or(1e-5);
    if samples == 0 {
        return fail(EXIT_USAGE, "samples must be at least 1");
    }
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return fail(EXIT_USAGE, format!("fd step must be positive, got {fd_step}"));
    }
    let mode = match kind {
        JacobianKind::Analytic => JacobianMode::Analytic,
        JacobianKind::Fd => JacobianMode::FiniteDifference { h: fd_step },
    };
    let atlas = match builtin_atlas(&args.atlas, samples, seed) {
        Ok(a) => a,
        Err(e @ QgError::UnknownAtlas(_)) => {
            eprintln!("known atlases: {}", BUILTIN_ATLASES.join(", "));
            return fail(EXIT_USAGE, e);
        }
        Err(e) => return fail(library_exit_code(&e), e),
    };
    let cocycle = match build_tangent_cocycle(&atlas, tol, mode) {
        Ok(c) => c,
        Err(e) => return fail(library_exit_code(&e), e),
    };
    let json = serde_json::to_string_pretty(&cocycle).unwrap();
    let out = args.out.or(cfg.out);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, json.as_bytes()) {
                return fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display()));
            }
            eprintln!("wrote cocycle to {}", path.display());
        }
        None => println!("{json}"),
    }
    ExitCode::SUCCESS
}

fn cmd_selftest(args: SelftestArgs) -> ExitCode {
    let cfg = match load_config(&args.common.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let seed = args.seed.or(cfg.seed).unwrap_or(42);
    let filter = args.filter.or(cfg.filter);
    let summary = run_selftests(filter.as_deref(), seed, args.inject_failure);
    for r in &summary.results {
        eprintln!(
            "[{}] {}/{}: {}",
            if r.pass { "pass" } else { "FAIL" },
            r.suite,
            r.name,
            r.detail
        );
    }
    eprintln!("{} passed, {} failed", summary.passed, summary.failed);
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    if summary.failed == 0 && summary.total > 0 {
        ExitCode::SUCCESS
    } else if summary.total == 0 {
        fail(EXIT_USAGE, "filter matched no checks")
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn schemas() -> serde_json::Value {
    serde_json::json!({
        "quat": "[w, x, y, z] (4 reals)",
        "matrix4": "[16 reals, row-major]",
        "conformal_element": {"p": "quat", "q": "quat", "lambda": "real > 0"},
        "cocycle": {
            "charts": "[[quat per sample point] per chart]",
            "pairs": [{"ij": "[i, j]", "points": "[quat]",
                       "in_i": "[index into chart i]", "in_j": "[index into chart j]"}],
            "triples": [{"ijk": "[i, j, k]", "points": "[quat]",
                         "in_ij": "[index]", "in_jk": "[index]", "in_ik": "[index]"}],
            "quads": [{"ijkl": "[i, j, k, l]", "points": "[quat]",
                       "in_ijk": "[index]", "in_ijl": "[index]",
                       "in_ikl": "[index]", "in_jkl": "[index]"}],
            "fields": [{"overlap": {"pair": "[i, j]"}, "name": "alpha | p",
                        "kind": "R | Q", "values": "[quat]"}]
        },
        "atlas": {
            "name": "string",
            "charts": "chart count",
            "pairs": [{"ij": "[i, j]",
                       "chain": [{"op": "left_mul | right_mul | translate | invert | linear_map",
                                  "arg": "quat or matrix4 (absent for invert)"}],
                       "points": "[quat, chart-i coordinates]"}],
            "triples": [{"ijk": "[i, j, k]", "points": "[quat]"}],
            "quads": [{"ijkl": "[i, j, k, l]", "points": "[quat]"}]
        },
        "report": {
            "pass": "bool", "vacuous": "bool", "tol": "real",
            "worst": {"simplex": "[chart indices]", "point_index": "int", "residual": "real"},
            "per_simplex": [{"simplex": "[chart indices]", "level": "pair | triple | quad",
                             "max_residual": "real", "argmax_point": "int"}]
        },
        "selftest_summary": {
            "seed": "int", "total": "int", "passed": "int", "failed": "int",
            "results": [{"suite": "string", "name": "string", "pass": "bool", "detail": "string"}]
        },
        "run_config": {
            "tol": "real?", "seed": "int?", "samples": "int?",
            "jacobian": "analytic | fd (optional)", "fd_step": "real?",
            "out": "path?", "filter": "string?"
        }
    })
}
