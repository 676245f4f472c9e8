//! Command-line front end: run verification suites, evaluate the series
//! vectors, and print generator matrices.
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 configuration or
//! domain error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use qgarnier::error::Error;
use qgarnier::matrices::gen_matrix;
use qgarnier::qhyper::{eval_x, eval_y};
use qgarnier::scalar::bits_for_digits;
use qgarnier::specialization::DerivedGen;
use qgarnier::suite::{emit_report, run_suite, ParamSpec, SuiteConfig, SUITE_IDS};
use qgarnier::{CParams, QRat, Scalar};

#[derive(Parser)]
#[command(
    name = "qgarnier",
    version,
    about = "Verification suites for an affine Weyl group action on basic hypergeometric functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite (or all of them) and report per-check results
    Verify {
        /// suite id or "all"
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// working precision in decimal digits (default 60)
        #[arg(long)]
        prec: Option<u32>,
        /// series truncation tolerance (default 1e-45)
        #[arg(long)]
        tol: Option<f64>,
        /// config file (key-value document mirroring the suite config)
        #[arg(long)]
        params: Option<PathBuf>,
        /// also write the report to this path
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// list available suite ids and exit
        #[arg(long)]
        list: bool,
    },
    /// Evaluate the basic hypergeometric vector x or the q-Lauricella vector y
    Eval {
        /// which vector: x or y
        which: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// base q as a rational, e.g. 1/2
        #[arg(long)]
        q: String,
        /// comma-separated a_1..a_{n+1}
        #[arg(long)]
        a: String,
        /// comma-separated b_1..b_{n+1} (b_{n+1} must equal q)
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 60)]
        prec: u32,
        #[arg(long, default_value_t = 1e-45)]
        tol: f64,
    },
    /// Print the matrix attached to a generator: prefactor exponent and core
    Matrix {
        /// token: p<i>, pp<i>, sigma, sigma-prime, pi1, pi2, tau-c,
        /// tau-<i> or tau-<i>-<j>
        token: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long, default_value_t = 60)]
        prec: u32,
        /// sampler seed used when explicit parameters are not given
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_rational(s: &str) -> Result<Scalar, Error> {
    QRat::from_str(s.trim())
        .map(Scalar::Exact)
        .map_err(|e| Error::ConfigError(format!("bad rational {s:?}: {e}")))
}

fn parse_list(s: &str) -> Result<Vec<Scalar>, Error> {
    s.split(',').map(parse_rational).collect()
}

fn parse_token(s: &str, n: usize) -> Result<DerivedGen, Error> {
    let t = s.trim().to_lowercase().replace('_', "-");
    if let Some(i) = t.strip_prefix("pp") {
        if let Ok(i) = i.parse::<i64>() {
            return Ok(DerivedGen::PPrime(i));
        }
    }
    if let Some(i) = t.strip_prefix('p') {
        if let Ok(i) = i.parse::<i64>() {
            return Ok(DerivedGen::P(i));
        }
    }
    match t.as_str() {
        "sigma" => return Ok(DerivedGen::Sigma),
        "sigma-prime" | "sigmap" => return Ok(DerivedGen::SigmaPrime),
        "pi1" => return Ok(DerivedGen::Pi1),
        "pi2" => return Ok(DerivedGen::Pi2),
        "tau-c" | "tauc" => return Ok(DerivedGen::TauC),
        _ => {}
    }
    if let Some(rest) = t.strip_prefix("tau-") {
        let parts: Vec<&str> = rest.split('-').collect();
        match parts.as_slice() {
            [i] => {
                let i = i.parse::<i64>().map_err(|_| bad_token(s))?;
                return Ok(DerivedGen::TauI(i));
            }
            [i, j] => {
                let i = i.parse::<i64>().map_err(|_| bad_token(s))?;
                let j = j.parse::<i64>().map_err(|_| bad_token(s))?;
                return Ok(DerivedGen::TauIJ(i, j));
            }
            _ => {}
        }
    }
    let _ = n;
    Err(bad_token(s))
}

fn bad_token(s: &str) -> Error {
    Error::ConfigError(format!(
        "unknown token {s:?}; expected p<i>, pp<i>, sigma, sigma-prime, pi1, pi2, tau-c, tau-<i>, tau-<i>-<j>"
    ))
}

fn build_cparams(n: usize, q: &str, a: &str, b: &str, c: &str) -> Result<CParams, Error> {
    CParams::new(
        n,
        parse_list(a)?,
        parse_list(b)?,
        parse_rational(c)?,
        parse_rational(q)?,
    )
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            suite,
            n,
            trials,
            seed,
            prec,
            tol,
            params,
            out,
            format,
            list,
        } => {
            if list {
                for id in SUITE_IDS {
                    println!("{id}");
                }
                return Ok(true);
            }
            // config file is the base; explicit flags override; the
            // positional suite selector always wins
            let mut cfg = SuiteConfig::default();
            if let Some(path) = params {
                let body = std::fs::read_to_string(&path)?;
                let file_cfg: FileConfig = toml::from_str(&body)
                    .map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))?;
                file_cfg.apply(&mut cfg);
            }
            cfg.suites = vec![suite];
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(p) = prec {
                cfg.precision = p;
            }
            if let Some(t) = tol {
                cfg.tol = t;
            }
            let report = run_suite(&cfg)?;
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?
                ),
                Format::Table => print!("{}", report.to_table()),
            }
            if let Some(path) = out {
                emit_report(
                    &report,
                    &path,
                    match format {
                        Format::Json => "json",
                        Format::Table => "table",
                    },
                )?;
            }
            Ok(report.overall)
        }
        Command::Eval {
            which,
            n,
            q,
            a,
            b,
            c,
            prec,
            tol,
        } => {
            let cp = build_cparams(n, &q, &a, &b, &c)?;
            cp.check_numeric_domain()?;
            let tol_real = qgarnier::BigReal::from_f64(tol, bits_for_digits(prec));
            let v = match which.as_str() {
                "x" => eval_x(&cp, &tol_real)?,
                "y" => eval_y(&cp, &tol_real)?,
                other => {
                    return Err(Error::ConfigError(format!(
                        "expected x or y, got {other:?}"
                    )))
                }
            };
            for (j, val) in v.vals.iter().enumerate() {
                println!("{}_{} = {}", which, j + 1, val);
            }
            println!(
                "truncation: terms={} rho_hat={:.4} bound={:.3e} converged={}",
                v.trunc.terms, v.trunc.rho_hat, v.trunc.bound, v.trunc.converged
            );
            Ok(true)
        }
        Command::Matrix {
            token,
            n,
            q,
            a,
            b,
            c,
            prec,
            seed,
        } => {
            let g = parse_token(&token, n)?;
            let cp = match (q, a, b, c) {
                (Some(q), Some(a), Some(b), Some(c)) => build_cparams(n, &q, &a, &b, &c)?,
                (None, None, None, None) => qgarnier::suite::sample_cparams(seed, n)?,
                _ => {
                    return Err(Error::ConfigError(
                        "give all of --q --a --b --c or none".into(),
                    ))
                }
            };
            let cp = cp.to_real(bits_for_digits(prec))?;
            let m = gen_matrix(g, &cp)?;
            println!("token: {g:?}");
            println!("gamma: {}", m.gamma);
            println!("core:");
            for row in &m.core.0 {
                let cells: Vec<String> = row.iter().map(|e| format!("{e}")).collect();
                println!("  [{}]", cells.join(", "));
            }
            Ok(true)
        }
    }
}

/// On-disk config mirroring the suite configuration; explicit parameters are
/// exact rationals in "p/q" form.
#[derive(serde::Deserialize)]
struct FileConfig {
    n: Option<usize>,
    seed: Option<u64>,
    trials: Option<usize>,
    precision: Option<u32>,
    tol: Option<f64>,
    suites: Option<Vec<String>>,
    params: Option<ParamSpec>,
}

impl FileConfig {
    fn apply(self, cfg: &mut SuiteConfig) {
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(p) = self.precision {
            cfg.precision = p;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(s) = self.suites {
            cfg.suites = s;
        }
        if self.params.is_some() {
            cfg.params_override = self.params;
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::ConfigError(_) | Error::DomainError(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
