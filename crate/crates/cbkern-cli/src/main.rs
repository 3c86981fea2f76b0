//! Batch front door: generate instances, classify kernels, compute
//! decompositions, and run the verification suites.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 precondition or input error,
//! 3 numerical failure.

use cbkern_cli::error::CliError;
use cbkern_cli::gen::GenKind;
use cbkern_cli::io;
use cbkern_cli::run::{self, CommonOpts, DecomposeMode};
use cbkern_cli::verify::VerifyConfig;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cbkern",
    version,
    about = "Operator-valued kernels: class tests, Kolmogorov decompositions, completion SDPs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Cp,
    Hermitian,
    General,
    Difference,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> GenKind {
        match k {
            KindArg::Cp => GenKind::Cp,
            KindArg::Hermitian => GenKind::Hermitian,
            KindArg::General => GenKind::General,
            KindArg::Difference => GenKind::Difference,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Positive,
    Hermitian,
    General,
    Four,
}

impl From<ModeArg> for DecomposeMode {
    fn from(m: ModeArg) -> DecomposeMode {
        match m {
            ModeArg::Positive => DecomposeMode::Positive,
            ModeArg::Hermitian => DecomposeMode::Hermitian,
            ModeArg::General => DecomposeMode::General,
            ModeArg::Four => DecomposeMode::Four,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random kernel instance (deterministic for a fixed seed).
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a kernel: hermitian, completely positive, cb norm,
    /// off-diagonal decomposability.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = false)]
        verbose: bool,
    },
    /// Compute a Kolmogorov decomposition (or the four-CP split) and verify it.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Output prefix; writes <out>.decomp.json (or <out>.four.json) and
        /// <out>.report.json.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = false)]
        verbose: bool,
    },
    /// Run the randomized verification suites and emit a JSON report.
    VerifyTheorems {
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = false)]
        verbose: bool,
    },
    /// Check subset-chain compatibility: radii along the chain and the local
    /// solution predicate for a pair (default: the canonical completion).
    ChainCheck {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        pair: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = false)]
        verbose: bool,
    },
}

fn emit<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => io::write_json(path, value)?,
        None => {
            let text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Invalid(format!("serialization failed: {}", e)))?;
            println!("{}", text);
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Gen {
            kind,
            n,
            p,
            q,
            seed,
            out,
        } => {
            run::cmd_gen(kind.into(), n, p, q, seed, &out)?;
            Ok(0)
        }
        Cmd::Check {
            input,
            eps,
            max_iter,
            out,
            verbose,
        } => {
            let opts = CommonOpts {
                eps,
                max_iter,
                verbose,
            };
            let report = run::cmd_check(&input, &opts)?;
            emit(&report, out.as_ref())?;
            Ok(0)
        }
        Cmd::Decompose {
            input,
            mode,
            eps,
            max_iter,
            out,
            verbose,
        } => {
            let opts = CommonOpts {
                eps,
                max_iter,
                verbose,
            };
            let outcome = run::cmd_decompose(&input, mode.into(), &out, &opts)?;
            println!("{}", outcome.report_json);
            Ok(if outcome.passed { 0 } else { 1 })
        }
        Cmd::VerifyTheorems {
            trials,
            seed,
            n,
            p,
            q,
            eps,
            max_iter,
            out,
            verbose: _,
        } => {
            let cfg = VerifyConfig {
                trials,
                seed,
                n,
                p,
                q,
                eps,
                max_iter,
            };
            let report = run::cmd_verify(&cfg);
            emit(&report, out.as_ref())?;
            Ok(if report.all_passed { 0 } else { 1 })
        }
        Cmd::ChainCheck {
            kernel,
            chain,
            pair,
            eps,
            max_iter,
            out,
            verbose,
        } => {
            let opts = CommonOpts {
                eps,
                max_iter,
                verbose,
            };
            let report = run::cmd_chain_check(&kernel, &chain, pair.as_deref(), &opts)?;
            emit(&report, out.as_ref())?;
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("cbkern: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
