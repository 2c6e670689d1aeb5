//! The `glt` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
//! configuration or I/O errors. Data goes to stdout or files; diagnostics go
//! to stderr.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::config::ExperimentConfig;
use super::suites::{run_and_write, write_file, SuiteKind, DIAGONAL_TOL};
use super::with_thread_cap;
use crate::error::{Error, Result};
use crate::exponents::{exponent_budget, Exponent};
use crate::factorization::{build_pipeline, PipelineReport};
use crate::nuclear::NuclearRep;
use crate::spectra::{spectral_report, SPECTRAL_TOL};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "glt", version, about = "Nuclear trace and eigenvalue-summability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the reduced (p, s, r) triple for an exponent such as 7/3, 2 or inf.
    Exponents {
        #[arg(long)]
        p: Exponent,
    },
    /// Print the spectral report of a representation file.
    Spectrum {
        #[arg(long)]
        rep: PathBuf,
    },
    /// Build the factorization pipeline of a representation and write it as JSON.
    Factorize {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the experiment suites described by a config file.
    Suite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        only: Option<SuiteKind>,
        /// Output directory; defaults to the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Parses `argv` (program name first) and runs the chosen subcommand.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn load_rep(path: &Path) -> Result<NuclearRep> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Exponents { p } => {
            println!("{}", serde_json::to_string(&exponent_budget(p))?);
            Ok(true)
        }
        Command::Spectrum { rep } => {
            let rep = load_rep(&rep)?;
            let report = spectral_report(&rep)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            let pass = report.lidskii_residual <= SPECTRAL_TOL * (1.0 + rep.mu_sum())
                && report.trace_identity_holds();
            if !pass {
                eprintln!("lidskii residual {:e} over budget", report.lidskii_residual);
            }
            Ok(pass)
        }
        Command::Factorize { rep, out } => {
            let rep = load_rep(&rep)?;
            let rep = if rep.p() < Exponent::TWO {
                eprintln!("p = {} < 2: factorizing the adjoint on l_{}", rep.p(), rep.p().conjugate());
                rep.adjoint()
            } else {
                rep
            };
            let pipe = build_pipeline(&rep)?;
            let report = PipelineReport::new(&pipe, &rep)?;
            write_file(&out, &serde_json::to_string_pretty(&report)?)?;
            let default_tol = super::config::Tolerances::default().reconstruction;
            let pass = report.chain_exact
                && report.reconstruction_gap <= default_tol
                && report.diagonal_gap <= DIAGONAL_TOL;
            if !pass {
                eprintln!(
                    "reconstruction gap {:e}, diagonal gap {:e}, exact chain {}",
                    report.reconstruction_gap, report.diagonal_gap, report.chain_exact
                );
            }
            Ok(pass)
        }
        Command::Suite {
            config,
            only,
            out,
            seed,
        } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let dir = out.unwrap_or_else(|| config.out_dir.clone());
            let kinds: Vec<SuiteKind> = only.map_or_else(|| SuiteKind::ALL.to_vec(), |k| vec![k]);
            with_thread_cap(|| {
                let mut all = true;
                for kind in kinds {
                    let (summary, pass) = run_and_write(kind, &config, &dir)?;
                    eprintln!("{summary}");
                    all &= pass;
                }
                Ok(all)
            })?
        }
    }
}
