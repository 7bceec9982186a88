use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;
use sfinv::request::{parse_fiber, BrieskornRequest, PerturbRequest, SeifertRequest, SweepRequest};
use sfinv::{render, run, run_batch, to_json_text, write_csv, CliError, Format, Request, EXIT_OK};
use sfinv_core::algebra::LaurentPoly;

#[derive(Parser)]
#[command(name = "sfinv", version, about = "Invariants of Seifert-fibered homology spheres")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print key-sorted JSON.
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Print a plain-text table (default).
    #[arg(long, global = true)]
    table: bool,
    /// Write the report to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Report on the Brieskorn sphere with the given exponents.
    Brieskorn {
        #[arg(required = true, allow_negative_numbers = true)]
        exponents: Vec<i64>,
        /// Casson invariant, for four or more exponents.
        #[arg(long, allow_negative_numbers = true)]
        casson: Option<i64>,
        /// Poincaré polynomial of the SU(2) summand, e.g. "2" or "T^-2 + 1".
        #[arg(long)]
        su2_poly: Option<LaurentPoly>,
        /// Normalized Poincaré polynomial of the SU(2) summand.
        #[arg(long)]
        su2_hat_poly: Option<LaurentPoly>,
    },
    /// Report on Seifert data (b; a1/g1, ..., an/gn).
    Seifert {
        #[arg(long, allow_negative_numbers = true)]
        b: i64,
        #[arg(long = "fiber", value_name = "ALPHA/GAMMA", value_parser = parse_fiber, required = true)]
        fibers: Vec<(i64, i64)>,
        #[arg(long, allow_negative_numbers = true)]
        casson: Option<i64>,
        #[arg(long)]
        su2_poly: Option<LaurentPoly>,
        #[arg(long)]
        su2_hat_poly: Option<LaurentPoly>,
    },
    /// Check the identity chain on all pairwise-coprime triples up to MAX.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        max: i64,
    },
    /// Run a localisation experiment on a built-in scenario.
    Perturb {
        #[arg(long)]
        scenario: String,
        /// Comma-separated list of perturbation parameters.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
        /// Exit with status 1 when a check fails.
        #[arg(long)]
        assert: bool,
        /// Dump (epsilon, point, value, index) rows to FILE.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Process newline-delimited JSON requests, one report line per input line.
    Batch { file: PathBuf },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::validation("io", format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::validation("io", e.to_string()))
        }
    }
}

fn fail(err: &CliError) -> ExitCode {
    print!("{}", to_json_text(&err.to_json()));
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let err = CliError::validation("usage", e.kind().to_string())
                .with("detail", json!(e.render().to_string()));
            return fail(&err);
        }
    };
    let format = if cli.json { Format::Json } else { Format::Table };

    let (request, csv) = match cli.command {
        Command::Batch { file } => {
            let contents = match std::fs::read_to_string(&file) {
                Ok(c) => c,
                Err(e) => return fail(&CliError::validation("io", format!("{}: {e}", file.display()))),
            };
            let output = run_batch(&contents);
            if let Err(e) = emit(&cli.out, &output.text()) {
                return fail(&e);
            }
            return ExitCode::from(output.exit_code() as u8);
        }
        Command::Brieskorn { exponents, casson, su2_poly, su2_hat_poly } => (
            Request::Brieskorn(BrieskornRequest { exponents, casson, su2_poly, su2_hat_poly }),
            None,
        ),
        Command::Seifert { b, fibers, casson, su2_poly, su2_hat_poly } => (
            Request::Seifert(SeifertRequest { b, fibers, casson, su2_poly, su2_hat_poly }),
            None,
        ),
        Command::Verify { max } => (Request::VerifySweep(SweepRequest { max }), None),
        Command::Perturb { scenario, eps, assert, csv } => {
            (Request::Perturb(PerturbRequest { scenario, eps, assert }), csv)
        }
    };

    let outcome = match run(&request) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let (Some(path), Some(table)) = (&csv, &outcome.csv) {
        if let Err(e) = write_csv(path, table) {
            return fail(&e);
        }
    }
    if let Err(e) = emit(&cli.out, &render(&outcome, format)) {
        return fail(&e);
    }
    if outcome.ok {
        ExitCode::from(EXIT_OK as u8)
    } else {
        ExitCode::from(sfinv::EXIT_CHECK as u8)
    }
}
