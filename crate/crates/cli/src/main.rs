use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vanvleck_cli::commands::{
    cmd_count, cmd_emit_roots, cmd_solve, cmd_transform_infinity, cmd_verify, parse_checks,
    Outcome, RootFormat,
};
use vanvleck_cli::files::to_json;
use vanvleck_cli::{exit_code, CliError};
use vanvleck_core::SolveOptions;

/// Van Vleck and Stieltjes polynomials of higher Lamé operators.
///
/// Exit status: 0 ok, 1 failed verification or I/O, 2 resonance,
/// 3 unsupported Fuchs index, 4 unusable input.
#[derive(Parser)]
#[command(name = "vanvleck", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find every pair (V, S) with deg S = N and write a pairs file.
    Solve {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Relative residual a pair must reach.
        #[arg(long)]
        tol_residual: Option<f64>,
        /// Distance under which roots are merged into one cluster.
        #[arg(long)]
        tol_cluster: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a pairs file against its operator.
    Verify {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        /// Comma-separated subset of count,residual,hull,disk,classical,coprime,polya, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write the roots of Q_k, V and S as plot data.
    EmitRoots {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, default_value = "csv")]
        format: RootFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count pairs on every level up to N and compare with the closed forms.
    Count {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        max_degree: usize,
        /// Print the table as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Rewrite an operator with negative Fuchs index in y = 1/z.
    TransformInfinity {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            operator,
            degree,
            tol_residual,
            tol_cluster,
            out,
        } => {
            let mut opts = SolveOptions::default();
            if let Some(t) = tol_residual {
                opts.residual_tol = t;
            }
            opts.cluster_tol = tol_cluster.or(opts.cluster_tol);
            let file = cmd_solve(&operator, degree, &opts, &out)?;
            println!(
                "{} pairs ({} with multiplicity, expected {}) -> {}",
                file.pairs.len(),
                file.header.count_with_multiplicity,
                file.header.expected_count,
                out.display()
            );
        }
        Command::Verify {
            operator,
            pairs,
            checks,
            json,
        } => {
            let checks = parse_checks(&checks).map_err(|message| CliError::Parse {
                path: "--checks".into(),
                message,
            })?;
            let results = cmd_verify(&operator, &pairs, &checks)?;
            if json {
                print!("{}", to_json(&results));
            } else {
                for r in &results {
                    println!("{r}");
                }
            }
            let failed = results
                .iter()
                .filter(|r| r.outcome == Outcome::Fail)
                .count();
            if failed > 0 {
                return Err(CliError::VerificationFailed { failed });
            }
        }
        Command::EmitRoots { pairs, format, out } => {
            let rows = cmd_emit_roots(&pairs, format, &out)?;
            println!("{rows} rows -> {}", out.display());
        }
        Command::Count {
            operator,
            max_degree,
            json,
        } => {
            let (table, error) = cmd_count(&operator, max_degree, &SolveOptions::default())?;
            if json {
                print!("{}", to_json(&table));
            } else {
                println!("{table}");
            }
            if let Some(e) = error {
                return Err(e.into());
            }
            if let Some(l) = table.levels.iter().find(|l| !l.nonresonant) {
                return Err(CliError::Core(vanvleck_core::Error::Resonance {
                    level: l.level,
                    index: l.witnesses.first().copied().unwrap_or(l.level),
                }));
            }
            if !table.matches() {
                return Err(CliError::VerificationFailed { failed: 1 });
            }
        }
        Command::TransformInfinity { operator, out } => {
            let t = cmd_transform_infinity(&operator, &out)?;
            println!("order {} operator -> {}", t.k, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors share status 4 with other unusable input; clap's own
    // default of 2 would read as resonance.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vanvleck: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
