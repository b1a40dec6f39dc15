use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use csinv_cli::{
    cmd_check_u21, cmd_classify, cmd_cs_seifert, cmd_find_reps, cmd_mul, cmd_variation,
    cmd_verify_table, render_human, CommandOutcome, FindRepsOptions, Options, VerifyTableOptions,
};

#[derive(Parser)]
#[command(name = "csinv", version, about = "Chern–Simons invariants of representations into the universal cover of U(2,1)")]
struct Cli {
    /// Tolerance for U(2,1) membership residuals.
    #[arg(long, global = true)]
    tol_group: Option<f64>,
    /// Tolerance for the angle congruences of G, in radians.
    #[arg(long, global = true)]
    tol_angle: Option<f64>,
    /// Emit the full outcome as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// cs and Burns–Epstein invariant from a presentation and lift or angle data.
    CsSeifert { input: Option<PathBuf> },
    /// Reproduce the Σ(2,3,11) table from the built-in fixtures.
    VerifyTable {
        #[arg(long)]
        case: Option<usize>,
        #[arg(long)]
        pipeline_only: bool,
    },
    /// Isometry type and eigenvalue angles of a U(2,1) matrix.
    Classify { input: Option<PathBuf> },
    /// Chern–Simons variation along a normal-form path.
    Variation { input: Option<PathBuf> },
    /// Search for a representation with given conjugacy classes.
    FindReps {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = csinv::repfinder::DEFAULT_BUDGET)]
        budget: usize,
        /// Use the built-in Σ(2,3,11) target for this case.
        #[arg(long)]
        case: Option<usize>,
    },
    /// Product of G elements.
    Mul { input: Option<PathBuf> },
    /// Check membership in U(2,1).
    CheckU21 { input: Option<PathBuf> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CsSeifert { .. } => "cs-seifert",
            Command::VerifyTable { .. } => "verify-table",
            Command::Classify { .. } => "classify",
            Command::Variation { .. } => "variation",
            Command::FindReps { .. } => "find-reps",
            Command::Mul { .. } => "mul",
            Command::CheckU21 { .. } => "check-u21",
        }
    }
}

/// Reads a file, or stdin when the path is absent or `-`.
fn read_input(path: &Option<PathBuf>) -> Result<String, CommandOutcome> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| CommandOutcome::malformed(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CommandOutcome::malformed(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn with_input(path: &Option<PathBuf>, f: impl FnOnce(&str) -> CommandOutcome) -> CommandOutcome {
    match read_input(path) {
        Ok(text) => f(&text),
        Err(e) => e,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options::with_tolerances(cli.tol_group, cli.tol_angle);
    let outcome = match &cli.command {
        Command::CsSeifert { input } => with_input(input, |t| cmd_cs_seifert(t, &opts)),
        Command::VerifyTable {
            case,
            pipeline_only,
        } => cmd_verify_table(
            &VerifyTableOptions {
                case: *case,
                pipeline_only: *pipeline_only,
            },
            &opts,
        ),
        Command::Classify { input } => with_input(input, |t| cmd_classify(t, &opts)),
        Command::Variation { input } => with_input(input, |t| cmd_variation(t, &opts)),
        Command::FindReps {
            input,
            seed,
            budget,
            case,
        } => {
            let fr = FindRepsOptions {
                seed: *seed,
                budget: *budget,
                case: *case,
            };
            if case.is_some() {
                cmd_find_reps(None, &fr, &opts)
            } else {
                with_input(input, |t| cmd_find_reps(Some(t), &fr, &opts))
            }
        }
        Command::Mul { input } => with_input(input, |t| cmd_mul(t, &opts)),
        Command::CheckU21 { input } => with_input(input, |t| cmd_check_u21(t, &opts)),
    };
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome).expect("serializable outcome")
        );
    } else {
        print!("{}", render_human(cli.command.name(), &outcome));
    }
    ExitCode::from(outcome.exit_code as u8)
}
