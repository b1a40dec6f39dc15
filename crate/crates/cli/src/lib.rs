//! Command implementations behind the `csinv` binary. Each command takes the
//! raw input text and returns a [`CommandOutcome`]; the binary only handles
//! argument parsing, I/O and exit codes.

mod commands;
mod render;

use serde::Serialize;
use serde_json::Value;

use csinv::{Error, Tolerances};

pub use commands::{
    cmd_check_u21, cmd_classify, cmd_cs_seifert, cmd_find_reps, cmd_mul, cmd_variation,
    cmd_verify_table, FindRepsOptions, VerifyTableOptions,
};
pub use render::render_human;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const MALFORMED: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const NO_CONVERGENCE: i32 = 3;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandOutcome {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CommandOutcome {
    pub fn ok(payload: Value) -> Self {
        CommandOutcome {
            status: Status::Ok,
            payload,
            diagnostics: Vec::new(),
            exit_code: exit::OK,
        }
    }

    /// A completed run whose result fails its check.
    pub fn fail(payload: Value, exit_code: i32, diagnostics: Vec<String>) -> Self {
        CommandOutcome {
            status: Status::Fail,
            payload,
            diagnostics,
            exit_code,
        }
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        CommandOutcome {
            status: Status::Error,
            payload: Value::Null,
            diagnostics: vec![message.into()],
            exit_code: exit::MALFORMED,
        }
    }

    /// Maps a library error to the exit-code contract.
    pub fn from_error(err: &Error) -> Self {
        let code = error_exit_code(err);
        CommandOutcome {
            status: if code == exit::MALFORMED {
                Status::Error
            } else {
                Status::Fail
            },
            payload: Value::Null,
            diagnostics: vec![err.to_string()],
            exit_code: code,
        }
    }
}

pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::NonFinite
        | Error::ParseRational(_)
        | Error::InvalidArgument(_)
        | Error::InvalidPath(_)
        | Error::FamilyMismatch { .. }
        | Error::LengthMismatch { .. } => exit::MALFORMED,
        Error::NoConvergence(_) => exit::NO_CONVERGENCE,
        _ => exit::VALIDATION,
    }
}

/// Flags shared by every subcommand.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub tol: Tolerances,
}

impl Options {
    pub fn with_tolerances(tol_group: Option<f64>, tol_angle: Option<f64>) -> Self {
        let mut tol = Tolerances::default();
        if let Some(g) = tol_group {
            tol.group = g;
        }
        if let Some(a) = tol_angle {
            tol.angle = a;
        }
        Options { tol }
    }
}
