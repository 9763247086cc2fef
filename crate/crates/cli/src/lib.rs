//! File formats, sweeps and the command-line front end for `ngcost-core`.

pub mod commands;
pub mod formats;
pub mod sweep;

use thiserror::Error;

/// Exit status for usage and validation failures.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when a solver proves the problem infeasible.
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => EXIT_USAGE,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
        }
    }
}

impl From<ngcost_core::Error> for CliError {
    fn from(e: ngcost_core::Error) -> Self {
        match e {
            ngcost_core::Error::Infeasible => {
                CliError::Infeasible("infeasible: no non-signalling behavior avoids every infinite-cost event".into())
            }
            ngcost_core::Error::InfiniteCost => {
                CliError::Usage("infinite costs require --cap".into())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Shortest round-trip decimal, with `inf` for positive infinity.
pub fn fmt_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x}")
    }
}
