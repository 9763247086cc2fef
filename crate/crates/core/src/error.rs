use alloc::string::String;
use alloc::vec::Vec;

use crate::game::GameIssue;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid cost value {0}: costs must be finite or +inf")]
    InvalidCost(f64),
    #[error("invalid game: {}", join_issues(.0))]
    InvalidGame(Vec<GameIssue>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("invalid quantum strategy: {0}")]
    InvalidStrategy(String),
    #[error("infinite costs present; cap them before running this solver")]
    InfiniteCost,
    #[error("only binary-outcome games are supported here (got {n_a}x{n_b} outcomes)")]
    NonBinaryOutcomes { n_a: usize, n_b: usize },
    #[error("{count} deterministic strategies exceed the enumeration limit of {limit}")]
    TooManyStrategies { count: u128, limit: u128 },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

fn join_issues(issues: &[GameIssue]) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (i, issue) in issues.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        let _ = write!(out, "{issue}");
    }
    out
}
