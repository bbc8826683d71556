use std::path::PathBuf;

use thiserror::Error;

use crate::game::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resource index {index} out of range (game has {count} resources)")]
    ResourceOutOfRange { index: usize, count: usize },

    #[error("player index {index} out of range (game has {count} players)")]
    PlayerOutOfRange { index: usize, count: usize },

    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),

    #[error("cost table has {len} entries, load {load} is undefined")]
    CostUndefined { load: usize, len: usize },

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid game: {}", format_violations(.0))]
    InvalidGame(Vec<Violation>),

    #[error("{profiles} strategy profiles exceed the exhaustive-scan limit of {limit}")]
    TooLarge { profiles: u128, limit: u64 },

    #[error("best-response dynamics did not converge within {rounds} rounds")]
    NoConvergence { rounds: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}: JSON error at line {line}, column {column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
