use thiserror::Error;

/// Pipeline errors, tagged by the stage that raised them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial parse error: {0}")]
    Parse(String),
    #[error("defining polynomial must be monic")]
    NotMonic,
    #[error("defining polynomial must have degree at least 2 (got {0})")]
    DegreeTooSmall(usize),
    #[error("defining polynomial is not squarefree (zero discriminant)")]
    NotSquarefree,
    #[error("defining polynomial is reducible over Q")]
    Reducible,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("root isolation failed at {bits} bits: {reason}")]
    RootIsolation { bits: u64, reason: String },
    #[error("insufficient precision at {bits} bits: {reason}")]
    Precision { bits: u64, reason: String },
    #[error(
        "norm consistency failure above p = {p}: valuations account for {found} of {expected} \
         (Z[theta] is probably not the maximal order at p)"
    )]
    NormConsistency { p: u64, found: u64, expected: u64 },
    #[error("relation budget exhausted after {trials} trials with {found}/{target} relations; increase B or a/k")]
    BudgetExhausted { trials: u64, found: usize, target: usize },
    #[error("empty factor base; increase B")]
    EmptyFactorBase,
    #[error("unit rank deficient: found {found} independent unit rows, need {needed}")]
    UnitRankDeficient { found: usize, needed: usize },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short tag naming the pipeline stage (used in CLI diagnostics).
    pub fn stage(&self) -> &'static str {
        match self {
            Error::Parse(_)
            | Error::NotMonic
            | Error::DegreeTooSmall(_)
            | Error::NotSquarefree
            | Error::Reducible => "field",
            Error::Domain(_) => "params",
            Error::RootIsolation { .. } => "embeddings",
            Error::Precision { .. } => "precision",
            Error::NormConsistency { .. } | Error::BudgetExhausted { .. } => "relations",
            Error::EmptyFactorBase => "factorbase",
            Error::UnitRankDeficient { .. } => "regulator",
            Error::Internal(_) => "internal",
            Error::Io(_) | Error::Json(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
