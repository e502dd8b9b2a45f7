//! Crate-wide error type.

use thiserror::Error;

/// What went wrong while reading an alist file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlistErrorKind {
    /// Header line is not two positive integers.
    Header,
    /// Degree lists are missing entries or disagree with the declared maxima.
    Degrees,
    /// Column adjacency lists disagree with row adjacency lists.
    Adjacency,
    /// A node index is outside `1..=n` / `1..=m`.
    Range,
    /// A check row has no incident edges.
    ZeroRow,
    /// A variable column has no incident edges.
    ZeroColumn,
    /// The file ended before all sections were read.
    Truncated,
}

impl std::fmt::Display for AlistErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AlistErrorKind::Header => "malformed header",
            AlistErrorKind::Degrees => "inconsistent degree list",
            AlistErrorKind::Adjacency => "adjacency lists disagree",
            AlistErrorKind::Range => "index out of range",
            AlistErrorKind::ZeroRow => "zero row",
            AlistErrorKind::ZeroColumn => "zero column",
            AlistErrorKind::Truncated => "unexpected end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("alist line {line}: {kind}: {msg}")]
    AlistParse {
        line: usize,
        kind: AlistErrorKind,
        msg: String,
    },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid BCH parameters: {0}")]
    BchParams(String),

    #[error("weight/layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("checkpoint version mismatch: found {found}, expected {expected}")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("code hash mismatch: checkpoint was trained on a different parity-check matrix")]
    CodeHashMismatch,

    #[error("unexpected end of checkpoint data")]
    CheckpointTruncated,

    #[error("corrupt checkpoint: {0}")]
    CheckpointCorrupt(String),

    #[error("maximum-likelihood decoding needs k <= {max}, code has k = {k}")]
    MlTooLarge { k: usize, max: usize },

    #[error("generator matrix required but not derived")]
    GeneratorMissing,

    #[error("training diverged at step {step}: loss = {loss}")]
    Divergence { step: usize, loss: f64 },

    #[error("report line {line}: {msg}")]
    ReportParse { line: usize, msg: String },

    #[error("reports do not share an SNR grid: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
