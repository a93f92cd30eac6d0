use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapdsl::ParseError;
use crate::selector::SignPattern;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("compact set must contain at least one box")]
    EmptySet,

    #[error("vertex enumeration refused for dimension {0} (limit 16)")]
    VertexGuard(usize),

    #[error("unknown builtin map `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid parameters for builtin `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },

    #[error("map has empty image at x = {0:?}")]
    EmptyImage(Vec<f64>),

    #[error("map produced box with lo > hi (or non-finite bound) at x = {x:?}, coordinate {coordinate}")]
    InvertedBox { x: Vec<f64>, coordinate: usize },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("map file: {0}")]
    MapFile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("initial velocity {v0:?} is not in F(x0) (distance {distance})")]
    VelocityNotInImage { v0: Vec<f64>, distance: f64 },

    #[error("mesh too coarse: N = {steps} but hM < 1 needs N >= {required}")]
    MeshTooCoarse { steps: usize, required: usize },

    #[error("{0}")]
    WcmInfeasible(Box<InfeasibleCertificate>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// State at which no velocity in the image satisfies the componentwise
/// sign constraints relative to the previous velocity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfeasibleCertificate {
    /// Mesh node index `i` at which selection of `v^i` failed.
    pub step: Option<usize>,
    /// Refinement level (only set by convergence studies).
    pub level: Option<usize>,
    pub state: Vec<f64>,
    pub prev_velocity: Vec<f64>,
    pub signs: SignPattern,
    pub slack: f64,
}

impl std::fmt::Display for InfeasibleCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WCM selection infeasible")?;
        if let Some(level) = self.level {
            write!(f, " at level {level}")?;
        }
        if let Some(step) = self.step {
            write!(f, " at step {step}")?;
        }
        f.write_str(":")?;
        if !self.state.is_empty() {
            write!(f, " x = {:?},", self.state)?;
        }
        write!(
            f,
            " previous velocity = {:?}, signs = {:?}",
            self.prev_velocity,
            self.signs.as_slice()
        )
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
