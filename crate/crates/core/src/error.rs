use std::path::PathBuf;

use crate::Vec2;

pub type Result<T> = std::result::Result<T, MpmError>;

#[derive(Debug, thiserror::Error)]
pub enum MpmError {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("particle {} at ({:.6}, {:.6}) is outside the valid grid interior", fmt_particle(.particle), .position.x, .position.y)]
    OutOfDomain {
        particle: Option<usize>,
        position: Vec2,
    },

    #[error("degenerate deformation for particle {}: det(F) = {det:e}", fmt_particle(.particle))]
    DegenerateDeformation { particle: Option<usize>, det: f64 },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("least-squares system has no active nodes")]
    EmptySystem,

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("substep {substep_dt:e} s exceeds the stable step {stable_dt:e} s")]
    CflViolation { substep_dt: f64, stable_dt: f64 },

    #[error("invalid scene: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_particle(p: &Option<usize>) -> String {
    match p {
        Some(i) => i.to_string(),
        None => "?".to_string(),
    }
}

impl MpmError {
    /// Attaches a particle index to errors raised by per-particle helpers.
    pub(crate) fn for_particle(self, index: usize) -> Self {
        match self {
            MpmError::OutOfDomain { position, .. } => MpmError::OutOfDomain {
                particle: Some(index),
                position,
            },
            MpmError::DegenerateDeformation { det, .. } => MpmError::DegenerateDeformation {
                particle: Some(index),
                det,
            },
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MpmError::Io {
            path: path.into(),
            source,
        }
    }
}
