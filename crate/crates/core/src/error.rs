use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular medium: {0}")]
    SingularMedium(String),

    #[error("square-root branch violation: {0}")]
    BranchViolation(String),

    #[error("tridiagonal breakdown at row {row} (pivot {pivot:.3e})")]
    TridiagonalBreakdown { row: usize, pivot: f64 },

    #[error("terrain file {path}: line {line}: {message}")]
    TerrainFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("terrain slope {slope:.3} at x = {x:.1} m exceeds the hard limit {limit:.3}")]
    SlopeCap { x: f64, slope: f64, limit: f64 },

    #[error("x = {x} m lies outside the terrain domain [{min}, {max}]")]
    OutOfDomain { x: f64, min: f64, max: f64 },

    #[error("solver at k = {k:.6} 1/m: {source}")]
    AtWavenumber {
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("analytic signal cannot be evaluated at s = {re} {im:+}i m: {reason}")]
    DivergentEvaluation { re: f64, im: f64, reason: String },

    #[error("ray equation did not converge at x = {x} m, z = {z} m")]
    NewtonNonConvergence { x: f64, z: f64 },

    #[error("ray Jacobian 1 + γ'x vanishes at x = {x} m, z = {z} m")]
    Caustic { x: f64, z: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("config parse error in {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_k(self, k: f64) -> Self {
        Error::AtWavenumber {
            k,
            source: Box::new(self),
        }
    }
}
