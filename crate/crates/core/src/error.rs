use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate cap domain: theta0 = {0} must lie strictly inside (0, pi)")]
    InvalidDomain(f64),

    #[error("insufficient resolution: need nr >= 4 and an even ntheta >= 8, got nr = {nr}, ntheta = {ntheta}")]
    Resolution { nr: usize, ntheta: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("clamped solve failed for angular mode {mode}: condition estimate {condition:.3e}")]
    SolverFailure { mode: usize, condition: f64 },

    #[error("eigensolver did not converge for mode {mode} after {iterations} iterations")]
    EigenNoConvergence { mode: usize, iterations: usize },

    #[error("bisection bracket failure: {0}")]
    Bracket(String),

    #[error("not an Euler-Lagrange solution: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotElSolution { residual: f64, tolerance: f64 },

    #[error("fields are not clamped: value gap {value_gap:.3e}, normal-derivative gap {normal_gap:.3e} (tolerance {tolerance:.3e})")]
    NotClamped {
        value_gap: f64,
        normal_gap: f64,
        tolerance: f64,
    },

    #[error("degenerate generator: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
