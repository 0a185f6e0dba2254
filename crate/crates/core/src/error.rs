use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("participant count {n} outside supported range {min}..={max}")]
    OutOfRange { n: usize, min: usize, max: usize },

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("participant register is not permutation symmetric (deviation {0:e})")]
    NotSymmetric(f64),

    #[error("design incomplete: residual {residual:e} exceeds {tol:e}")]
    IncompleteDesign { residual: f64, tol: f64 },

    #[error("design kind mismatch: {0}")]
    KindMismatch(String),

    #[error("design search failed: best residual {best:e} with a pool of {pool} unitaries")]
    DesignSearch { best: f64, pool: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("gauge condition violated at site {site} (deviation {deviation:e})")]
    Gauge { site: usize, deviation: f64 },

    #[error("bond dimensions inconsistent at site {0}")]
    Bond(usize),

    #[error("ancilla not disentangled (defect {0:e})")]
    AncillaEntangled(f64),

    #[error("branch {outcome} reached fidelity {fidelity} (required {required})")]
    BranchFidelity {
        outcome: usize,
        fidelity: f64,
        required: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("no clear spectral gap below the unit eigenvalue (next eigenvalue {0})")]
    NoSpectralGap(f64),

    #[error("power-law fit needs at least 3 positive points, got {0}")]
    TooFewPoints(usize),

    #[error("channel map is not a valid channel: {0}")]
    InvalidChannel(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
