use thiserror::Error;

/// Errors for model construction and Fisher-information computations.
#[derive(Debug, Error)]
pub enum QfiError {
    #[error("parameter `{name}` is not finite")]
    NonFiniteParam { name: &'static str },

    #[error("nonzero interaction needs at least one atom (u = {u}, n_atoms = 0)")]
    InteractionWithoutAtoms { u: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |A[i][j] - conj(A[j][i])| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver residual {residual:.3e} exceeds bound {bound:.3e}")]
    EigenResidual { residual: f64, bound: f64 },

    #[error("eigenvector columns lost orthonormality: max |V^H V - I| = {deviation:.3e}")]
    NotOrthonormal { deviation: f64 },

    #[error("degeneracy tolerance must be positive (got {tol})")]
    NonPositiveTolerance { tol: f64 },

    #[error("state vector norm {norm} is not 1 within 1e-12")]
    NotNormalized { norm: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroNorm,

    #[error("operation needs at least one atom")]
    AtomsRequired,

    #[error("Fisher information {value:.3e} is negative beyond roundoff")]
    NegativeFisher { value: f64 },

    #[error("scaled Fisher information {value} exceeds the generator-range bound 1 + 1e-8")]
    BoundExceeded { value: f64 },

    #[error("tilted frame undefined: tau and eps are both zero")]
    UndefinedFrame,

    #[error("ground-state overlap needs eps = 0 and u < 0 (got eps = {eps}, u = {u})")]
    AttractiveRegimeRequired { eps: f64, u: f64 },

    #[error("noninteracting limit needs u = 0 (got u = {u})")]
    NoninteractingRequired { u: f64 },

    #[error("Simpson quadrature needs an odd node count >= 3 (got {nodes})")]
    BadNodeCount { nodes: usize },

    #[error("axis `{name}` must be nonempty, finite, and strictly increasing")]
    InvalidAxis { name: &'static str },

    #[error("grids are not comparable: {reason}")]
    GridMismatch { reason: String },

    #[error("extrapolation needs at least 3 points (got {got})")]
    TooFewPoints { got: usize },

    #[error("atom numbers must be strictly increasing (offender: N = {n})")]
    NonIncreasingAtomNumbers { n: usize },

    #[error(
        "{} of {total} sweep points failed; first at (tau = {}, u = {}): {}",
        failures.len(),
        failures[0].tau,
        failures[0].u,
        failures[0].message
    )]
    SweepFailed {
        total: usize,
        failures: Vec<SweepPointFailure>,
    },
}

/// One failed grid point, with the coordinates that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPointFailure {
    pub tau: f64,
    pub u: f64,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, QfiError>;
