//! Error type shared by every module of the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
///
/// Each variant corresponds to one documented error family; the CLI maps
/// every family to a distinct exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A vector whose norm is below the zero-norm tolerance was offered as a
    /// direction. Signals a degenerate probe or gradient.
    #[error("zero vector: norm {norm:.3e} is at or below tolerance {tolerance:.1e}")]
    ZeroVector { norm: f64, tolerance: f64 },

    /// Two operands live in different ambient dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An operation received an empty collection (or a zero count) where at
    /// least one element is required.
    #[error("empty input: {0} must be nonempty")]
    EmptyInput(&'static str),

    /// A budget radius must be strictly positive.
    #[error("budget radius must be positive, got {0}")]
    InvalidBudgetRadius(f64),

    /// The requested target lies outside the feasible interval.
    #[error("target {target} lies outside the feasible interval [-{bound}, {bound}]")]
    InfeasibleTarget { target: f64, bound: f64 },

    /// A sampled curve needs at least two points.
    #[error("need at least 2 samples, got {0}")]
    InvalidSampleCount(usize),

    /// The norm of a constraint vector exceeds the budget radius.
    #[error("constraint norm {norm} exceeds budget radius {budget}")]
    InfeasibleBudget { norm: f64, budget: f64 },

    /// A capability constraint has a component outside the capability
    /// subspace beyond tolerance.
    #[error("constraint has residual {residual:.3e} outside the capability subspace")]
    ConstraintNotInSubspace { residual: f64 },

    /// A matrix required to be symmetric positive definite is not.
    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    /// A projected safety direction vanishes, so the effective angle between
    /// safety objectives is undefined.
    #[error("projected safety direction vanishes: residual mass {remaining:.3e}")]
    DegenerateProjection { remaining: f64 },

    /// The prescribed intrinsic overlaps cannot be realized by any unit
    /// safety direction.
    #[error("packing spec infeasible: {0}")]
    SpecInfeasible(String),

    /// Coherence needs at least one declared zero-overlap pair.
    #[error("coherence requires at least one declared zero-overlap pair")]
    EmptyPairSet,

    /// An index into a vector collection is out of range.
    #[error("index {index} out of range for {len} vectors")]
    IndexOutOfRange { index: usize, len: usize },

    /// The Welch bound is only meaningful for more features than dimensions.
    #[error("Welch bound undefined: {n_features} features do not exceed dimension {dim}")]
    NotSuperposed { n_features: usize, dim: usize },

    /// The residual bound requires near-orthogonality (m * mu < 1).
    #[error("near-orthogonality violated: m*mu = {m_mu} >= 1, fall back to Monte Carlo")]
    NearOrthogonalityViolated { m_mu: f64 },

    /// Regime classification needs at least three distinct dimensions.
    #[error("regime fit needs at least 3 distinct increasing dimensions, got {0}")]
    InsufficientSeries(usize),

    /// Oracle grids below the minimum resolution give useless tolerance
    /// bounds.
    #[error("oracle grid resolution {0} is below the minimum of 16")]
    InvalidResolution(usize),
}
