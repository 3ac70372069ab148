use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("resolution {0} is too small (need at least 3 nodes per axis)")]
    ResolutionTooSmall(usize),
    #[error("degenerate bounds [{lo}, {hi}] on axis {axis}")]
    DegenerateBounds { axis: usize, lo: f64, hi: f64 },
    #[error("expected {expected} axis bounds, got {got}")]
    BoundsArity { expected: usize, got: usize },
    #[error("gradient body must be a box containing the origin")]
    InvalidBody,
    #[error("fields live on different grid domains")]
    DomainMismatch,
    #[error("integrand is not finite at node {0}, which carries mass")]
    InfiniteIntegrand(usize),
    #[error("every node is masked")]
    AllMasked,
    #[error("field is not convex (gap {0:.3e} to its convex envelope)")]
    NotConvex(f64),
    #[error("no admissible minorant exists (obstacle is identically -inf)")]
    NoMinorant,
    #[error("envelope exceeds its obstacle by {0:.3e} at node {1}")]
    EnvelopeAboveObstacle(f64, usize),
    #[error("mixed measure index {j} out of range for dimension {n}")]
    MixedIndex { j: usize, n: usize },
    #[error("perturbation parameter must be non-negative, got {0}")]
    NegativeParameter(f64),
    #[error("power weight needs p > 0, got {0}")]
    InvalidPower(f64),
    #[error("weight table must start at (0, 0) and be strictly increasing")]
    InvalidWeightTable,
    #[error("parameter a must lie in (0, 1), got {0}")]
    ParameterOutOfRange(f64),
    #[error("beta must exceed 1, got {0}")]
    BetaTooSmall(f64),
    #[error("potential is not in the relative full-mass class: {0}")]
    NotInClass(String),
    #[error("potential has zero Monge-Ampere mass")]
    ZeroMass,
    #[error("measure is not a probability measure (total {0})")]
    NotProbability(f64),
    #[error(
        "density ratio is unbounded: reference vanishes at node {0} where the measure does not"
    )]
    UnboundedRatio(usize),
    #[error("normalization violated: sup(u - phi) = {0}, expected -1")]
    Normalization(f64),
    #[error("model envelope did not stabilize after {0} doublings")]
    NonStabilization(usize),
    #[error("entropy is infinite for this input")]
    InfiniteEntropy,
    #[error("negative argument {0}")]
    NegativeArgument(f64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
