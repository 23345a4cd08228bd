use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix {index} is not hermitian (max entry deviation {deviation:.3e})")]
    NonHermitian { index: usize, deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dilation factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("convex body is empty")]
    EmptyBody,

    #[error("convex body has empty interior (affine dimension {affine_dim} < {dim})")]
    DegenerateBody { affine_dim: usize, dim: usize },

    #[error("unsupported dimension {0} (at most 3 supported)")]
    UnsupportedDimension(usize),

    #[error("operation not supported for this body: {0}")]
    UnsupportedBody(&'static str),

    #[error("the origin is not contained in the body")]
    OriginNotContained,

    #[error("node {index} lies outside the closed positivity cone")]
    NodeOutsideCone { index: usize },

    #[error("no complex tangential directions (n = 0)")]
    NoComplexDirections,

    #[error("spectral norm formula needs a prefactor-free function")]
    PrefactorPresent,

    #[error("grid has {nodes} nodes, budget is {cap}")]
    BudgetExceeded { nodes: u128, cap: u128 },

    #[error("body is not centrally symmetric about the origin")]
    NonSymmetricBody,

    #[error("empty input")]
    EmptyInput,

    #[error("points {0} and {1} are closer than 2 delta (distance {2:.6e})")]
    NotSeparated(usize, usize, f64),

    #[error("probe {witness:?} is at distance {distance:.6e} from the lattice, beyond R delta")]
    NotCovering { witness: Vec<f64>, distance: f64 },

    #[error("densities do not share a quadrature")]
    QuadratureMismatch,

    #[error("multiplier requires a polytope")]
    NonPolytope,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed grid file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
