use thiserror::Error;

/// Errors raised by graphcalc operations.
///
/// Variants fall into two families: input/validation problems (bad files,
/// unknown vertices, violated preconditions) and numerical failures
/// (indefinite systems, divergent integrals, non-convergence). See
/// [`Error::is_numerical`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("self-loop on vertex {0:?}")]
    SelfLoop(String),

    #[error("duplicate edge {0:?} -- {1:?}")]
    DuplicateEdge(String, String),

    #[error("edge endpoint {0:?} is not a declared vertex")]
    DanglingEndpoint(String),

    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),

    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),

    #[error("vertices {0:?} and {1:?} are not adjacent")]
    NotAdjacent(String, String),

    #[error("vertex {0:?} is outside the function's domain")]
    OutOfDomain(String),

    #[error("window interior is empty")]
    EmptyInterior,

    #[error("window interior does not induce a connected subgraph")]
    DisconnectedInterior,

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("{0:?} and {1:?} lie in different components")]
    Unreachable(String, String),

    #[error("{what} has size {size}, exceeding the exhaustive bound {bound}")]
    SizeBound {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("vertex sets overlap at {0:?}")]
    Overlap(String),

    #[error("vector field is not flagged antisymmetric")]
    NotAntisymmetric,

    #[error("function is constant; ratio is undefined")]
    ConstantFunction,

    #[error("function vanishes identically")]
    ZeroFunction,

    #[error("boundary condition violated at {0:?}")]
    BoundaryViolation(String),

    #[error("test function must be positive on the interior and nonnegative on the boundary; fails at {0:?}")]
    NonPositive(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vertex {0:?} is not a strict local minimum")]
    NotStrictMinimum(String),

    #[error("neighbourhood of {vertex:?} has degree {degree}, above the arc-enumeration limit {limit}")]
    DegreeTooLarge {
        vertex: String,
        degree: usize,
        limit: usize,
    },

    #[error("time grid step {0} exceeds 1e-2; differential checks need a finer grid")]
    CoarseGrid(f64),

    #[error("spectrum is not positive (lambda_{index} = {value}); Green function diverges")]
    NonPositiveSpectrum { index: usize, value: f64 },

    #[error("step system is indefinite: 1/h = {inv_h}, mu_1 = {mu1}, max lambda = {max_lambda}")]
    Indefinite {
        inv_h: f64,
        mu1: f64,
        max_lambda: f64,
    },

    #[error("antipodal values on adjacent vertices {0:?} and {1:?}")]
    Antipodal(String, String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("did not converge: {0}")]
    NoConvergence(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveSpectrum { .. }
                | Error::Indefinite { .. }
                | Error::Antipodal(..)
                | Error::NotPositiveDefinite
                | Error::NoConvergence(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::SelfLoop(_) => "self_loop",
            Error::DuplicateEdge(..) => "duplicate_edge",
            Error::DanglingEndpoint(_) => "dangling_endpoint",
            Error::DuplicateVertex(_) => "duplicate_vertex",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::NotAdjacent(..) => "not_adjacent",
            Error::OutOfDomain(_) => "out_of_domain",
            Error::EmptyInterior => "empty_interior",
            Error::DisconnectedInterior => "disconnected_interior",
            Error::DisconnectedGraph => "disconnected_graph",
            Error::Unreachable(..) => "unreachable",
            Error::SizeBound { .. } => "size_bound",
            Error::SizeMismatch(_) => "size_mismatch",
            Error::Overlap(_) => "overlap",
            Error::NotAntisymmetric => "not_antisymmetric",
            Error::ConstantFunction => "constant_function",
            Error::ZeroFunction => "zero_function",
            Error::BoundaryViolation(_) => "boundary_violation",
            Error::NonPositive(_) => "non_positive",
            Error::NonFinite(_) => "non_finite",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotStrictMinimum(_) => "not_strict_minimum",
            Error::DegreeTooLarge { .. } => "degree_too_large",
            Error::CoarseGrid(_) => "coarse_grid",
            Error::NonPositiveSpectrum { .. } => "non_positive_spectrum",
            Error::Indefinite { .. } => "indefinite",
            Error::Antipodal(..) => "antipodal",
            Error::NotPositiveDefinite => "not_positive_definite",
            Error::NoConvergence(_) => "no_convergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
