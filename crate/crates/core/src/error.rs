use std::fmt;

use thiserror::Error;

/// Closure rule of a V-system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// `A ∈ V_lk, B ∈ V_kj ⇒ AB ∈ V_lj`
    V1,
    /// `A ∈ V_lj, B ∈ V_kj ⇒ ABᵀ ∈ V_lk`
    V2,
    /// `A ∈ V_lk ⇒ AAᵀ ∈ ℝ·I`
    V3,
    /// Basis orthonormality under `(A|B) = tr(ABᵀ)/n_l`.
    Orthonormal,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::V1 => "V1",
            Axiom::V2 => "V2",
            Axiom::V3 => "V3",
            Axiom::Orthonormal => "orthonormality",
        };
        f.write_str(s)
    }
}

/// Errors raised by cone, map and law operations.
///
/// Block and coordinate indices carried by variants are 0-based.
#[derive(Debug, Error)]
pub enum Error {
    #[error("axiom {rule} violated at blocks {indices:?}: residual {residual:.3e}")]
    AxiomViolation {
        rule: Axiom,
        indices: (usize, usize, usize),
        residual: f64,
    },
    #[error("invalid V-system: {0}")]
    InvalidVSystem(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("operands belong to different cone realizations")]
    RealizationMismatch,
    #[error("point is not in the open cone (eigenvalue ratio {ratio:.3e})")]
    NotInCone { ratio: f64 },
    #[error("point is not in the closed cone (pivot {pivot:.3e} at block {block})")]
    NotInClosedCone { block: usize, pivot: f64 },
    #[error("Cholesky factor leaves the V-system at block ({l}, {k}): residual {residual:.3e}")]
    StructureLeak { l: usize, k: usize, residual: f64 },
    #[error("invalid triangular element: {0}")]
    InvalidTriangular(String),
    #[error("point is not in the open dual cone")]
    NotInDualCone,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("phi slice {index} is not symmetric (asymmetry {asymmetry:.3e})")]
    AsymmetricSlice { index: usize, asymmetry: f64 },
    #[error("phi(eta) is not positive definite at probe {probe}")]
    PositivityFailure { probe: usize },
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("epsilon must have at least one nonzero entry")]
    ZeroEpsilon,
    #[error("index set must be nonempty")]
    EmptyIndexSet,
    #[error("quadratic maps have different codomains")]
    CodomainMismatch,
    #[error("linear transform is singular")]
    SingularTransform,
    #[error("sigma {sigma:?} is not in the Gindikin set (first violation at index {index})")]
    NotInXi { index: usize, sigma: Vec<f64> },
    #[error("weight {index} is not a finite real number")]
    InvalidWeight { index: usize },
    #[error("u is not in R_+(epsilon) at index {index}")]
    InvalidU { index: usize },
    #[error("sigma is outside the non-singular range at index {index}")]
    OutOfNonSingularRange { index: usize },
    #[error("eta is outside the domain of the Laplace transform")]
    OutOfLaplaceDomain,
    #[error("moment order {order} exceeds the maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("law is singular; no Lebesgue density exists")]
    SingularLaw,
    #[error("virtual map is not a weighted sum of the cone's basic maps")]
    NotBasicSum,
    #[error("law has no triangular (Bartlett) parametrization")]
    MissingTriangularForm,
    #[error("direct sampling needs a true quadratic map")]
    VirtualMapUnsupported,
    #[error("matrix is not positive definite")]
    NotPD,
    #[error("exponent m_{index} = {value} is not an integer")]
    NonIntegralExponent { index: usize, value: f64 },
    #[error("relative invariance check failed at probe {probe}: ratio {ratio}")]
    RelativeInvarianceFailure { probe: usize, ratio: f64 },
    #[error("cannot parse spec: {0}")]
    SpecParse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
