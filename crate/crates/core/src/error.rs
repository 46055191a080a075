use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (relative asymmetry {residual:e})")]
    NonHermitianInput { residual: f64 },

    #[error("eigenvalue {value:e} is below the support tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{n} modes requested; supported range is 1..={max}")]
    TooManyModes { n: usize, max: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("regions overlap")]
    OverlappingRegions,

    #[error("middle algebra is not contained in both outer algebras (residual {residual:e})")]
    NotNested { residual: f64 },

    #[error("triple does not satisfy the commuting square condition (max residual {residual:e})")]
    TripleNotCommutingSquare { residual: f64 },

    #[error("no product state extension: both marginals are noneven (odd parts {odd_left:e}, {odd_right:e})")]
    BothMarginalsNoneven { odd_left: f64, odd_right: f64 },

    #[error("not a density: {0}")]
    InvalidDensity(String),

    #[error("regularization parameter {0} outside (0, 1]")]
    InvalidEpsilon(f64),

    #[error("operator is not odd (even part {residual:e})")]
    NotOdd { residual: f64 },

    #[error("operator norm {norm} exceeds 1")]
    NormTooLarge { norm: f64 },

    #[error("operator is not in the expected subalgebra (residual {residual:e})")]
    NotInSubalgebra { residual: f64 },

    #[error("singular density breaks the Petz identity (residual {residual:e})")]
    SingularDensity { residual: f64 },

    #[error("lambda {0} outside (0, 1]")]
    LambdaOutOfRange(f64),

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("bad bipartite split {left}x{right} for dimension {dim}")]
    BadSplit {
        left: usize,
        right: usize,
        dim: usize,
    },

    #[error("decomposition does not reconstruct the state (residual {residual:e})")]
    ReconstructionFailed { residual: f64 },

    #[error("component {index} is not a product state for the pair (residual {residual:e})")]
    ComponentNotProduct { index: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
