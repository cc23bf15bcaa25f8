use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("algebra must have positive dimension")]
    EmptyAlgebra,
    #[error("expected a {expected}x{expected} matrix, found {found} rows")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("inner product is not symmetric (residual {0:.3e})")]
    NotSymmetric(f64),
    #[error("inner product is not positive definite")]
    NotPositiveDefinite,
    #[error("change of basis is singular")]
    SingularChangeOfBasis,
    #[error("{builder}(n) needs n >= {min}, got {got}")]
    InvalidParameter {
        builder: &'static str,
        min: usize,
        got: usize,
    },
    #[error("matrix basis is not closed under the commutator (residual {0:.3e})")]
    NotClosed(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomSpaceError {
    #[error("vector has length {found}, algebra has dimension {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("span is not a subalgebra: bracket leaves it by {residual:.3e}")]
    NotSubalgebra { residual: f64 },
    #[error("subalgebra equals the whole algebra; the complement is empty")]
    SubalgebraIsWhole,
    #[error("complement is not ad(h)-invariant (residual {residual:.3e})")]
    ComplementNotInvariant { residual: f64 },
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("block {block} has dependent vectors")]
    DependentBlock { block: usize },
    #[error("basis index {index} is out of range")]
    IndexOutOfRange { index: usize },
    #[error("block {block} is not orthogonal to the subalgebra (residual {residual:.3e})")]
    BlockNotInComplement { block: usize, residual: f64 },
    #[error("blocks overlap: cross inner products up to {residual:.3e}")]
    OverlappingBlocks { residual: f64 },
    #[error("blocks cover dimension {found} of a complement of dimension {expected}")]
    IncompleteBlocks { expected: usize, found: usize },
    #[error("block {block} is not ad(h)-invariant (residual {residual:.3e})")]
    BlockNotInvariant { block: usize, residual: f64 },
    #[error("Killing form is not a multiple of the inner product on block {block} (residual {residual:.3e})")]
    KillingNotScalar { block: usize, residual: f64 },
    #[error("block index {index} out of range for {count} blocks")]
    BlockIndexOutOfRange { index: usize, count: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("metric scales must be positive, found {0}")]
    NonPositiveScale(f64),
    #[error("{name} must be at least {min}, got {got}")]
    InvalidParameter {
        name: &'static str,
        min: usize,
        got: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry '{0}'")]
    UnknownId(String),
    #[error("parameter {name}={value} outside [{min}, {max}]")]
    ParamOutOfRange {
        name: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error("unknown group family '{0}' (expected su, so or sp)")]
    UnknownFamily(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    HomSpace(#[from] HomSpaceError),
}

#[derive(Debug, Error)]
pub enum SpaceFileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing '{0}' directive")]
    Missing(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("finite-difference step {step:e} underflows at the evaluation point")]
    StepUnderflow { step: f64 },
    #[error("derivative order {0} is not supported (use 1 or 2)")]
    UnsupportedOrder(u32),
    #[error("direction has {found} entries for {expected} blocks")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    HomSpace(#[from] HomSpaceError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("metric is not Einstein (Ricci spread {residual:.3e} > {tolerance:.1e}); rerun with --force")]
    NotEinstein { residual: f64, tolerance: f64 },
    #[error("invalid scan: {0}")]
    InvalidScan(String),
}
