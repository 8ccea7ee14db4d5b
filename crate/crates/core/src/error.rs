use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    #[error(
        "trigonometric phase constraint violated: per-element phase {phase} >= pi \
         (alpha = {alpha}, n = {n}; nested refinement needs n >= floor(alpha/pi) + 1 = {min_n})"
    )]
    PhaseConstraint {
        alpha: f64,
        n: usize,
        phase: f64,
        min_n: usize,
    },

    #[error("invalid section space: {0}")]
    InvalidSpace(String),

    #[error("evaluation point {0} lies outside [0, 1]")]
    OutOfDomain(f64),

    #[error("derivative order {0} not supported (max 2)")]
    DerivativeOrder(usize),

    #[error("ratio bounds: every sampled point was skipped")]
    NoRatioSamples,

    #[error(
        "quadrature did not converge for {matrix}[{row}, {col}]: refinement disagreement {diff:e}"
    )]
    QuadratureNotConverged {
        matrix: &'static str,
        row: usize,
        col: usize,
        diff: f64,
    },

    #[error("reaction coefficient gamma must be >= 0, got {0}")]
    NegativeGamma(f64),

    #[error(
        "aspect ratio mismatch: matrices were assembled with nu = {stored}, requested {requested}"
    )]
    NuMismatch { stored: f64, requested: f64 },

    #[error("symbol extraction needs n >= 3p + 1 (p = {p}, n = {n})")]
    SymbolPrecondition { p: usize, n: usize },

    #[error(
        "extracted symbol is not n-stable: coefficient {k} differs by {diff:e} between n and 2n"
    )]
    SymbolUnstable { k: usize, diff: f64 },

    #[error("extracted symbol violates invariant: {0}")]
    SymbolInvariant(String),

    #[error("matrix is not symmetric: asymmetry {asym:e} exceeds {tol:e}")]
    NotSymmetric { asym: f64, tol: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("QR iteration did not converge for matrix of size {0}")]
    NoConvergence(usize),

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("length mismatch: {left} eigenvalues vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
