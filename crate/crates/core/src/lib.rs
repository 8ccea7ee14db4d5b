//! Galerkin matrices for advection–diffusion–reaction problems discretized with
//! generalized B-splines (polynomial, hyperbolic, trigonometric section spaces),
//! together with the tools to check their spectral behaviour numerically:
//! extreme eigenvalues, conditioning, Toeplitz symbols and eigenvalue
//! distribution in one and two dimensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`gbspline`] builds and evaluates the basis,
//! * [`quadrature`] provides Gauss–Legendre rules,
//! * [`assembly`] produces the normalized 1D matrices and the 2D tensor matrix,
//! * [`toeplitz`] handles Toeplitz algebra and symbol extraction,
//! * [`spectral`] holds the eigen/singular value routines and bound checks,
//! * [`verify`] runs configured sweeps and writes reports.

pub mod assembly;
pub mod error;
pub mod export;
pub mod gbspline;
pub mod par;
pub mod quadrature;
pub mod spectral;
pub mod toeplitz;
pub mod verify;

pub use assembly::{
    assemble_1d, assemble_2d_direct, assemble_2d_tensor, assemble_a_1d, decompose_2d,
    Decomposition2D, Direction, GalerkinSet1D, GalerkinSet2D,
};
pub use error::{Error, Result};
pub use gbspline::{
    build_basis, make_knots, ratio_bounds, GBSplineBasis, KnotVector, Refinement, SectionSpace,
    SpaceKind,
};
pub use toeplitz::{SymbolCoeffs, SymbolKind, TwoLevelSymbol};

/// Dense matrix type used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
