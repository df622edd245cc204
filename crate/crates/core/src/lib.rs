//! Poisson-kernel interpolation of band-limited functions in the plane.
//!
//! Samples of a Paley–Wiener function taken on a complete interpolating
//! sequence for the square `[-δ, δ]²` are interpolated by scattered
//! translates of the Poisson kernel
//! `g_α(x) = (2π)⁻¹ α (α² + |x|²)^{-3/2}`. The crate generates node sets,
//! assembles and solves the Gram system, evaluates the interpolant in space
//! and on the Fourier side, and measures reconstruction errors by
//! deterministic spectral quadrature.
//!
//! Fourier convention: `F[f](ξ) = (2π)⁻¹ ∫ f(x) e^{-i⟨ξ,x⟩} dx`, which is
//! unitary on `L²(R²)`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod error;
pub mod experiment;
pub mod interp;
pub mod kernels;
pub mod linalg;
pub mod nodes;
pub mod quadrature;
pub mod spaces;
pub mod spectral;

pub use error::{Error, Result};
pub use interp::{GramSystem, Interpolant, SolveMethod, SolveReport};
pub use kernels::{GeneralizedKernel, Kernel, PoissonKernel};
pub use nodes::{BandSquare, NodeKind, NodeSet, RieszEstimate};
pub use spaces::{BandRegion, BandlimitedFunction, Profile};
