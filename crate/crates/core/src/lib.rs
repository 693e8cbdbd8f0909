//! Subelliptic estimates for systems of complex quadratic forms.
//!
//! The crate works on phase space `R^{2n}` with coordinates `(x, ξ)` and
//! provides:
//!
//! * [`symplectic`]: quadratic forms, Hamilton maps, Poisson brackets and the
//!   `r_k` tower of real quadratic forms attached to a system.
//! * [`singular`]: singular spaces, the iterated kernel tower of a system and
//!   the certified loss exponent `k0`.
//! * [`weight`]: smooth cutoffs and the bounded weight functions whose
//!   Hamilton derivatives produce the subelliptic gain, with a sampler for
//!   the pointwise estimates they satisfy.
//! * [`quantization`]: Weyl and Wick quantization in a truncated Hermite
//!   basis, together with the wave-packet (coherent state) calculus.
//! * [`verifier`]: a generalized Rayleigh-quotient probe of the estimate
//!   `‖u‖_{s} ≲ Σ‖q_j^w u‖ + ‖u‖` on finite Hermite levels.
//! * [`io`]: the JSON description of a system and built-in example systems.
//!
//! Numerical routines are generic over the [`Real`] scalar; `f64` aliases are
//! exported at the crate root.

pub mod io;
pub mod linalg;
pub mod quantization;
pub mod singular;
pub mod symplectic;
pub mod verifier;
pub mod weight;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub use nalgebra::Complex;

/// Real scalar used throughout the crate (implemented for `f32` and `f64`).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + serde::Serialize + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts `T` into `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub type QuadraticForm64 = symplectic::QuadraticForm<f64>;
pub type HamiltonMap64 = symplectic::HamiltonMap<f64>;
pub type System64 = symplectic::SystemOfForms<f64>;
pub type Subspace64 = linalg::Subspace<f64>;
pub type Tower64 = singular::Tower<f64>;
pub type PolySymbol64 = quantization::PolySymbol<f64>;
pub type HermiteBasis64 = quantization::HermiteBasis;

pub type QuadraticForm32 = symplectic::QuadraticForm<f32>;
pub type System32 = symplectic::SystemOfForms<f32>;
