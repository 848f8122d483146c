//! Numerical toolkit for the complex hyperbolic space in its two standard
//! models: the unit ball `𝔹ⁿ` and the Siegel domain
//! `ℍⁿ = { Re wₙ > |w₁|² + ⋯ + |w_{n-1}|² }`.
//!
//! The crate provides
//!
//! * points, defining functions and the Cayley transform ([`domain`]),
//! * the Kähler–Einstein (Bergman) metrics and finite-difference curvature
//!   checks ([`metric`]),
//! * canonical potentials, differential norms and the `W` field
//!   ([`potential`]),
//! * the polynomial vector fields spanning `aut(ℍⁿ)`, their brackets,
//!   grading and pushforwards ([`vectorfield`]),
//! * exact automorphisms of `ℍⁿ` and Möbius maps of `ℂℙⁿ`
//!   ([`automorphism`]),
//! * closed-form pushforward tables with an oracle check ([`tables`]),
//! * the normalization pipeline that classifies constant-norm potentials
//!   ([`normalize`]).
//!
//! Indices are zero-based throughout: the distinguished last coordinate `wₙ`
//! is `w[n - 1]`.

pub mod automorphism;
pub mod diff;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod normalize;
pub mod potential;
pub mod sampling;
pub mod tables;
pub mod vectorfield;

pub use num_complex::Complex64;

pub use automorphism::{Automorphism, Generator, MobiusMap};
pub use domain::{CPoint, Model};
pub use error::{GeomError, Result};
pub use metric::{FormKind, HermitianForm};
pub use potential::{BasePotential, HoloPoly, LogPotential, Potential};
pub use vectorfield::{BasisTag, PolyVF};

/// The imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
