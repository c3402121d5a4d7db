//! Averaged Goldbach representation counts in arithmetic progressions and the
//! explicit formulas that tie them to zeros of Dirichlet L-functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`numtheory`] – factorisation, multiplicative functions, the von Mangoldt sieve.
//! * [`characters`] – the Dirichlet character group mod `q`, exact root-of-unity values.
//! * [`goldbach`] – exact `G(n;q,a,b)`, `S(x;q,a,b)` and friends via FFT convolution.
//! * [`lfunc`] – Hurwitz zeta, `L(s,χ)`, completed L-functions, certified zero sets.
//! * [`singular`] – the twin prime constant, `J(n)`, singular series.
//! * [`explicit`] – zero-sum right-hand sides, Landau–Gonek sums, residues.
//! * [`circle`] – exponential sums on exact DFT grids and the circle-method integrals.
//! * [`analysis`] – residual grids, exponent fits, zero-sum diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::suspicious_arithmetic_impl)]

pub mod analysis;
pub mod characters;
pub mod circle;
mod error;
pub mod explicit;
pub mod fft;
pub mod goldbach;
pub mod lfunc;
pub mod numtheory;
pub mod singular;
pub mod special;
pub mod sum;

pub use error::{Error, Result};

pub use analysis::{BStarParams, FitResult};
pub use characters::{CharacterGroup, DirichletCharacter, RootOfUnity};
pub use explicit::ExplicitReport;
pub use goldbach::ClassConvolution;
pub use lfunc::{ZeroEntry, ZeroSet, ZeroSource};
pub use numtheory::{Factorization, SieveTable};
pub use singular::SingularConstants;

pub use num_complex::Complex64;
