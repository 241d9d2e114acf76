//! Distributions of polynomials in log-concave random vectors.
//!
//! The crate builds up in four layers:
//!
//! - [`poly`]: sparse multivariate polynomials, a text-expression parser,
//!   calculus, and random ensembles.
//! - [`measure`]: log-concave measure families with densities, exact and
//!   hit-and-run samplers, whitening to isotropic position, and the
//!   Skorohod-derivative total variation norm.
//! - [`pushforward`]: one-dimensional distributions of a polynomial of a
//!   random vector, their moment norms, and total variation distance
//!   estimation (histogram estimator plus semi-analytic quadrature oracle).
//! - [`check`]: inequality checkers that reduce each quantitative bound to a
//!   (lhs, rhs_core, ratio) record over seeded ensembles, and empirical
//!   constant calibration.
//!
//! Everything stochastic is driven by splittable counter-based seeds
//! ([`rng`]), so any run is bit-reproducible regardless of thread count.

#![forbid(unsafe_code)]

pub mod check;
pub mod error;
pub mod measure;
pub mod numeric;
pub mod poly;
pub mod pushforward;
pub mod rng;

pub use error::{Error, Result};
pub use measure::{AffineMap, LogConcaveMeasure, SampleMethod, SampleSet};
pub use poly::{parse, random_polynomial, Direction, Polynomial};
pub use pushforward::{Pushforward1D, TvEstimate};
pub use check::{CheckConfig, CheckReport, ConstantEstimate, EnsembleSpec};
