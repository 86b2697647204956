//! Integer powers of the complex Riesz transform on the plane.
//!
//! The crate evaluates `R^k` three independent ways (Fourier multiplier on a
//! periodic grid, principal-value kernel convolution, and closed-form action
//! on Riesz potentials) and assembles numeric lower-bound certificates for
//! its `L^p` norms.

// negated comparisons reject NaN along with out-of-range values; published
// coefficient tables keep their full printed digits
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod certification;
pub mod error;
pub mod fields;
pub mod kernels;
pub mod quadrature;
pub mod special_functions;

pub use certification::{CertificationReport, CertifyOptions};
pub use error::{Error, Result};
pub use fields::{Field, PvOptions, SpectralPlan};
pub use kernels::{GaussProfile, QuarterTurns, TruncationParams, WindingRadial};
pub use num_complex::Complex64;
pub use quadrature::{QuadResult, QuadSpec};
pub use special_functions::GammaQuotientParams;
