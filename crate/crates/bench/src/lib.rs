//! Benchmark fixtures shared by the criterion targets.

use rieszlab_core::{Complex64, Field};

/// Smooth, rapidly decaying test field with a winding of one.
pub fn gaussian_field(n: usize, side: f64) -> Field {
    Field::from_fn(n, side, |z| z * (-z.norm_sqr()).exp()).expect("valid grid")
}

/// Radial Gaussian on the plane.
pub fn gaussian(z: Complex64) -> Complex64 {
    Complex64::new((-z.norm_sqr()).exp(), 0.0)
}
