//! Complex polynomials and rational maps of the Riemann sphere.

mod map;
mod point;
mod polynomial;
mod roots;

pub use map::{Derivative, RationalMap};
pub use point::{chordal_distance, Point};
pub use polynomial::Polynomial;
pub use roots::{poly_roots, poly_roots_with, Root, RootOptions, RootSet};

/// Metric used for derivative norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Spherical,
}

/// Modulus above which evaluation switches to the chart `w = 1/z`.
pub const CHART_SWITCH: f64 = 1e6;

/// Default absolute tolerance on polynomial residuals.
pub const DEFAULT_TOL: f64 = 1e-10;
