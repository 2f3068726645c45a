//! Numerical toolkit for finitely generated rational semigroups.
//!
//! The crate covers the whole pipeline from polynomial arithmetic to
//! fractal-dimension estimates:
//!
//! * [`rational`]: polynomials, rational maps, Aberth root finding,
//!   derivatives in the Euclidean and spherical metrics, critical points and
//!   preimages.
//! * [`words`]: words over the generator alphabet, skew-product steps,
//!   chain-rule derivatives and levelwise preimage trees.
//! * [`julia`]: point clouds approximating the Julia set, rasterization and
//!   box counting.
//! * [`pressure`]: transfer-operator sums, pressure estimates, the Bowen
//!   root and Poincaré-series critical exponents.
//! * [`measure`]: atomic approximations of conformal measures and the
//!   geometric-measure ratio test.
//! * [`conditions`]: open set condition and semi-hyperbolicity checks,
//!   Koebe quarter sanity check and the built-in example catalog.
//!
//! Data-parallel loops run on rayon when the `parallel` feature (on by
//! default) is enabled and fall back to plain iterators otherwise. Results
//! are identical either way.

pub mod conditions;
pub mod error;
pub mod julia;
pub mod measure;
mod par;
pub mod pressure;
pub mod rational;
pub mod words;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rational::{Metric, Point, Polynomial, RationalMap, RootSet};
pub use words::{MultiMap, Word};
