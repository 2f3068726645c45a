//! Atomic approximations of conformal measures built from exponentially
//! discounted pullbacks of a Dirac mass, and the geometric-measure ratio
//! test on their planar projections.

mod atoms;
mod geometric;
mod index;
mod residual;

pub use atoms::{build_conformal_atoms, project_measure, Atom, AtomicMeasure, MeasureParams, PlanarAtom, PlanarMeasure};
pub use geometric::{geometric_ratio_report, GeometricReport, GeometricSample};
pub use index::BallIndex;
pub use residual::{conformality_residual, truncation_tail, ResidualReport};
