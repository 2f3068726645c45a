//! Transfer-operator sums `Λ_t^n 1(z)`, finite-n pressure estimates, the
//! Bowen root and Poincaré-series critical exponents.

mod base_point;
mod bowen;
mod poincare;
mod transfer;

pub use base_point::{base_point_select, default_candidates, postcritical_sample, BasePoint};
pub use bowen::{bowen_root, bowen_root_from, BowenRootResult};
pub use poincare::{
    critical_exponent_estimate, poincare_partial_sums, CriticalExponent, PoincareSeries,
    DECAY_MARGIN,
};
pub use transfer::{
    pressure_estimate, transfer_sum, PressureEstimate, PressureProfile, TransferSum,
};
