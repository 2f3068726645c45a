//! Point-cloud approximations of the Julia set, rasterization and box
//! counting.

mod boxcount;
mod cloud;
mod raster;

pub use boxcount::{box_count_dimension, default_eps_range, DimensionFit};
pub use cloud::{approximate_julia, repelling_fixed_point, CloudMethod, JuliaParams, PointCloud};
pub use raster::{rasterize, Image, Viewport};
