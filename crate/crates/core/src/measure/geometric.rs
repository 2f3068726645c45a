use num_complex::Complex64;
use serde::Serialize;

use super::{BallIndex, PlanarMeasure};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricSample {
    pub center: [f64; 2],
    pub r: f64,
    pub mass: f64,
    /// `mass / r^h`; zero for an empty ball.
    pub ratio: f64,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricReport {
    pub samples: Vec<GeometricSample>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio` over nonempty balls.
    pub spread: f64,
    pub h_used: f64,
    pub empty_balls: usize,
}

/// Ratios `μ(B(z, r)) / r^h` for every center and radius.
pub fn geometric_ratio_report(
    m: &PlanarMeasure,
    h: f64,
    centers: &[Complex64],
    radii: &[f64],
) -> Result<GeometricReport> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::InvalidArgument("need at least one center and one radius".into()));
    }
    if let Some(&r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::NonpositiveRadius(r));
    }
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let index = BallIndex::new(
        m.atoms.iter().map(|a| a.point).collect(),
        m.atoms.iter().map(|a| a.mass).collect(),
        (r_min * r_max).sqrt(),
    );
    let pairs: Vec<(Complex64, f64)> = centers.iter().flat_map(|&c| radii.iter().map(move |&r| (c, r))).collect();
    let samples = crate::par::map(&pairs, |&(c, r)| {
        let mass = index.ball_mass(c, r);
        GeometricSample {
            center: [c.re, c.im],
            r,
            mass,
            ratio: if mass > 0.0 { mass / r.powf(h) } else { 0.0 },
            empty: mass <= 0.0,
        }
    });
    let filled = samples.iter().filter(|s| !s.empty);
    let min_ratio = filled.clone().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = filled.map(|s| s.ratio).fold(0.0, f64::max);
    let empty_balls = samples.iter().filter(|s| s.empty).count();
    let spread = if empty_balls == samples.len() { f64::NAN } else { max_ratio / min_ratio };
    Ok(GeometricReport { samples, min_ratio, max_ratio, spread, h_used: h, empty_balls })
}
