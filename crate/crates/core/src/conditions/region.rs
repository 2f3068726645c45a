use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rational::{Point, RationalMap};
use crate::{Error, Result};

/// Iteration cap of the filled-Julia membership test.
pub const ESCAPE_ITERATIONS: usize = 500;

/// Open subsets of the plane used as candidate sets for the open set condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    Disk { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
    Rectangle { min: [f64; 2], max: [f64; 2] },
    /// `int K(outer) \ K(inner)` for polynomials, with filled Julia sets
    /// approximated by bounded orbits.
    HullDifference { outer: RationalMap, inner: RationalMap },
}

/// Radius beyond which every orbit of the polynomial `p` escapes.
pub fn escape_radius(p: &RationalMap) -> f64 {
    let c = p.num().coeffs();
    let d = p.degree();
    let lead = (c[d] / p.den().coeffs()[0]).norm();
    let rest: f64 = c[..d].iter().map(|a| a.norm()).sum::<f64>() / p.den().coeffs()[0].norm();
    1f64.max((2.0 + rest) / lead)
}

/// Bounded-orbit test for membership in the filled Julia set of `p`.
pub fn in_filled_julia(p: &RationalMap, z: Complex64, radius: f64) -> bool {
    let mut w = z;
    for _ in 0..ESCAPE_ITERATIONS {
        if w.norm() > radius {
            return false;
        }
        w = match p.eval_c(w) {
            Point::Finite(v) => v,
            Point::Infinity => return false,
        };
    }
    true
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Self {
        Region::Disk { center: [center.re, center.im], radius }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Region::Disk { center, radius } => center.iter().all(|x| x.is_finite()) && radius.is_finite() && *radius > 0.0,
            Region::Annulus { center, inner, outer } => {
                center.iter().all(|x| x.is_finite()) && *inner >= 0.0 && outer.is_finite() && outer > inner
            }
            Region::Rectangle { min, max } => (0..2).all(|k| min[k].is_finite() && max[k].is_finite() && min[k] < max[k]),
            Region::HullDifference { outer, inner } => {
                outer.is_polynomial() && inner.is_polynomial() && outer.degree() >= 2 && inner.degree() >= 2
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("region has empty interior or bad parameters: {self:?}")))
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Region::HullDifference { outer, inner } => {
                in_filled_julia(outer, z, escape_radius(outer)) && !in_filled_julia(inner, z, escape_radius(inner))
            }
            _ => self.depth(z) > 0.0,
        }
    }

    pub fn contains_point(&self, z: Point) -> bool {
        z.finite().is_some_and(|z| self.contains(z))
    }

    /// Signed distance to the boundary, positive inside. For hull
    /// differences only the sign is meaningful, and it is `±probe` when
    /// membership is stable under perturbations of size `probe`, else 0.
    pub fn depth_with_probe(&self, z: Complex64, probe: f64) -> f64 {
        match self {
            Region::Disk { center, radius } => radius - (z - c(*center)).norm(),
            Region::Annulus { center, inner, outer } => {
                let r = (z - c(*center)).norm();
                (r - inner).min(outer - r)
            }
            Region::Rectangle { min, max } => (z.re - min[0]).min(max[0] - z.re).min(z.im - min[1]).min(max[1] - z.im),
            Region::HullDifference { .. } => {
                let inside = self.contains(z);
                let offsets = [Complex64::new(probe, 0.0), Complex64::new(-probe, 0.0), Complex64::new(0.0, probe), Complex64::new(0.0, -probe)];
                if offsets.iter().all(|&o| self.contains(z + o) == inside) {
                    if inside {
                        probe
                    } else {
                        -probe
                    }
                } else {
                    0.0
                }
            }
        }
    }

    fn depth(&self, z: Complex64) -> f64 {
        self.depth_with_probe(z, 0.0)
    }

    /// `(xmin, xmax, ymin, ymax)` containing the region.
    pub fn bounding_box(&self) -> [f64; 4] {
        match self {
            Region::Disk { center, radius } => [center[0] - radius, center[0] + radius, center[1] - radius, center[1] + radius],
            Region::Annulus { center, outer, .. } => [center[0] - outer, center[0] + outer, center[1] - outer, center[1] + outer],
            Region::Rectangle { min, max } => [min[0], max[0], min[1], max[1]],
            Region::HullDifference { outer, .. } => {
                let r = escape_radius(outer);
                [-r, r, -r, r]
            }
        }
    }

    /// Radius of the largest ball known to fit in the region, when available.
    pub fn inradius(&self) -> Option<f64> {
        match self {
            Region::Disk { radius, .. } => Some(*radius),
            Region::Annulus { inner, outer, .. } => Some((outer - inner) / 2.0),
            Region::Rectangle { min, max } => Some(((max[0] - min[0]).min(max[1] - min[1])) / 2.0),
            Region::HullDifference { .. } => None,
        }
    }
}
