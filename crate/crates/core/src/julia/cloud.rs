use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par;
use crate::rational::{Metric, Point, RationalMap};
use crate::words::{build_frontier, orbit_with_rng, MultiMap, PruningPolicy};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CloudMethod {
    FullTree,
    ChaosGame,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JuliaParams {
    pub method: CloudMethod,
    /// Tree depth for `full_tree`.
    pub depth: usize,
    /// Points kept for `chaos_game`.
    pub length: usize,
    /// Points discarded at the start of every chaos-game segment.
    pub burn_in: usize,
    /// Independent chaos-game chains, each with its own seed stream.
    pub segments: usize,
    pub seed: u64,
    pub budget: u64,
}

impl Default for JuliaParams {
    fn default() -> Self {
        JuliaParams {
            method: CloudMethod::FullTree,
            depth: 10,
            length: 1_000_000,
            burn_in: 50,
            segments: 16,
            seed: 0,
            budget: 1 << 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    pub points: Vec<Complex64>,
    pub method: CloudMethod,
    pub burn_in: usize,
    /// FNV-1a hash of the generators' JSON form.
    pub source_hash: u64,
}

impl PointCloud {
    pub fn from_points(points: Vec<Complex64>) -> Self {
        PointCloud { points, method: CloudMethod::FullTree, burn_in: 0, source_hash: 0 }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(min_re, min_im, max_re, max_im)`
    pub fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let first = self.points.first()?;
        Some(self.points.iter().fold(
            (first.re, first.im, first.re, first.im),
            |(a, b, c, d), z| (a.min(z.re), b.min(z.im), c.max(z.re), d.max(z.im)),
        ))
    }

    /// Distance from `z` to the nearest cloud point (linear scan).
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x100000001b3)
    })
}

/// A fixed point of `g` with `|g'| > 1`, smallest by `(re, im)`.
pub fn repelling_fixed_point(g: &RationalMap) -> Result<Complex64> {
    let fixed = g.fixed_points()?;
    let found = fixed
        .finite()
        .find(|&(z, _)| {
            g.derivative(Point::Finite(z), Metric::Euclidean)
                .map(|d| d.norm > 1.0)
                .unwrap_or(false)
        })
        .map(|(z, _)| z);
    found.ok_or(Error::NoRepellingFixedPoint)
}

/// Seed from the first generator admitting a repelling fixed point.
pub(crate) fn julia_seed(f: &MultiMap) -> Result<Complex64> {
    f.generators()
        .iter()
        .find_map(|g| repelling_fixed_point(g).ok())
        .ok_or(Error::NoRepellingFixedPoint)
}

/// Backward-orbit approximation of `J(G)` seeded at a repelling fixed point.
pub fn approximate_julia(f: &MultiMap, params: &JuliaParams) -> Result<PointCloud> {
    let seed_point = julia_seed(f)?;
    let source_hash = fnv1a(serde_json::to_string(f).unwrap_or_default().as_bytes());
    let points = match params.method {
        CloudMethod::FullTree => {
            let (nodes, _) = build_frontier(
                f,
                seed_point,
                params.depth,
                PruningPolicy::Exhaustive { budget: params.budget },
                Metric::Euclidean,
            )?;
            nodes.into_iter().map(|n| n.point).collect()
        }
        CloudMethod::ChaosGame => {
            if params.length == 0 {
                return Err(Error::InvalidArgument("chaos game length must be positive".into()));
            }
            let segments = params.segments.max(1);
            let per = params.length.div_ceil(segments);
            let chains = par::map_range(segments, |k| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(k as u64);
                orbit_with_rng(f, seed_point, per + params.burn_in, &mut rng)
                    .map(|o| o[params.burn_in..].to_vec())
            });
            let mut points = Vec::with_capacity(segments * per);
            for c in chains {
                points.extend(c?);
            }
            points.truncate(params.length);
            points
        }
    };
    Ok(PointCloud { points, method: params.method, burn_in: params.burn_in, source_hash })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> RationalMap {
        RationalMap::from_real_poly(c).unwrap()
    }

    #[test]
    fn repelling_fixed_point_examples() {
        let z = repelling_fixed_point(&poly(&[0.0, 0.0, 1.0])).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let z = repelling_fixed_point(&poly(&[0.0, 3.0])).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
        // z^2 - 2 fixes -1 and 2, both repelling
        let z = repelling_fixed_point(&poly(&[-2.0, 0.0, 1.0])).unwrap();
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn attracting_only_map_has_no_seed() {
        // z/2 has its only finite fixed point at 0 with multiplier 1/2
        assert_eq!(repelling_fixed_point(&poly(&[0.0, 0.5])), Err(Error::NoRepellingFixedPoint));
    }

    #[test]
    fn depth_zero_cloud_is_the_seed() {
        let f = MultiMap::new(vec![poly(&[0.0, 3.0]), poly(&[-2.0, 3.0])]).unwrap();
        let p = JuliaParams { depth: 0, ..JuliaParams::default() };
        let cloud = approximate_julia(&f, &p).unwrap();
        assert_eq!(cloud.points, vec![Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn chaos_game_is_seed_deterministic() {
        let f = MultiMap::new(vec![poly(&[2.0, 0.0, 1.0]), poly(&[-2.0, 0.0, 1.0])]).unwrap();
        let p = JuliaParams { method: CloudMethod::ChaosGame, length: 5000, burn_in: 10, segments: 4, seed: 3, ..JuliaParams::default() };
        let a = approximate_julia(&f, &p).unwrap();
        let b = approximate_julia(&f, &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5000);
    }
}
