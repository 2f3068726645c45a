use num_complex::Complex64;
use serde::Serialize;

use crate::julia::PointCloud;
use crate::par;
use crate::rational::{Point, CHART_SWITCH};
use crate::words::MultiMap;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The orbit stays farther than `10 * dist_tol` from the critical point.
    Consistent,
    /// Some orbit point returns within `dist_tol`.
    Violated,
    Inconclusive,
    /// The critical point is not within `dist_tol` of the Julia cloud.
    NotInJ,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPairReport {
    pub critical_point: [f64; 2],
    /// 1-based generator index.
    pub generator: usize,
    pub multiplicity: u32,
    pub distance_to_cloud: f64,
    /// `min |g(f_j(c)) - c|` over words `g` of length at most `depth`.
    pub min_distance: Option<f64>,
    pub orbit_points: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiHypReport {
    pub pairs: Vec<CriticalPairReport>,
    pub depth: usize,
    pub dist_tol: f64,
    /// Worst verdict over pairs that lie on the cloud.
    pub overall: Verdict,
}

/// Heuristic check of `dist(c, G*(f_j(c))) > 0` for critical points `c` of
/// `f_j` lying on the sampled Julia set. Only finite critical points are
/// examined and the companion non-recurrence condition is not tested.
pub fn check_semihyperbolicity(f: &MultiMap, julia: &PointCloud, depth: usize, dist_tol: f64) -> Result<SemiHypReport> {
    if !(dist_tol > 0.0) {
        return Err(Error::InvalidArgument("dist_tol must be positive".into()));
    }
    if julia.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut pairs = Vec::new();
    for (j, g) in f.generators().iter().enumerate() {
        for (c, m) in g.critical_points()?.finite() {
            let distance_to_cloud = julia.distance_to(c);
            let mut rep = CriticalPairReport {
                critical_point: [c.re, c.im],
                generator: j + 1,
                multiplicity: m,
                distance_to_cloud,
                min_distance: None,
                orbit_points: 0,
                verdict: Verdict::NotInJ,
            };
            if distance_to_cloud <= dist_tol {
                if let Point::Finite(v) = g.eval_c(c) {
                    let (min, count) = orbit_min_distance(f, v, c, depth);
                    rep.min_distance = Some(min);
                    rep.orbit_points = count;
                    rep.verdict = if min <= dist_tol {
                        Verdict::Violated
                    } else if min > 10.0 * dist_tol {
                        Verdict::Consistent
                    } else {
                        Verdict::Inconclusive
                    };
                } else {
                    rep.min_distance = Some(f64::INFINITY);
                    rep.verdict = Verdict::Consistent;
                }
            }
            pairs.push(rep);
        }
    }
    let rank = |v: Verdict| match v {
        Verdict::NotInJ => 0,
        Verdict::Consistent => 1,
        Verdict::Inconclusive => 2,
        Verdict::Violated => 3,
    };
    let overall = pairs.iter().map(|p| p.verdict).max_by_key(|&v| rank(v)).unwrap_or(Verdict::NotInJ);
    Ok(SemiHypReport { pairs, depth, dist_tol, overall })
}

/// Minimum distance from `c` to `{g(v) : |g| <= depth}`, dropping points
/// that leave every bounded chart.
fn orbit_min_distance(f: &MultiMap, v: Complex64, c: Complex64, depth: usize) -> (f64, usize) {
    let mut level = vec![v];
    let mut min = (v - c).norm();
    let mut count = 1;
    for _ in 0..depth {
        let next: Vec<Complex64> = par::map(&level, |&x| {
            f.generators()
                .iter()
                .filter_map(|g| g.eval_c(x).finite())
                .filter(|y| y.norm() <= CHART_SWITCH)
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        if next.is_empty() {
            break;
        }
        min = min.min(-par::max_by(&next, |y| -(y - c).norm()));
        count += next.len();
        level = next;
    }
    (min, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalMap;

    fn maps(cs: &[&[f64]]) -> MultiMap {
        MultiMap::new(cs.iter().map(|c| RationalMap::from_real_poly(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn chebyshev_probe_is_consistent() {
        // J(z^2 - 2) = [-2, 2]; the orbit of f(0) = -2 is {-2, 2}
        let f = maps(&[&[-2.0, 0.0, 1.0], &[-2.0, 0.0, 1.0]]);
        let cloud = PointCloud::from_points((0..=400).map(|k| Complex64::new(-2.0 + 0.01 * k as f64, 0.0)).collect());
        let rep = check_semihyperbolicity(&f, &cloud, 6, 0.02).unwrap();
        assert_eq!(rep.pairs.len(), 2);
        for p in &rep.pairs {
            assert_eq!(p.verdict, Verdict::Consistent);
            assert!((p.min_distance.unwrap() - 2.0).abs() < 1e-12);
        }
        assert_eq!(rep.overall, Verdict::Consistent);
    }

    #[test]
    fn critical_point_off_the_cloud() {
        let f = maps(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 2.0]]);
        let circle = PointCloud::from_points((0..360).map(|k| Complex64::from_polar(1.0, k as f64 * 0.0175)).collect());
        let rep = check_semihyperbolicity(&f, &circle, 4, 0.05).unwrap();
        assert!(rep.pairs.iter().all(|p| p.verdict == Verdict::NotInJ && p.min_distance.is_none()));
    }

    #[test]
    fn recurrent_critical_orbit_is_violated() {
        // z^2 - 1: 0 -> -1 -> 0
        let f = maps(&[&[-1.0, 0.0, 1.0], &[-1.0, 0.0, 1.0]]);
        let cloud = PointCloud::from_points(vec![Complex64::new(0.0, 0.0)]);
        let rep = check_semihyperbolicity(&f, &cloud, 3, 1e-3).unwrap();
        assert_eq!(rep.overall, Verdict::Violated);
    }
}
