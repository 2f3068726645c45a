use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Region;
use crate::par;
use crate::rational::Point;
use crate::words::MultiMap;
use crate::{Error, Result};

/// Witness points kept per condition.
const MAX_WITNESSES: usize = 64;
/// Jittered samples per osc3 ball (a 20 x 20 polar stratification).
const BALL_STRATA: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OscParams {
    /// Grid points per axis.
    pub grid: usize,
    /// `(xmin, xmax, ymin, ymax)`; defaults to the region's bounding box
    /// enlarged by half its size on every side.
    pub bounds: Option<[f64; 4]>,
    /// Membership evaluations spent on the osc3 density estimate.
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for OscParams {
    fn default() -> Self {
        OscParams { grid: 400, bounds: None, mc_samples: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairWitness {
    pub point: [f64; 2],
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscReport {
    /// Grid points `x ∉ U` with some `f_j(x) ∈ U`.
    pub osc1_violations: u64,
    pub osc1_witnesses: Vec<PairWitness>,
    /// Grid points with `f_i(x), f_j(x) ∈ U` for some `i < j`.
    pub osc2_violations: u64,
    pub osc2_witnesses: Vec<PairWitness>,
    /// Raw grid hits discarded because membership was not robust.
    pub unconfirmed: u64,
    /// Smallest sampled density of `U` in balls centred near `∂U`.
    pub osc3_alpha: Option<f64>,
    pub osc3_balls: usize,
    pub osc3_max_radius: f64,
    pub grid_size: usize,
    pub bounds: [f64; 4],
    pub mc_samples: usize,
}

impl OscReport {
    pub fn passes_osc1_osc2(&self) -> bool {
        self.osc1_violations == 0 && self.osc2_violations == 0
    }
}

#[derive(Default)]
struct RowTally {
    osc1: u64,
    osc2: u64,
    unconfirmed: u64,
    w1: Vec<PairWitness>,
    w2: Vec<PairWitness>,
    boundary: Vec<Complex64>,
}

fn image(f: &MultiMap, j: usize, x: Complex64) -> Point {
    f.generators()[j].eval_c(x)
}

fn robust_depth(u: &Region, z: Point, probe: f64) -> f64 {
    match z {
        Point::Finite(w) => u.depth_with_probe(w, probe),
        Point::Infinity => -f64::INFINITY,
    }
}

/// Grid and Monte Carlo test of the open set condition for `U`.
///
/// Membership of `f_j^{-1}(U)` is decided by evaluating `f_j`. Every
/// counted violation has been re-checked with a robustness margin, so
/// refining the grid cannot turn a reported witness into a pass.
pub fn check_osc(f: &MultiMap, u: &Region, params: &OscParams) -> Result<OscReport> {
    u.validate()?;
    if params.grid < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
    }
    let bounds = params.bounds.unwrap_or_else(|| {
        let [x0, x1, y0, y1] = u.bounding_box();
        let (mx, my) = ((x1 - x0) / 2.0, (y1 - y0) / 2.0);
        [x0 - mx, x1 + mx, y0 - my, y1 + my]
    });
    if !(bounds[1] > bounds[0] && bounds[3] > bounds[2]) {
        return Err(Error::InvalidArgument("empty grid bounds".into()));
    }
    let n = params.grid;
    let hx = (bounds[1] - bounds[0]) / (n - 1) as f64;
    let hy = (bounds[3] - bounds[2]) / (n - 1) as f64;
    let at = |row: usize, col: usize| Complex64::new(bounds[0] + col as f64 * hx, bounds[2] + row as f64 * hy);
    let margin = 1e-9 * bounds.iter().fold(1f64, |m, b| m.max(b.abs()));
    let u_count = f.len();

    let rows = par::map_range(n, |row| {
        let mut t = RowTally::default();
        let inside: Vec<bool> = (0..n).map(|col| u.contains(at(row, col))).collect();
        for col in 0..n {
            let x = at(row, col);
            let imgs: Vec<Point> = (0..u_count).map(|j| image(f, j, x)).collect();
            let hits: Vec<usize> = (0..u_count).filter(|&j| u.contains_point(imgs[j])).collect();
            if !inside[col] {
                if let Some(&j) = hits.first() {
                    if u.depth_with_probe(x, margin) < -margin && robust_depth(u, imgs[j], margin) > margin {
                        t.osc1 += 1;
                        t.w1.push(PairWitness { point: [x.re, x.im], i: j + 1, j: j + 1 });
                    } else {
                        t.unconfirmed += 1;
                    }
                }
            }
            if hits.len() >= 2 {
                let robust: Vec<usize> = hits.iter().copied().filter(|&j| robust_depth(u, imgs[j], margin) > margin).collect();
                if robust.len() >= 2 {
                    t.osc2 += 1;
                    t.w2.push(PairWitness { point: [x.re, x.im], i: robust[0] + 1, j: robust[1] + 1 });
                } else {
                    t.unconfirmed += 1;
                }
            }
            if inside[col] {
                let up = row + 1 < n && !u.contains(at(row + 1, col));
                let down = row > 0 && !u.contains(at(row - 1, col));
                let left = col > 0 && !inside[col - 1];
                let right = col + 1 < n && !inside[col + 1];
                if up || down || left || right {
                    t.boundary.push(x);
                }
            }
        }
        t
    });

    let mut total = RowTally::default();
    for t in rows {
        total.osc1 += t.osc1;
        total.osc2 += t.osc2;
        total.unconfirmed += t.unconfirmed;
        total.w1.extend(t.w1.into_iter().take(MAX_WITNESSES - total.w1.len().min(MAX_WITNESSES)));
        total.w2.extend(t.w2.into_iter().take(MAX_WITNESSES - total.w2.len().min(MAX_WITNESSES)));
        total.boundary.extend(t.boundary);
    }

    let max_radius = u.inradius().map_or(1.0, |r| r.min(1.0));
    let min_radius = (hx.max(hy) * 2.0).min(max_radius / 10.0);
    let balls = (params.mc_samples / (BALL_STRATA * BALL_STRATA)).max(1);
    let alpha = if total.boundary.is_empty() || params.mc_samples == 0 {
        None
    } else {
        let centers = &total.boundary;
        let densities = par::map_range(balls, |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(b as u64);
            let x = centers[rng.gen_range(0..centers.len())];
            let r = min_radius * (max_radius / min_radius).powf(rng.gen::<f64>());
            ball_density(u, x, r, &mut rng)
        });
        Some(densities.into_iter().fold(1.0, f64::min))
    };

    Ok(OscReport {
        osc1_violations: total.osc1,
        osc1_witnesses: total.w1,
        osc2_violations: total.osc2,
        osc2_witnesses: total.w2,
        unconfirmed: total.unconfirmed,
        osc3_alpha: alpha,
        osc3_balls: if alpha.is_some() { balls } else { 0 },
        osc3_max_radius: max_radius,
        grid_size: n,
        bounds,
        mc_samples: params.mc_samples,
    })
}

/// Fraction of `B(x, r)` inside `U` from jittered area-uniform samples.
fn ball_density(u: &Region, x: Complex64, r: f64, rng: &mut ChaCha8Rng) -> f64 {
    let k = BALL_STRATA;
    let mut hits = 0usize;
    for a in 0..k {
        for b in 0..k {
            let rad = r * ((a as f64 + rng.gen::<f64>()) / k as f64).sqrt();
            let ang = std::f64::consts::TAU * (b as f64 + rng.gen::<f64>()) / k as f64;
            if u.contains(x + Complex64::from_polar(rad, ang)) {
                hits += 1;
            }
        }
    }
    hits as f64 / (k * k) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalMap;

    fn maps(cs: &[&[f64]]) -> MultiMap {
        MultiMap::new(cs.iter().map(|c| RationalMap::from_real_poly(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn pm2_passes_with_radius_two_disk() {
        let f = maps(&[&[2.0, 0.0, 1.0], &[-2.0, 0.0, 1.0]]);
        let u = Region::disk(Complex64::new(0.0, 0.0), 2.0);
        let rep = check_osc(&f, &u, &OscParams { grid: 301, mc_samples: 20_000, ..Default::default() }).unwrap();
        assert!(rep.passes_osc1_osc2(), "{rep:?}");
        let alpha = rep.osc3_alpha.unwrap();
        assert!(alpha > 0.3 && alpha < 0.6, "{alpha}");
    }

    #[test]
    fn duplicated_generators_overlap() {
        let f = maps(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0]]);
        let u = Region::disk(Complex64::new(0.0, 0.0), 1.0);
        let rep = check_osc(&f, &u, &OscParams { grid: 101, mc_samples: 0, ..Default::default() }).unwrap();
        assert_eq!(rep.osc1_violations, 0);
        assert!(rep.osc2_violations > 1000);
        let w = rep.osc2_witnesses[0];
        assert!(Complex64::new(w.point[0], w.point[1]).norm() < 1.0);
        assert_eq!((w.i, w.j), (1, 2));
    }

    #[test]
    fn cantor_disk_passes() {
        let f = maps(&[&[0.0, 3.0], &[-2.0, 3.0]]);
        let u = Region::disk(Complex64::new(0.5, 0.0), 0.5);
        let rep = check_osc(&f, &u, &OscParams { grid: 401, mc_samples: 40_000, ..Default::default() }).unwrap();
        assert!(rep.passes_osc1_osc2(), "{rep:?}");
        assert!(rep.osc3_alpha.unwrap() >= 0.3);
    }

    #[test]
    fn too_small_disk_violates_osc1() {
        // 3z maps points just outside B(0.5, 0.2) into it
        let f = maps(&[&[0.0, 3.0], &[-2.0, 3.0]]);
        let u = Region::disk(Complex64::new(0.5, 0.0), 0.2);
        let rep = check_osc(&f, &u, &OscParams { grid: 101, mc_samples: 0, ..Default::default() }).unwrap();
        assert!(rep.osc1_violations > 0);
    }

    #[test]
    fn report_is_deterministic() {
        let f = maps(&[&[2.0, 0.0, 1.0], &[-2.0, 0.0, 1.0]]);
        let u = Region::disk(Complex64::new(0.0, 0.0), 2.0);
        let p = OscParams { grid: 64, mc_samples: 4000, seed: 9, ..Default::default() };
        assert_eq!(check_osc(&f, &u, &p).unwrap(), check_osc(&f, &u, &p).unwrap());
    }
}
