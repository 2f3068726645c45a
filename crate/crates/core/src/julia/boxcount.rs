use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::PointCloud;
use crate::par;
use crate::{Error, Result};

/// Grid offsets averaged per box size.
const OFFSETS: usize = 4;

/// Least-squares fit of `log N(ε)` against `log(1/ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionFit {
    pub epsilons: Vec<f64>,
    pub counts: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
    /// 95% confidence half-width of the slope.
    pub ci: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// `steps` box sizes from a quarter of the cloud's extent down `decades`
/// powers of ten.
pub fn default_eps_range(cloud: &PointCloud, decades: f64, steps: usize) -> Vec<f64> {
    let extent = cloud
        .bounds()
        .map(|(a, b, c, d)| (c - a).max(d - b))
        .filter(|e| *e > 0.0)
        .unwrap_or(1.0);
    let top = extent / 4.0;
    let steps = steps.max(2);
    (0..steps)
        .map(|k| top * 10f64.powf(-decades * k as f64 / (steps - 1) as f64))
        .collect()
}

fn count_boxes(points: &[num_complex::Complex64], eps: f64, offset: (f64, f64)) -> usize {
    let mut cells: Vec<(i64, i64)> = points
        .iter()
        .map(|z| {
            (
                ((z.re - offset.0) / eps).floor() as i64,
                ((z.im - offset.1) / eps).floor() as i64,
            )
        })
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Box-counting slope over `epsilons` with grid offsets drawn from `seed`.
pub fn box_count_dimension(cloud: &PointCloud, epsilons: &[f64], seed: u64) -> Result<DimensionFit> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if epsilons.len() < 4 {
        return Err(Error::InvalidArgument("box counting needs at least 4 box sizes".into()));
    }
    if epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument("box sizes must be positive".into()));
    }
    let mut eps = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut warnings = Vec::new();
    if cloud.len() < 1000 {
        warnings.push(format!("sparse cloud: {} points (< 1000)", cloud.len()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(f64, (f64, f64))> = eps
        .iter()
        .flat_map(|&e| {
            (0..OFFSETS)
                .map(|_| (e, (rng.gen::<f64>() * e, rng.gen::<f64>() * e)))
                .collect::<Vec<_>>()
        })
        .collect();
    let raw = par::map(&jobs, |&(e, off)| count_boxes(&cloud.points, e, off));
    let counts: Vec<f64> = raw
        .chunks(OFFSETS)
        .map(|c| c.iter().sum::<usize>() as f64 / OFFSETS as f64)
        .collect();

    let xs: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();

    if syy == 0.0 {
        warnings.push("DegenerateFit: all box counts are equal".into());
        return Ok(DimensionFit { epsilons: eps, counts, slope: 0.0, r2: 0.0, ci: 0.0, warnings });
    }
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let r2 = 1.0 - ss_res / syy;
    let dof = m - 2.0;
    let se = (ss_res / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(1.96);
    Ok(DimensionFit { epsilons: eps, counts, slope, r2, ci: t * se, warnings })
}
