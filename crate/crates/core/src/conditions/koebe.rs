use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par;
use crate::rational::{Metric, Point};
use crate::words::{MultiMap, PreimageTree, PruningPolicy, Word};
use crate::{Error, Result};

/// Straight-line continuation steps when following an inverse branch.
const CONTINUATION_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KoebeParams {
    pub base_point: [f64; 2],
    pub max_depth: usize,
    pub branches: usize,
    pub boundary_samples: usize,
    /// Fraction of the distance to the nearest critical value used as `r`.
    pub radius_fraction: f64,
    pub seed: u64,
}

impl Default for KoebeParams {
    fn default() -> Self {
        KoebeParams { base_point: [0.0, 2.0], max_depth: 4, branches: 100, boundary_samples: 200, radius_fraction: 0.5, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoebeReport {
    pub branches_tested: usize,
    pub samples: usize,
    pub violations: usize,
    /// Largest `|f_ω(w) - z| / r` over boundary samples `w`; below 1 means
    /// every sample came from inside `B(z, r)`.
    pub max_relative_reach: f64,
}

/// Finite critical values of `f_ω`.
fn critical_values(f: &MultiMap, word: &Word) -> Result<Vec<Complex64>> {
    let syms: Vec<usize> = word.symbols().collect();
    let mut out = Vec::new();
    for k in 0..syms.len() {
        let tail = Word::from_symbols(&syms[k + 1..])?;
        for (c, _) in f.generator(syms[k])?.critical_points()?.finite() {
            let v = f.generator(syms[k])?.eval_c(c);
            if let Some(w) = f.compose_apply(&tail, v)?.finite() {
                out.push(w);
            }
        }
    }
    Ok(out)
}

fn apply(f: &MultiMap, word: &Word, x: Complex64) -> Result<(Complex64, Complex64)> {
    let y = f.compose_apply(word, Point::Finite(x))?.finite().ok_or(Error::PoleDerivative)?;
    let d = f.word_derivative(word, Point::Finite(x), Metric::Euclidean)?.value.ok_or(Error::PoleDerivative)?;
    Ok((y, d))
}

/// Follows the inverse branch of `f_ω` through `(z, start)` along the
/// segment from `z` to `target` with Newton corrections.
fn continue_branch(f: &MultiMap, word: &Word, z: Complex64, start: Complex64, target: Complex64) -> Result<Complex64> {
    let mut x = start;
    for k in 1..=CONTINUATION_STEPS {
        let u = z + (target - z) * (k as f64 / CONTINUATION_STEPS as f64);
        for _ in 0..50 {
            let (y, d) = apply(f, word, x)?;
            let step = (y - u) / d;
            x -= step;
            if step.norm() <= 1e-15 * x.norm().max(1.0) {
                break;
            }
        }
    }
    Ok(x)
}

/// Numeric check of the Koebe quarter theorem on inverse branches: if `H`
/// is the branch of `f_ω^{-1}` through `(z, y)` on a disk `B(z, r)` free of
/// critical values, every point on the circle of radius `|H'(z)| r / 4`
/// about `y` must be `H(u)` for some `u ∈ B(z, r)`.
pub fn koebe_quarter_check(f: &MultiMap, params: &KoebeParams) -> Result<KoebeReport> {
    if params.max_depth == 0 || params.branches == 0 || params.boundary_samples == 0 {
        return Err(Error::InvalidArgument("depth, branches and samples must be positive".into()));
    }
    let z = Complex64::new(params.base_point[0], params.base_point[1]);
    let tree = PreimageTree::build(f, z, params.max_depth, PruningPolicy::default(), Metric::Euclidean)?;
    let mut all: Vec<(usize, usize)> = Vec::new();
    for n in 1..=params.max_depth {
        all.extend((0..tree.level(n).len()).map(|i| (n, i)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let picked: Vec<(usize, usize)> = if all.len() <= params.branches {
        all
    } else {
        let mut idx = index::sample(&mut rng, all.len(), params.branches).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| all[i]).collect()
    };

    let results = par::map(&picked, |&(n, i)| -> Result<Option<(usize, f64)>> {
        let node = tree.level(n)[i];
        let word = tree.word(n, i);
        let y = node.point;
        let cvs = critical_values(f, &word)?;
        let dist = cvs.iter().map(|c| (c - z).norm()).fold(f64::INFINITY, f64::min);
        if dist == 0.0 || node.cum_norm == 0.0 {
            return Ok(None);
        }
        let r = params.radius_fraction * dist.min(1.0);
        let rho = r / node.cum_norm / 4.0;
        let mut violations = 0;
        let mut reach: f64 = 0.0;
        for k in 0..params.boundary_samples {
            let w = y + Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / params.boundary_samples as f64);
            let (u, _) = apply(f, &word, w)?;
            let rel = (u - z).norm() / r;
            reach = reach.max(rel);
            let back = if rel < 1.0 { continue_branch(f, &word, z, y, u)? } else { w + rho };
            if rel >= 1.0 || (back - w).norm() > 1e-8 * rho.max(1e-300) + 1e-12 {
                violations += 1;
            }
        }
        Ok(Some((violations, reach)))
    });

    let mut report = KoebeReport { branches_tested: 0, samples: 0, violations: 0, max_relative_reach: 0.0 };
    for r in results {
        if let Some((v, reach)) = r? {
            report.branches_tested += 1;
            report.samples += params.boundary_samples;
            report.violations += v;
            report.max_relative_reach = report.max_relative_reach.max(reach);
        }
    }
    Ok(report)
}
