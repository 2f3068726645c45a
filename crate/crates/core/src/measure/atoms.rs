use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::par;
use crate::rational::{chordal_distance, Metric, Point};
use crate::words::{MultiMap, PreimageTree, PruningPolicy, Word};
use crate::{Error, Result};

/// Spherical distance under which projected atoms are merged.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub word: Word,
    pub point: Complex64,
    pub mass: f64,
}

impl Atom {
    pub fn depth(&self) -> usize {
        self.word.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureParams {
    pub t: f64,
    pub s: f64,
    pub truncation: usize,
    pub base_point: [f64; 2],
    pub metric: Metric,
    pub sampled: bool,
}

/// Finitely supported probability measure on `(word, point)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    pub atoms: Vec<Atom>,
    pub total_mass: f64,
    pub params: MeasureParams,
    /// Normalizer `Σ_{n=1}^N e^{-sn} Λ_t^n 1(ξ)`.
    pub normalizer: f64,
    /// Normalized mass of each level `1..=N`.
    pub level_masses: Vec<f64>,
    /// Nodes with vanishing derivative were left out.
    pub infinite_sum: bool,
}

impl AtomicMeasure {
    pub fn base_point(&self) -> Complex64 {
        Complex64::new(self.params.base_point[0], self.params.base_point[1])
    }

    /// Geometric-mean ratio of consecutive level masses over the deeper half.
    pub fn level_decay_ratio(&self) -> f64 {
        decay_ratio(&self.level_masses)
    }
}

fn decay_ratio(levels: &[f64]) -> f64 {
    let n = levels.len();
    if n < 2 {
        return 0.0;
    }
    let start = (n - 1) / 2;
    ((levels[n - 1].ln() - levels[start].ln()) / (n - 1 - start) as f64).exp()
}

/// Atoms at every `(ω, x)` with `1 <= |ω| <= N` and `f_ω(x) = ξ`, with mass
/// proportional to `e^{-s|ω|} |f_ω'(x)|^{-t}`, normalized to total mass 1.
pub fn build_conformal_atoms(
    f: &MultiMap,
    xi: Complex64,
    t: f64,
    s: f64,
    truncation: usize,
    policy: PruningPolicy,
    metric: Metric,
) -> Result<AtomicMeasure> {
    if truncation < 2 {
        return Err(Error::InvalidArgument("truncation depth must be at least 2".into()));
    }
    let tree = PreimageTree::build(f, xi, truncation, policy, metric)?;
    let log_mass = |n: usize, w: f64, norm: f64| -> Option<f64> {
        if norm > 0.0 {
            Some(w.ln() - s * n as f64 - t * norm.ln())
        } else if t == 0.0 {
            Some(w.ln() - s * n as f64)
        } else {
            None
        }
    };
    let mut infinite_sum = false;
    let mut raw_levels = Vec::with_capacity(truncation);
    for n in 1..=truncation {
        let level = tree.level(n);
        infinite_sum |= t > 0.0 && level.iter().any(|node| node.cum_norm == 0.0);
        raw_levels.push(par::sum_by(level, |node| {
            log_mass(n, node.total_weight(), node.cum_norm).map_or(0.0, f64::exp)
        }));
    }
    let ratio = decay_ratio(&raw_levels);
    if !(ratio < 1.0) {
        return Err(Error::SeriesNotDecaying { ratio });
    }
    let normalizer: f64 = raw_levels.iter().sum();
    let log_norm = normalizer.ln();

    let mut atoms = Vec::with_capacity(tree.node_count());
    for n in 1..=truncation {
        let level = tree.level(n);
        let built = par::map_range(level.len(), |i| {
            let node = &level[i];
            log_mass(n, node.total_weight(), node.cum_norm).map(|lm| Atom {
                word: tree.word(n, i),
                point: node.point,
                mass: (lm - log_norm).exp(),
            })
        });
        atoms.extend(built.into_iter().flatten());
    }
    let total_mass = par::sum_by(&atoms, |a| a.mass);
    Ok(AtomicMeasure {
        atoms,
        total_mass,
        params: MeasureParams {
            t,
            s,
            truncation,
            base_point: [xi.re, xi.im],
            metric,
            sampled: policy.is_sampling(),
        },
        normalizer,
        level_masses: raw_levels.iter().map(|l| l / normalizer).collect(),
        infinite_sum,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarAtom {
    pub point: Complex64,
    pub mass: f64,
    /// Smallest word length merged into this atom.
    pub depth: usize,
}

/// Projection of an [`AtomicMeasure`] to the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMeasure {
    pub atoms: Vec<PlanarAtom>,
    pub total_mass: f64,
}

impl PlanarMeasure {
    /// CSV with columns `re, im, mass, depth`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "re,im,mass,depth")?;
        for a in &self.atoms {
            writeln!(out, "{},{},{},{}", a.point.re, a.point.im, a.mass, a.depth)?;
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.atoms.iter().map(|a| a.point).collect()
    }
}

/// Drops words and merges atoms closer than [`MERGE_TOL`] (spherical).
pub fn project_measure(nu: &AtomicMeasure) -> PlanarMeasure {
    // cells of side MERGE_TOL in the plane over-resolve the spherical
    // tolerance, so checking the 3x3 neighbourhood finds every match
    let key = |z: Complex64| ((z.re / MERGE_TOL).floor() as i64, (z.im / MERGE_TOL).floor() as i64);
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut atoms: Vec<PlanarAtom> = Vec::new();
    for a in &nu.atoms {
        let (kx, ky) = key(a.point);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = cells.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        if chordal_distance(Point::Finite(atoms[i].point), Point::Finite(a.point)) <= MERGE_TOL {
                            found = Some(i);
                            break 'search;
                        }
                    }
                }
            }
        }
        match found {
            Some(i) => {
                atoms[i].mass += a.mass;
                atoms[i].depth = atoms[i].depth.min(a.depth());
            }
            None => {
                cells.entry((kx, ky)).or_default().push(atoms.len());
                atoms.push(PlanarAtom { point: a.point, mass: a.mass, depth: a.depth() });
            }
        }
    }
    let total_mass = par::sum_by(&atoms, |a| a.mass);
    PlanarMeasure { atoms, total_mass }
}
