//! Simultaneous root finding (Aberth-Ehrlich) with multiplicity clustering.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Point, Polynomial, DEFAULT_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub point: Point,
    pub multiplicity: u32,
}

/// Distinct roots with multiplicities.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// False when the iteration hit its cap; the roots are the best iterate.
    pub converged: bool,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn finite(&self) -> impl Iterator<Item = (Complex64, u32)> + '_ {
        self.roots
            .iter()
            .filter_map(|r| r.point.finite().map(|z| (z, r.multiplicity)))
    }

    pub fn infinite_multiplicity(&self) -> u32 {
        self.roots
            .iter()
            .filter(|r| r.point.is_infinite())
            .map(|r| r.multiplicity)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Sorts finite roots by `(re, im)`, infinity last.
    pub(crate) fn sort(&mut self) {
        self.roots.sort_by(|a, b| match (a.point, b.point) {
            (Point::Finite(x), Point::Finite(y)) => x
                .re
                .total_cmp(&y.re)
                .then_with(|| x.im.total_cmp(&y.im)),
            (Point::Finite(_), Point::Infinity) => std::cmp::Ordering::Less,
            (Point::Infinity, Point::Finite(_)) => std::cmp::Ordering::Greater,
            (Point::Infinity, Point::Infinity) => std::cmp::Ordering::Equal,
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Residual tolerance relative to `sum |a_k| |r|^k`.
    pub tol: f64,
    /// Iterates closer than `cluster_rel * max(1, |z|)` are one root.
    pub cluster_rel: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: DEFAULT_TOL,
            cluster_rel: 1e-7,
            max_iter: 500,
        }
    }
}

/// Roots of `p` with default options and a given residual tolerance.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<RootSet> {
    let opts = RootOptions {
        tol,
        ..RootOptions::default()
    };
    let set = poly_roots_with(p, &opts)?;
    if !set.converged {
        let residual = max_residual(p, &set);
        return Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual,
        });
    }
    Ok(set)
}

fn max_residual(p: &Polynomial, set: &RootSet) -> f64 {
    set.finite()
        .map(|(z, _)| p.eval(z).norm() / p.abs_scale(z).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Like [`poly_roots`] but reports non-convergence through
/// [`RootSet::converged`] instead of an error.
pub fn poly_roots_with(p: &Polynomial, opts: &RootOptions) -> Result<RootSet> {
    if p.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    if !p.is_finite() {
        return Err(Error::InvalidArgument("non-finite coefficient".into()));
    }
    let coeffs = p.coeffs();
    // exact zero roots are peeled off first
    let zeros = coeffs.iter().take_while(|c| **c == Complex64::new(0.0, 0.0)).count();
    let reduced = Polynomial::new(coeffs[zeros..].to_vec());

    let (iterates, converged) = match reduced.degree() {
        0 => (Vec::new(), true),
        1 => (vec![-reduced.coeffs()[0] / reduced.coeffs()[1]], true),
        2 => (quadratic(reduced.coeffs()).to_vec(), true),
        _ => aberth(&reduced, opts.max_iter),
    };

    let mut set = cluster(&iterates, opts.cluster_rel);
    for root in set.roots.iter_mut().filter(|r| r.multiplicity > 1) {
        if let Point::Finite(z) = root.point {
            root.point = Point::Finite(polish_multiple(&reduced, z, root.multiplicity));
        }
    }
    if zeros > 0 {
        set.roots.push(Root {
            point: Point::Finite(Complex64::new(0.0, 0.0)),
            multiplicity: zeros as u32,
        });
    }
    set.converged = converged && max_residual(p, &set) <= opts.tol.max(64.0 * f64::EPSILON);
    set.sort();
    Ok(set)
}

/// Newton on `p^(m-1)`, which has a simple root at an `m`-fold root of `p`.
fn polish_multiple(p: &Polynomial, z: Complex64, m: u32) -> Complex64 {
    let mut q = p.clone();
    for _ in 1..m {
        q = q.derivative();
    }
    let mut best = z;
    let mut best_val = q.eval(z).norm();
    let mut cur = z;
    for _ in 0..20 {
        let (v, dv) = q.eval_with_derivative(cur);
        let next = cur - v / dv;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        let val = q.eval(next).norm();
        if val >= best_val {
            break;
        }
        best = next;
        best_val = val;
        cur = next;
    }
    best
}

/// Cancellation-free quadratic formula.
fn quadratic(c: &[Complex64]) -> [Complex64; 2] {
    let (a0, a1, a2) = (c[0], c[1], c[2]);
    let disc = (a1 * a1 - a2 * a0 * 4.0).sqrt();
    let q = if (a1.conj() * disc).re >= 0.0 {
        -(a1 + disc) * 0.5
    } else {
        -(a1 - disc) * 0.5
    };
    if q == Complex64::new(0.0, 0.0) {
        // a1 = a0 = 0 is excluded by zero peeling, so this is a1 = disc = 0
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a2, a0 / q]
}

/// Fujiwara's bound on root moduli.
fn fujiwara_bound(p: &Polynomial) -> f64 {
    let c = p.coeffs();
    let n = p.degree();
    let lead = c[n].norm();
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let mut a = c[n - k].norm() / lead;
        if k == n {
            a /= 2.0;
        }
        bound = bound.max(a.powf(1.0 / k as f64));
    }
    2.0 * bound
}

fn aberth(p: &Polynomial, max_iter: usize) -> (Vec<Complex64>, bool) {
    let n = p.degree();
    let radius = fujiwara_bound(p).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            let r = radius * (1.0 + 0.05 * k as f64 / n as f64);
            Complex64::from_polar(r, angle)
        })
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;

    for _ in 0..max_iter {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[k]);
            if v.norm() <= 4.0 * eps * p.abs_scale(z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                // derivative vanished; nudge off the stationary point
                z[k] += Complex64::new(radius * 1e-8, radius * 1e-8);
                continue;
            }
            z[k] -= step;
            if step.norm() <= 2.0 * eps * z[k].norm() {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return (z, true);
        }
    }
    (z, false)
}

/// Single-linkage clustering of converged iterates.
fn cluster(points: &[Complex64], rel: f64) -> RootSet {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1f64.max(points[i].norm()).max(points[j].norm());
            if (points[i] - points[j]).norm() <= rel * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, u32)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += points[i];
                g.2 += 1;
            }
            None => groups.push((r, points[i], 1)),
        }
    }
    RootSet {
        roots: groups
            .into_iter()
            .map(|(_, sum, m)| Root {
                point: Point::Finite(sum / m as f64),
                multiplicity: m,
            })
            .collect(),
        converged: true,
    }
}
