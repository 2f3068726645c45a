use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::AtomicMeasure;
use crate::par;
use crate::pressure::PressureProfile;
use crate::rational::{chordal_distance, Point, DEFAULT_TOL};
use crate::words::{MultiMap, PruningPolicy, Word};
use crate::{Error, Result};

/// Chordal distance under which a pulled-back atom matches an existing one.
const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Total variation of `e^{-s} Λ_t^* ν - (ν - level-one part)`.
    pub residual: f64,
    /// Mass the pullback puts on pairs deeper than the truncation.
    pub unmatched_lhs: f64,
    /// Mass of atoms the pullback never reaches.
    pub unmatched_rhs: f64,
    /// Mass mismatch on atoms reached from both sides.
    pub matched_mismatch: f64,
    pub truncation: usize,
}

/// Compares `e^{-s} Λ_t^* ν` with `ν` minus its level-one atoms.
///
/// The pullback is evaluated with fresh preimage solves. For an untruncated
/// measure the two sides agree; for truncation `N` the discrepancy is the
/// mass the pullback places at level `N + 1`.
pub fn conformality_residual(nu: &AtomicMeasure, f: &MultiMap, t: f64, s: f64) -> Result<ResidualReport> {
    if nu.params.sampled {
        return Err(Error::InvalidArgument(
            "conformality residual needs an exhaustively built measure".into(),
        ));
    }
    let metric = nu.params.metric;
    let mut by_word: HashMap<&Word, Vec<usize>> = HashMap::new();
    for (i, a) in nu.atoms.iter().enumerate() {
        if a.depth() >= 2 {
            by_word.entry(&a.word).or_default().push(i);
        }
    }
    let discount = (-s).exp();

    // (matched atom, |lhs - rhs|) or (None, lhs) per pulled-back child
    let per_atom = par::map(&nu.atoms, |a| -> Result<Vec<(Option<usize>, f64)>> {
        let mut out = Vec::new();
        for (j, g) in f.generators().iter().enumerate() {
            let roots = g.preimages(Point::Finite(a.point), DEFAULT_TOL)?;
            for (y, k) in roots.finite() {
                let step = g.derivative_norm(y, metric)?;
                if step == 0.0 && t > 0.0 {
                    continue;
                }
                let factor = if t == 0.0 { 1.0 } else { step.powf(-t) };
                let mass = a.mass * discount * k as f64 * factor;
                let word = a.word.prepend(j + 1);
                let hit = by_word.get(&word).and_then(|ids| {
                    ids.iter().copied().find(|&i| {
                        chordal_distance(Point::Finite(nu.atoms[i].point), Point::Finite(y)) <= MATCH_TOL
                    })
                });
                out.push(match hit {
                    Some(i) => (Some(i), (mass - nu.atoms[i].mass).abs()),
                    None => (None, mass),
                });
            }
        }
        Ok(out)
    });

    let mut reached = vec![false; nu.atoms.len()];
    let (mut unmatched_lhs, mut matched_mismatch) = (0.0, 0.0);
    for r in per_atom {
        for (hit, d) in r? {
            match hit {
                Some(i) => {
                    reached[i] = true;
                    matched_mismatch += d;
                }
                None => unmatched_lhs += d,
            }
        }
    }
    let unmatched_rhs: f64 = nu
        .atoms
        .iter()
        .zip(&reached)
        .filter(|(a, r)| a.depth() >= 2 && !**r)
        .fold(0.0, |acc, (a, _)| acc + a.mass);
    Ok(ResidualReport {
        residual: unmatched_lhs + unmatched_rhs + matched_mismatch,
        unmatched_lhs,
        unmatched_rhs,
        matched_mismatch,
        truncation: nu.params.truncation,
    })
}

/// Normalized level-`(N + 1)` mass `e^{-s(N+1)} Λ_t^{N+1} 1(ξ) / S`, from an
/// independent transfer sum.
pub fn truncation_tail(f: &MultiMap, nu: &AtomicMeasure, policy: PruningPolicy) -> Result<f64> {
    let p = &nu.params;
    let n = p.truncation + 1;
    let xi = Complex64::new(p.base_point[0], p.base_point[1]);
    let profile = PressureProfile::build(f, xi, n, policy, p.metric)?;
    Ok((profile.log_transfer(p.t, n) - p.s * n as f64 - nu.normalizer.ln()).exp())
}
