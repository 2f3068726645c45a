use num_complex::Complex64;
use serde::Serialize;

use crate::rational::CHART_SWITCH;
use crate::words::MultiMap;
use crate::{Error, Result};

/// Candidates closer than this to the postcritical sample are rejected.
pub const REJECT_DISTANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasePoint {
    pub point: Complex64,
    /// Distance to the sampled postcritical set; infinite when it is empty.
    pub score: f64,
}

/// Generic candidate base points used when none are configured.
pub fn default_candidates() -> Vec<Complex64> {
    vec![
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 2.0),
        Complex64::new(0.0, -2.0),
        Complex64::new(1.5, 1.5),
        Complex64::new(-1.5, 1.5),
        Complex64::new(0.5, 2.5),
        Complex64::new(0.0, 1.0),
    ]
}

/// Finite critical values and their images under all words of length `< depth`.
pub fn postcritical_sample(f: &MultiMap, depth: usize) -> Result<Vec<Complex64>> {
    let mut frontier = f.critical_values()?;
    let mut all = frontier.clone();
    for _ in 1..depth {
        let mut next = Vec::with_capacity(frontier.len() * f.len());
        for &z in &frontier {
            for g in f.generators() {
                if let Some(w) = g.eval_c(z).finite() {
                    if w.norm() <= CHART_SWITCH {
                        next.push(w);
                    }
                }
            }
        }
        all.extend_from_slice(&next);
        frontier = next;
    }
    Ok(all)
}

/// Candidate farthest from the depth-bounded postcritical orbit sample.
pub fn base_point_select(f: &MultiMap, candidates: &[Complex64], depth: usize) -> Result<BasePoint> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidate base points".into()));
    }
    let sample = postcritical_sample(f, depth)?;
    let mut best: Option<BasePoint> = None;
    for &c in candidates {
        let score = sample.iter().map(|p| (p - c).norm()).fold(f64::INFINITY, f64::min);
        if best.map_or(true, |b| score > b.score) {
            best = Some(BasePoint { point: c, score });
        }
    }
    let best = best.unwrap();
    if best.score < REJECT_DISTANCE {
        return Err(Error::AllCandidatesRejected { tol: REJECT_DISTANCE });
    }
    Ok(best)
}
