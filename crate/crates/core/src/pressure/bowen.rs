use num_complex::Complex64;
use serde::Serialize;

use super::{PressureEstimate, PressureProfile};
use crate::rational::Metric;
use crate::words::{MultiMap, PruningPolicy};
use crate::{Error, Result};

/// Largest headline pressure at `t = 2` accepted as a bracket end.
pub const BRACKET_SLACK_AT_TWO: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BowenRootResult {
    pub h: f64,
    pub bracket: (f64, f64),
    pub n_used: usize,
    /// `|P_n(h)|` for the headline estimator.
    pub residual: f64,
    /// Snapshots at `t = 0`, `t = h` and `t = 2`.
    pub diagnostics: Vec<PressureEstimate>,
}

/// Bisection on `[0, 2]` for the zero of the headline pressure estimate at
/// `n`, using tree levels up to `n + 1`.
pub fn bowen_root(
    f: &MultiMap,
    z: Complex64,
    n: usize,
    tol_t: f64,
    policy: PruningPolicy,
    metric: Metric,
) -> Result<BowenRootResult> {
    let profile = PressureProfile::build(f, z, n + 1, policy, metric)?;
    bowen_root_from(&profile, n, tol_t)
}

/// Same as [`bowen_root`] on prebuilt level sums.
pub fn bowen_root_from(profile: &PressureProfile, n: usize, tol_t: f64) -> Result<BowenRootResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(tol_t > 0.0) {
        return Err(Error::InvalidArgument("tol_t must be positive".into()));
    }
    let ns: Vec<usize> = (1..=n).collect();
    let headline = |t: f64| profile.ratio(t, n);
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    let (p_lo, p_hi) = (headline(lo), headline(hi));
    if !(p_lo > 0.0) {
        return Err(Error::NoBracket(format!("headline P(0) = {p_lo} is not positive")));
    }
    if p_hi > BRACKET_SLACK_AT_TWO {
        return Err(Error::NoBracket(format!(
            "headline P(2) = {p_hi} exceeds {BRACKET_SLACK_AT_TWO}"
        )));
    }
    if p_hi > 0.0 {
        return Err(Error::NoBracket(format!("headline P(2) = {p_hi} is still positive")));
    }
    if p_hi == 0.0 {
        lo = hi;
    }
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        if headline(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    let diagnostics = vec![
        profile.estimate(0.0, &ns)?,
        profile.estimate(h, &ns)?,
        profile.estimate(2.0, &ns)?,
    ];
    Ok(BowenRootResult { h, bracket: (lo, hi), n_used: n, residual: headline(h).abs(), diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalMap;

    fn linear(shifts: &[f64]) -> MultiMap {
        MultiMap::new(
            shifts
                .iter()
                .map(|&b| RationalMap::from_real_poly(&[-b, 3.0]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cantor_root_is_log2_over_log3() {
        let r = bowen_root(&linear(&[0.0, 2.0]), Complex64::new(0.5, 0.0), 6, 1e-8, PruningPolicy::default(), Metric::Euclidean).unwrap();
        assert!((r.h - 2f64.ln() / 3f64.ln()).abs() < 1e-7);
        assert!(r.bracket.0 <= r.h && r.h <= r.bracket.1);
        assert_eq!(r.diagnostics.len(), 3);
    }

    #[test]
    fn three_map_family_has_dimension_one() {
        let r = bowen_root(&linear(&[0.0, 1.0, 2.0]), Complex64::new(0.5, 0.0), 5, 1e-8, PruningPolicy::default(), Metric::Euclidean).unwrap();
        assert!((r.h - 1.0).abs() < 1e-7);
    }

    #[test]
    fn no_sign_change_is_reported() {
        // ten maps of contraction 1/3: P(2) = log(10/9) > 0
        let shifts: Vec<f64> = (0..10).map(|k| 0.25 * k as f64).collect();
        let e = bowen_root(&linear(&shifts), Complex64::new(0.5, 0.3), 2, 1e-6, PruningPolicy::default(), Metric::Euclidean);
        assert!(matches!(e, Err(Error::NoBracket(_))));
        let many: Vec<f64> = (0..30).map(|k| 0.1 * k as f64).collect();
        let e = bowen_root(&linear(&many), Complex64::new(0.5, 0.3), 1, 1e-6, PruningPolicy::default(), Metric::Euclidean);
        assert!(matches!(e, Err(Error::NoBracket(m)) if m.contains("exceeds")));
    }
}
