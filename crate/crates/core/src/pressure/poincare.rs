use serde::Serialize;

use super::PressureProfile;
use crate::{Error, Result};

/// Terms count as geometrically decaying when their tail ratio is below
/// `1 - DECAY_MARGIN`.
pub const DECAY_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareSeries {
    pub t: f64,
    /// `(n, Λ_t^n 1(z))` for `n = 1..=N`
    pub terms: Vec<(usize, f64)>,
    /// `(n, Σ_{k<=n} Λ_t^k 1(z))`
    pub partial_sums: Vec<(usize, f64)>,
    /// Geometric-mean term ratio over the second half of the terms.
    pub tail_ratio: f64,
    pub divergent: bool,
    pub infinite_sum: bool,
}

fn tail_ratio(profile: &PressureProfile, t: f64, n_max: usize) -> f64 {
    let start = (n_max / 2).max(1);
    if start == n_max {
        return (profile.log_transfer(t, n_max) - profile.log_transfer(t, n_max - 1)).exp();
    }
    ((profile.log_transfer(t, n_max) - profile.log_transfer(t, start)) / (n_max - start) as f64).exp()
}

/// Cumulative sums of `Λ_t^n 1(z)` for `n = 1..=n_max`.
pub fn poincare_partial_sums(profile: &PressureProfile, t: f64, n_max: usize) -> Result<PoincareSeries> {
    if n_max < 2 || n_max > profile.depth() {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= N <= {} for the Poincaré partial sums, got {n_max}",
            profile.depth()
        )));
    }
    let mut terms = Vec::with_capacity(n_max);
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    let mut infinite_sum = false;
    for n in 1..=n_max {
        let s = profile.transfer(t, n)?;
        infinite_sum |= s.infinite_sum;
        acc += s.value;
        terms.push((n, s.value));
        partial_sums.push((n, acc));
    }
    let tail_ratio = tail_ratio(profile, t, n_max);
    Ok(PoincareSeries {
        t,
        terms,
        partial_sums,
        divergent: tail_ratio >= 1.0 - DECAY_MARGIN,
        tail_ratio,
        infinite_sum,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalExponent {
    pub estimate: f64,
    pub grid_step: f64,
    /// `(t, tail ratio)` over the grid.
    pub tail_ratios: Vec<(f64, f64)>,
    pub n_used: usize,
}

/// Smallest grid value of `t` whose Poincaré terms decay geometrically.
pub fn critical_exponent_estimate(profile: &PressureProfile, t_grid: &[f64], n_max: usize) -> Result<CriticalExponent> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidArgument("t grid needs at least two points".into()));
    }
    let mut grid = t_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    if grid[0] > 1e-12 || *grid.last().unwrap() < 2.0 - 1e-12 {
        return Err(Error::InvalidArgument("t grid must span [0, 2]".into()));
    }
    if n_max < 2 || n_max > profile.depth() {
        return Err(Error::InvalidArgument(format!("need 2 <= N <= {}", profile.depth())));
    }
    let tail_ratios: Vec<(f64, f64)> = grid.iter().map(|&t| (t, tail_ratio(profile, t, n_max))).collect();
    let grid_step = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    tail_ratios
        .iter()
        .find(|(_, r)| *r < 1.0 - DECAY_MARGIN)
        .map(|&(t, _)| CriticalExponent { estimate: t, grid_step, tail_ratios: tail_ratios.clone(), n_used: n_max })
        .ok_or(Error::Inconclusive)
}
