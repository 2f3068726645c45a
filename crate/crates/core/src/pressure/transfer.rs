use num_complex::Complex64;
use serde::Serialize;

use crate::par;
use crate::rational::Metric;
use crate::words::{LevelProfile, LevelSums, MultiMap, PreimageTree, PruningPolicy};
use crate::{Error, Result};

/// `Λ_t^n 1(z)` together with its logarithm and flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferSum {
    pub value: f64,
    pub log_value: f64,
    /// Some node had a vanishing derivative and was left out (`t > 0`).
    pub infinite_sum: bool,
    /// Importance-weighted estimate rather than the exact sum.
    pub sampled: bool,
}

/// `log Σ w_i |f'_i|^{-t}` by blockwise log-sum-exp.
fn log_level_sum(level: &LevelSums, t: f64) -> (f64, bool) {
    let exponent = |i: usize| level.weights[i].ln() - t * level.log_norms[i];
    let idx: Vec<usize> = (0..level.weights.len()).collect();
    let mut top = par::max_by(&idx, |&i| exponent(i));
    let critical_included = t == 0.0 && level.critical_weight > 0.0;
    if critical_included {
        top = top.max(level.critical_weight.ln());
    }
    if top == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, level.critical_weight > 0.0);
    }
    let mut s = par::sum_by(&idx, |&i| (exponent(i) - top).exp());
    if critical_included {
        s += (level.critical_weight.ln() - top).exp();
    }
    let infinite = level.critical_weight > 0.0 && t > 0.0;
    (top + s.ln(), infinite)
}

/// `Λ_t^n 1` at the tree's root from the tree's level `n`.
pub fn transfer_sum(tree: &PreimageTree, t: f64, n: usize) -> Result<TransferSum> {
    if n > tree.depth() {
        return Err(Error::InvalidArgument(format!(
            "tree depth {} is below n = {n}",
            tree.depth()
        )));
    }
    let profile = tree.profile();
    let (log_value, infinite_sum) = log_level_sum(&profile.levels[n], t);
    Ok(TransferSum { value: log_value.exp(), log_value, infinite_sum, sampled: profile.sampled })
}

/// Finite-n pressure values at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub t: f64,
    /// `(n, (1/n) log Λ_t^n 1(z))`
    pub values_by_n: Vec<(usize, f64)>,
    /// `(n, log(Λ_t^{n+1} 1 / Λ_t^n 1))`
    pub ratio_estimates: Vec<(usize, f64)>,
    /// Ratio estimate at the largest `n`.
    pub headline: f64,
    /// Spread between the two estimators at the largest `n`.
    pub estimator_spread: f64,
    pub base_point: [f64; 2],
    pub metric: Metric,
    pub pruning_used: bool,
    pub infinite_sum: bool,
}

/// Level sums to a fixed depth, reusable for many values of `t`.
#[derive(Debug, Clone)]
pub struct PressureProfile {
    profile: LevelProfile,
    base_point: Complex64,
}

impl PressureProfile {
    pub fn build(
        f: &MultiMap,
        z: Complex64,
        depth: usize,
        policy: PruningPolicy,
        metric: Metric,
    ) -> Result<Self> {
        Ok(PressureProfile { profile: LevelProfile::build(f, z, depth, policy, metric)?, base_point: z })
    }

    pub fn from_tree(tree: &PreimageTree) -> Self {
        PressureProfile { profile: tree.profile(), base_point: tree.root() }
    }

    pub fn depth(&self) -> usize {
        self.profile.depth()
    }

    pub fn base_point(&self) -> Complex64 {
        self.base_point
    }

    pub fn level_profile(&self) -> &LevelProfile {
        &self.profile
    }

    pub fn transfer(&self, t: f64, n: usize) -> Result<TransferSum> {
        if n > self.depth() {
            return Err(Error::InvalidArgument(format!("profile depth {} is below n = {n}", self.depth())));
        }
        let (log_value, infinite_sum) = log_level_sum(&self.profile.levels[n], t);
        Ok(TransferSum { value: log_value.exp(), log_value, infinite_sum, sampled: self.profile.sampled })
    }

    pub fn log_transfer(&self, t: f64, n: usize) -> f64 {
        log_level_sum(&self.profile.levels[n], t).0
    }

    /// `(1/n) log Λ_t^n 1`
    pub fn cesaro(&self, t: f64, n: usize) -> f64 {
        self.log_transfer(t, n) / n as f64
    }

    /// `log(Λ_t^{n+1} 1 / Λ_t^n 1)`
    pub fn ratio(&self, t: f64, n: usize) -> f64 {
        self.log_transfer(t, n + 1) - self.log_transfer(t, n)
    }

    /// Both estimator families for each `n` in `ns`; needs depth `max(ns) + 1`.
    pub fn estimate(&self, t: f64, ns: &[usize]) -> Result<PressureEstimate> {
        let max_n = *ns
            .iter()
            .max()
            .ok_or_else(|| Error::InvalidArgument("empty n range".into()))?;
        if ns.contains(&0) {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if max_n + 1 > self.depth() {
            return Err(Error::InvalidArgument(format!(
                "ratio estimate at n = {max_n} needs depth {}, have {}",
                max_n + 1,
                self.depth()
            )));
        }
        let mut ns = ns.to_vec();
        ns.sort_unstable();
        ns.dedup();
        let values_by_n: Vec<(usize, f64)> = ns.iter().map(|&n| (n, self.cesaro(t, n))).collect();
        let ratio_estimates: Vec<(usize, f64)> = ns.iter().map(|&n| (n, self.ratio(t, n))).collect();
        let headline = ratio_estimates.last().unwrap().1;
        let infinite_sum = t > 0.0 && (1..=max_n + 1).any(|n| self.profile.has_critical(n));
        Ok(PressureEstimate {
            t,
            estimator_spread: (headline - values_by_n.last().unwrap().1).abs(),
            values_by_n,
            ratio_estimates,
            headline,
            base_point: [self.base_point.re, self.base_point.im],
            metric: self.profile.metric,
            pruning_used: self.profile.sampled,
            infinite_sum,
        })
    }
}

/// Builds the needed tree levels and evaluates both pressure estimators.
pub fn pressure_estimate(
    f: &MultiMap,
    z: Complex64,
    t: f64,
    ns: &[usize],
    policy: PruningPolicy,
    metric: Metric,
) -> Result<PressureEstimate> {
    let max_n = ns.iter().copied().max().unwrap_or(0);
    PressureProfile::build(f, z, max_n + 1, policy, metric)?.estimate(t, ns)
}
