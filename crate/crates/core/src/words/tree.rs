//! Levelwise enumeration of the backward skew-product orbit of a point.
//!
//! Level `n` holds every pair `(ω, x)` with `|ω| = n` and `f_ω(x) = z0`,
//! together with `|f_ω'(x)|` in the chosen metric. A node at level `n + 1`
//! with symbol `j` and parent `(ω, x)` stands for `(jω, y)` where
//! `f_j(y) = x`.

use std::io::Write;

use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MultiMap, Word};
use crate::par;
use crate::rational::{Metric, Point, DEFAULT_TOL};
use crate::{Error, Result};

/// Parents handled per parallel work item.
const EXPAND_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PruningPolicy {
    /// Keep every node; fail when the estimated node count exceeds `budget`.
    Exhaustive { budget: u64 },
    /// Keep at most `width` nodes per level, chosen uniformly, reweighting
    /// survivors by `(total branches) / (kept branches)`.
    Beam { width: usize, seed: u64 },
}

impl Default for PruningPolicy {
    fn default() -> Self {
        PruningPolicy::Exhaustive { budget: 1 << 24 }
    }
}

impl PruningPolicy {
    pub fn is_sampling(&self) -> bool {
        matches!(self, PruningPolicy::Beam { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreimageNode {
    pub point: Complex64,
    /// `|f_ω'(point)|` in the tree's metric; zero on a critical chain.
    pub cum_norm: f64,
    /// Importance weight, exactly 1 without sampling.
    pub weight: f64,
    /// Product of local multiplicities along the branch.
    pub multiplicity: u32,
    /// Index of the parent in the previous level.
    pub parent: u32,
    /// First symbol of the node's word (1-based); 0 for the root.
    pub symbol: u8,
}

impl PreimageNode {
    /// Factor multiplying this node's term in transfer sums.
    pub fn total_weight(&self) -> f64 {
        self.weight * self.multiplicity as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TreeDiagnostics {
    /// Preimages at infinity, which are not kept.
    pub dropped_infinite: u64,
    /// Nodes whose derivative vanishes (backward orbit through a critical point).
    pub critical_nodes: u64,
    /// Steps where the target was a critical value (a multiple root).
    pub critical_value_hits: u64,
    /// Levels where beam sampling discarded nodes.
    pub sampled_levels: Vec<usize>,
}

impl TreeDiagnostics {
    fn absorb(&mut self, other: &TreeDiagnostics) {
        self.dropped_infinite += other.dropped_infinite;
        self.critical_nodes += other.critical_nodes;
        self.critical_value_hits += other.critical_value_hits;
    }
}

#[derive(Debug, Clone)]
pub struct PreimageTree {
    root: Complex64,
    levels: Vec<Vec<PreimageNode>>,
    metric: Metric,
    policy: PruningPolicy,
    diagnostics: TreeDiagnostics,
}

/// Per-level summary needed by transfer sums: `log |f_ω'|` and weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevelSums {
    pub log_norms: Vec<f64>,
    pub weights: Vec<f64>,
    /// Total weight of nodes with vanishing derivative.
    pub critical_weight: f64,
}

/// Levelwise summaries of a preimage tree, without the node geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelProfile {
    pub levels: Vec<LevelSums>,
    pub metric: Metric,
    pub sampled: bool,
    pub diagnostics: TreeDiagnostics,
}

fn estimated_nodes(branching: usize, depth: usize) -> u64 {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..=depth {
        total = total.saturating_add(level);
        level = level.saturating_mul(branching as u64);
    }
    total
}

fn check_budget(f: &MultiMap, depth: usize, policy: &PruningPolicy) -> Result<()> {
    if let PruningPolicy::Exhaustive { budget } = *policy {
        let needed = estimated_nodes(f.total_degree(), depth);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
    }
    if let PruningPolicy::Beam { width, .. } = *policy {
        if width == 0 {
            return Err(Error::InvalidArgument("beam width must be positive".into()));
        }
    }
    Ok(())
}

fn root_node(z0: Complex64) -> PreimageNode {
    PreimageNode {
        point: z0,
        cum_norm: 1.0,
        weight: 1.0,
        multiplicity: 1,
        parent: 0,
        symbol: 0,
    }
}

/// All children of `parents`, in parent order then symbol order.
fn expand(
    f: &MultiMap,
    parents: &[PreimageNode],
    metric: Metric,
) -> Result<(Vec<PreimageNode>, TreeDiagnostics)> {
    let chunks: Vec<(usize, &[PreimageNode])> = parents
        .chunks(EXPAND_CHUNK)
        .enumerate()
        .map(|(i, c)| (i * EXPAND_CHUNK, c))
        .collect();
    let results = par::map(&chunks, |&(offset, chunk)| {
        let mut out = Vec::with_capacity(chunk.len() * f.total_degree());
        let mut diag = TreeDiagnostics::default();
        for (k, node) in chunk.iter().enumerate() {
            for (j, g) in f.generators().iter().enumerate() {
                let roots = g.preimages(Point::Finite(node.point), DEFAULT_TOL)?;
                diag.dropped_infinite += roots.infinite_multiplicity() as u64;
                for (y, m) in roots.finite() {
                    if m > 1 {
                        diag.critical_value_hits += 1;
                    }
                    let step = g.derivative_norm(y, metric)?;
                    let cum_norm = node.cum_norm * step;
                    if cum_norm == 0.0 {
                        diag.critical_nodes += 1;
                    }
                    out.push(PreimageNode {
                        point: y,
                        cum_norm,
                        weight: node.weight,
                        multiplicity: node.multiplicity * m,
                        parent: (offset + k) as u32,
                        symbol: (j + 1) as u8,
                    });
                }
            }
        }
        Ok::<_, Error>((out, diag))
    });
    let mut all = Vec::new();
    let mut diag = TreeDiagnostics::default();
    for r in results {
        let (nodes, d) = r?;
        all.extend(nodes);
        diag.absorb(&d);
    }
    Ok((all, diag))
}

/// Sorted indices kept by the beam at `level`, or `None` when all are kept.
fn beam_indices(policy: &PruningPolicy, total: usize, level: usize) -> Option<Vec<usize>> {
    match *policy {
        PruningPolicy::Beam { width, seed } if total > width => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(level as u64);
            let mut kept = index::sample(&mut rng, total, width).into_vec();
            kept.sort_unstable();
            Some(kept)
        }
        _ => None,
    }
}

fn apply_beam(
    policy: &PruningPolicy,
    nodes: Vec<PreimageNode>,
    level: usize,
    diag: &mut TreeDiagnostics,
) -> Vec<PreimageNode> {
    match beam_indices(policy, nodes.len(), level) {
        None => nodes,
        Some(kept) => {
            diag.sampled_levels.push(level);
            let factor = nodes.len() as f64 / kept.len() as f64;
            kept.into_iter()
                .map(|i| {
                    let mut n = nodes[i];
                    n.weight *= factor;
                    n
                })
                .collect()
        }
    }
}

fn sums_of(nodes: &[PreimageNode]) -> LevelSums {
    let mut s = LevelSums {
        log_norms: Vec::with_capacity(nodes.len()),
        weights: Vec::with_capacity(nodes.len()),
        critical_weight: 0.0,
    };
    for n in nodes {
        if n.cum_norm > 0.0 {
            s.log_norms.push(n.cum_norm.ln());
            s.weights.push(n.total_weight());
        } else {
            s.critical_weight += n.total_weight();
        }
    }
    s
}

impl PreimageTree {
    pub fn build(
        f: &MultiMap,
        z0: Complex64,
        depth: usize,
        policy: PruningPolicy,
        metric: Metric,
    ) -> Result<Self> {
        check_budget(f, depth, &policy)?;
        let mut levels = vec![vec![root_node(z0)]];
        let mut diagnostics = TreeDiagnostics::default();
        for level in 1..=depth {
            let (children, d) = expand(f, levels.last().unwrap(), metric)?;
            diagnostics.absorb(&d);
            levels.push(apply_beam(&policy, children, level, &mut diagnostics));
        }
        Ok(PreimageTree { root: z0, levels, metric, policy, diagnostics })
    }

    pub fn root(&self) -> Complex64 {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn policy(&self) -> PruningPolicy {
        self.policy
    }

    pub fn diagnostics(&self) -> &TreeDiagnostics {
        &self.diagnostics
    }

    pub fn level(&self, n: usize) -> &[PreimageNode] {
        &self.levels[n]
    }

    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// `Σ weight · multiplicity` over level `n`.
    pub fn weighted_count(&self, n: usize) -> f64 {
        self.levels[n].iter().map(PreimageNode::total_weight).sum()
    }

    /// Word labelling node `idx` of level `n`.
    pub fn word(&self, n: usize, idx: usize) -> Word {
        let mut symbols = Vec::with_capacity(n);
        let mut i = idx;
        for level in (1..=n).rev() {
            let node = &self.levels[level][i];
            symbols.push(node.symbol as usize);
            i = node.parent as usize;
        }
        Word::from_symbols(&symbols).expect("tree symbols are valid")
    }

    /// Words of every node of level `n`, in node order.
    pub fn words(&self, n: usize) -> Vec<Word> {
        (0..self.levels[n].len()).map(|i| self.word(n, i)).collect()
    }

    pub fn profile(&self) -> LevelProfile {
        LevelProfile {
            levels: self.levels.iter().map(|l| sums_of(l)).collect(),
            metric: self.metric,
            sampled: self.policy.is_sampling(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// CSV with columns `word, re, im, deriv_norm, weight`; `weight` is
    /// importance weight times multiplicity.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "level,word,re,im,deriv_norm,weight")?;
        for n in 0..self.levels.len() {
            for (i, node) in self.levels[n].iter().enumerate() {
                writeln!(
                    out,
                    "{n},{},{},{},{},{}",
                    self.word(n, i),
                    node.point.re,
                    node.point.im,
                    node.cum_norm,
                    node.total_weight()
                )?;
            }
        }
        Ok(())
    }
}

/// Nodes of level `depth` only, without retaining earlier levels.
pub fn build_frontier(
    f: &MultiMap,
    z0: Complex64,
    depth: usize,
    policy: PruningPolicy,
    metric: Metric,
) -> Result<(Vec<PreimageNode>, TreeDiagnostics)> {
    check_budget(f, depth, &policy)?;
    let mut frontier = vec![root_node(z0)];
    let mut diagnostics = TreeDiagnostics::default();
    for level in 1..=depth {
        let (children, d) = expand(f, &frontier, metric)?;
        diagnostics.absorb(&d);
        frontier = apply_beam(&policy, children, level, &mut diagnostics);
    }
    Ok((frontier, diagnostics))
}

impl LevelProfile {
    /// Streams levels `0..=depth` keeping only the current frontier.
    ///
    /// Produces the same sums as `PreimageTree::build(..).profile()`.
    pub fn build(
        f: &MultiMap,
        z0: Complex64,
        depth: usize,
        policy: PruningPolicy,
        metric: Metric,
    ) -> Result<Self> {
        check_budget(f, depth, &policy)?;
        let mut frontier = vec![root_node(z0)];
        let mut levels = vec![sums_of(&frontier)];
        let mut diagnostics = TreeDiagnostics::default();
        for level in 1..=depth {
            let (children, d) = expand(f, &frontier, metric)?;
            diagnostics.absorb(&d);
            frontier = apply_beam(&policy, children, level, &mut diagnostics);
            levels.push(sums_of(&frontier));
        }
        Ok(LevelProfile { levels, metric, sampled: policy.is_sampling(), diagnostics })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn has_critical(&self, n: usize) -> bool {
        self.levels[n].critical_weight > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalMap;
    use crate::words::tests::pm2;

    fn linear3() -> MultiMap {
        MultiMap::new(vec![
            RationalMap::from_real_poly(&[0.0, 3.0]).unwrap(),
            RationalMap::from_real_poly(&[-2.0, 3.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn depth_zero_is_the_root() {
        let t = PreimageTree::build(&pm2(), Complex64::new(3.0, 0.0), 0, PruningPolicy::default(), Metric::Euclidean).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.word(0, 0), Word::empty());
        assert_eq!(t.weighted_count(0), 1.0);
    }

    #[test]
    fn linear_pair_depth_two() {
        let t = PreimageTree::build(&linear3(), Complex64::new(0.5, 0.0), 2, PruningPolicy::default(), Metric::Euclidean).unwrap();
        let mut pts: Vec<f64> = t.level(2).iter().map(|n| n.point.re).collect();
        pts.sort_by(f64::total_cmp);
        let expected = [0.5 / 9.0, (0.5 + 2.0) / 9.0, (0.5 / 3.0 + 2.0) / 3.0, (2.5 / 3.0 + 2.0) / 3.0];
        for (a, b) in pts.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(t.level(2).iter().all(|n| n.cum_norm == 9.0));
    }

    #[test]
    fn pm2_depth_one_from_three() {
        let t = PreimageTree::build(&pm2(), Complex64::new(3.0, 0.0), 1, PruningPolicy::default(), Metric::Euclidean).unwrap();
        assert_eq!(t.level(1).len(), 4);
        let mut re: Vec<f64> = t.level(1).iter().map(|n| n.point.re).collect();
        re.sort_by(f64::total_cmp);
        let s5 = 5f64.sqrt();
        for (a, b) in re.iter().zip([-s5, -1.0, 1.0, s5]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(t.word(1, 0).to_string(), "1");
        assert_eq!(t.word(1, 3).to_string(), "2");
    }

    #[test]
    fn budget_is_enforced() {
        let r = PreimageTree::build(&pm2(), Complex64::new(0.0, 2.0), 13, PruningPolicy::Exhaustive { budget: 1 << 24 }, Metric::Euclidean);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn critical_value_target_records_multiplicity() {
        // 2 is the critical value of z^2 + 2
        let t = PreimageTree::build(&pm2(), Complex64::new(2.0, 0.0), 1, PruningPolicy::default(), Metric::Euclidean).unwrap();
        assert_eq!(t.weighted_count(1), 4.0);
        assert_eq!(t.level(1).len(), 3);
        assert_eq!(t.diagnostics().critical_value_hits, 1);
        assert_eq!(t.diagnostics().critical_nodes, 1);
        assert_eq!(t.profile().levels[1].critical_weight, 2.0);
    }

    #[test]
    fn streamed_profile_matches_tree_profile() {
        let f = pm2();
        let z = Complex64::new(0.0, 2.0);
        for policy in [PruningPolicy::default(), PruningPolicy::Beam { width: 50, seed: 9 }] {
            let a = PreimageTree::build(&f, z, 6, policy, Metric::Euclidean).unwrap().profile();
            let b = LevelProfile::build(&f, z, 6, policy, Metric::Euclidean).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn beam_keeps_width_and_reweights() {
        let t = PreimageTree::build(&pm2(), Complex64::new(0.0, 2.0), 6, PruningPolicy::Beam { width: 100, seed: 1 }, Metric::Euclidean).unwrap();
        assert_eq!(t.level(6).len(), 100);
        // counting is preserved exactly because every survivor carries M/B
        assert!((t.weighted_count(6) - 4096.0).abs() < 1e-9);
        assert_eq!(t.diagnostics().sampled_levels, vec![4, 5, 6]);
    }

    #[test]
    fn csv_export_has_one_row_per_node() {
        let t = PreimageTree::build(&linear3(), Complex64::new(0.5, 0.0), 2, PruningPolicy::default(), Metric::Euclidean).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 7);
        assert!(text.lines().nth(1).unwrap().starts_with("0,,0.5,0,1,1"));
    }
}
