//! Exact enumeration of the nested construction, the separation check, and
//! the natural mass distribution.

use num::bigint::BigUint;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cf::{cylinder_interval, CFWord, Interval};
use crate::error::{Error, Result};
use crate::rational::{from_f64_exact, to_f64, Rational};

use super::{
    count_m, gap_epsilon_exact, gap_epsilon_log, symbol_range, ConstructionParams, CountM,
    LevelMode, SymbolRange,
};

/// Everything recorded about one level of the construction.
#[derive(Clone, Debug)]
pub struct LevelMeta {
    pub level: usize,
    pub lo: BigUint,
    pub hi: BigUint,
    pub m: BigUint,
    pub eps_exact: Rational,
    pub ln_eps: f64,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub parent: usize,
    pub digits: Vec<BigUint>,
    /// Closed hull of the admissible child cylinders.
    pub interval: Interval,
}

/// A finite-depth realization of the nested sets with exact endpoints.
#[derive(Clone, Debug)]
pub struct LevelTree {
    pub(crate) params: ConstructionParams,
    pub(crate) depth: usize,
    /// levels[k-1] describes level k.
    pub(crate) levels: Vec<LevelMeta>,
    /// nodes[k] holds level k; nodes[0] is the root [0, 1].
    pub(crate) nodes: Vec<Vec<TreeNode>>,
}

impl LevelTree {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn level(&self, k: usize) -> &LevelMeta {
        &self.levels[k - 1]
    }

    pub fn levels(&self) -> &[LevelMeta] {
        &self.levels
    }

    pub fn nodes(&self, k: usize) -> &[TreeNode] {
        &self.nodes[k]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.iter().map(Vec::len).sum()
    }
}

/// Enumerates the construction to `depth` with exact rational endpoints.
///
/// Needs exact mode and the per-level branch product within `budget`; the
/// error names the level at which the budget broke.
pub fn build_levels(params: &ConstructionParams, depth: usize, budget: u64) -> Result<LevelTree> {
    if params.mode != LevelMode::Exact {
        return Err(Error::domain("build_levels requires exact mode"));
    }
    // digit ranges for levels 1..=depth+1 (level k's interval is the hull of
    // its level-(k+1) child cylinders)
    let mut ranges = Vec::with_capacity(depth + 1);
    for k in 1..=depth + 1 {
        match symbol_range(params, k)? {
            SymbolRange::Exact { lo, hi } => ranges.push((lo, hi)),
            SymbolRange::Log { .. } => unreachable!("exact mode yields exact ranges"),
        }
    }

    // budget check before any enumeration
    let mut leaves = BigUint::one();
    for (k, (lo, hi)) in ranges.iter().take(depth).enumerate() {
        leaves *= hi - lo + BigUint::one();
        if leaves > BigUint::from(budget) {
            return Err(Error::budget(format!(
                "level {} needs {leaves} nodes, budget is {budget}",
                k + 1
            )));
        }
    }

    let mut levels = Vec::with_capacity(depth);
    for k in 1..=depth {
        let (lo, hi) = ranges[k - 1].clone();
        let m = match count_m(params, k)? {
            CountM::Exact(m) => m,
            CountM::Log(_) => {
                return Err(Error::budget(format!(
                    "m_{k} is not exactly representable; use log-only mode"
                )))
            }
        };
        // the branch count must dominate the child-count bound
        let width = &hi - &lo + BigUint::one();
        if width < m {
            return Err(Error::domain(format!(
                "level {k} has {width} branches, below m_{k} = {m}"
            )));
        }
        levels.push(LevelMeta {
            level: k,
            lo,
            hi,
            m,
            eps_exact: gap_epsilon_exact(params, k)?,
            ln_eps: gap_epsilon_log(params, k)?.ln_value(),
        });
    }

    let root = TreeNode {
        parent: 0,
        digits: Vec::new(),
        interval: Interval::closed(Rational::zero(), Rational::one())?,
    };
    let mut nodes = vec![vec![root]];
    for k in 1..=depth {
        let (lo, hi) = &ranges[k - 1];
        let (child_lo, child_hi) = &ranges[k];
        let mut level_nodes = Vec::new();
        for (parent_idx, parent) in nodes[k - 1].iter().enumerate() {
            let mut digit = lo.clone();
            while digit <= *hi {
                let mut digits = parent.digits.clone();
                digits.push(digit.clone());
                let interval = level_interval(&digits, child_lo, child_hi)?;
                level_nodes.push(TreeNode {
                    parent: parent_idx,
                    digits,
                    interval,
                });
                digit += BigUint::one();
            }
        }
        nodes.push(level_nodes);
    }

    Ok(LevelTree {
        params: params.clone(),
        depth,
        levels,
        nodes,
    })
}

/// Closed hull of the cylinders `I(digits, j)` over `j` in the child range.
/// Consecutive child cylinders share endpoints, so the hull of the two
/// extremes is exactly their union's closure.
fn level_interval(digits: &[BigUint], child_lo: &BigUint, child_hi: &BigUint) -> Result<Interval> {
    let word_lo = CFWord::new({
        let mut d = digits.to_vec();
        d.push(child_lo.clone());
        d
    })?;
    let word_hi = CFWord::new({
        let mut d = digits.to_vec();
        d.push(child_hi.clone());
        d
    })?;
    let (iv_lo, _) = cylinder_interval(&word_lo);
    let (iv_hi, _) = cylinder_interval(&word_hi);
    let left = iv_lo.left.clone().min(iv_hi.left.clone());
    let right = iv_lo.right.clone().max(iv_hi.right.clone());
    Interval::closed(left, right)
}

/// True iff every pair of distinct level-`n` intervals is separated by a gap
/// of at least `eps_n`, by exact rational comparison. Level 0 is vacuous.
pub fn verify_separation(tree: &LevelTree, n: usize) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    if n > tree.depth {
        return Err(Error::domain(format!(
            "tree is built to depth {}, asked for level {n}",
            tree.depth
        )));
    }
    let eps = &tree.level(n).eps_exact;
    let mut intervals: Vec<&Interval> = tree.nodes(n).iter().map(|node| &node.interval).collect();
    intervals.sort_by(|a, b| a.left.cmp(&b.left));
    for pair in intervals.windows(2) {
        let gap = &pair[1].left - &pair[0].right;
        if gap < *eps {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The natural mass distribution on a tree pruned to exactly `m_n` children
/// per node (the smallest digit labels are kept).
pub struct MassAssignment<'a> {
    tree: &'a LevelTree,
    /// retained[k][i]: whether node i of level k survives the pruning.
    retained: Vec<Vec<bool>>,
    /// level_mass[k]: the mass (m_1 ... m_k)^-1 of a retained level-k node.
    level_mass: Vec<Rational>,
}

impl<'a> MassAssignment<'a> {
    pub fn new(tree: &'a LevelTree) -> Result<Self> {
        let mut retained: Vec<Vec<bool>> = vec![vec![true]];
        let mut level_mass = vec![Rational::one()];
        let mut mass_denominator = BigUint::one();
        for k in 1..=tree.depth {
            let meta = tree.level(k);
            mass_denominator *= &meta.m;
            level_mass.push(Rational::new(
                num::BigInt::one(),
                num::BigInt::from(mass_denominator.clone()),
            ));
            let cutoff = &meta.lo + &meta.m; // keep digits in [lo, lo + m)
            let level_retained = tree
                .nodes(k)
                .iter()
                .map(|node| {
                    retained[k - 1][node.parent]
                        && node.digits.last().expect("non-root") < &cutoff
                })
                .collect();
            retained.push(level_retained);
        }
        Ok(MassAssignment {
            tree,
            retained,
            level_mass,
        })
    }

    pub fn tree(&self) -> &LevelTree {
        self.tree
    }

    /// Sum of retained level-`k` masses; exactly 1 after pruning.
    pub fn level_mass_sum(&self, k: usize) -> Rational {
        let count = self.retained[k].iter().filter(|r| **r).count();
        Rational::from_integer(count.into()) * &self.level_mass[k]
    }

    /// Picks the level whose gap bound matches the width of `u`:
    /// the unique `n` with `eps_n <= |u| < eps_(n-1)` (clamped to the built
    /// depth for narrower intervals, with `eps_0` read as infinity).
    fn level_for_width(&self, width: &Rational) -> usize {
        for n in 1..=self.tree.depth {
            if self.tree.level(n).eps_exact <= *width {
                return n;
            }
        }
        self.tree.depth
    }

    /// Mass of an interval: the sum of retained node masses meeting it, at
    /// the level matched to its width.
    pub fn natural_mass(&self, u: &Interval) -> Result<Rational> {
        if u.left < Rational::zero() || u.right > Rational::one() {
            return Err(Error::domain("mass queries live inside [0, 1]"));
        }
        let width = u.length();
        let n = self.level_for_width(&width);
        let mut mass = Rational::zero();
        for (node, keep) in self.tree.nodes(n).iter().zip(&self.retained[n]) {
            if *keep && node.interval.meets(u) {
                mass += &self.level_mass[n];
            }
        }
        Ok(mass)
    }

    /// Samples random intervals with widths log-uniform between the deepest
    /// and the threshold-level gap bounds and returns the largest observed
    /// `mass(U) / |U|^s`. Bounded for `s` below the construction's
    /// dimension bound; the quantitative shadow of the mass distribution
    /// principle.
    pub fn holder_check(&self, s: f64, trials: usize, seed: u64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::domain("the exponent s must lie in [0, 1]"));
        }
        if trials == 0 {
            return Err(Error::domain("need at least one trial"));
        }
        let n_threshold = self.tree.params.n_threshold.min(self.tree.depth);
        let ln_wide = to_f64(&self.tree.level(n_threshold).eps_exact).ln();
        let ln_narrow = to_f64(&self.tree.level(self.tree.depth).eps_exact).ln();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_ratio: f64 = 0.0;
        for _ in 0..trials {
            let ln_w = rng.gen_range(ln_narrow..ln_wide);
            let w = ln_w.exp();
            let left = rng.gen_range(0.0..(1.0 - w));
            let left_q = from_f64_exact(left)?;
            let width_q = from_f64_exact(w)?;
            let u = Interval::closed(left_q.clone(), left_q + width_q)?;
            let mass = self.natural_mass(&u)?;
            if mass.is_zero() {
                continue;
            }
            let ratio = to_f64(&mass) / w.powf(s);
            max_ratio = max_ratio.max(ratio);
        }
        Ok(max_ratio)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::tests::surrogate_params;
    use crate::cantor::DEFAULT_NODE_BUDGET;
    use crate::rational::ratio;

    fn surrogate_tree(depth: usize) -> LevelTree {
        build_levels(&surrogate_params(), depth, DEFAULT_NODE_BUDGET).unwrap()
    }

    #[test]
    fn depth_zero_is_the_unit_interval() {
        let tree = surrogate_tree(0);
        assert_eq!(tree.node_count(), 1);
        let root = &tree.nodes(0)[0];
        assert_eq!(root.interval.left, Rational::zero());
        assert_eq!(root.interval.right, Rational::one());
    }

    #[test]
    fn node_counts_match_the_enumeration_oracle() {
        // branch widths 3, 5, 5, 9: levels have 3, 15, 75, 675 nodes
        let tree = surrogate_tree(4);
        let counts: Vec<usize> = (0..=4).map(|k| tree.nodes(k).len()).collect();
        assert_eq!(counts, vec![1, 3, 15, 75, 675]);
        assert_eq!(tree.node_count(), 769);
    }

    #[test]
    fn budget_error_names_the_level() {
        let err = build_levels(&surrogate_params(), 4, 100).unwrap_err();
        match err {
            Error::Budget(msg) => assert!(msg.contains("level 4"), "message was {msg}"),
            other => panic!("expected budget error, got {other}"),
        }
    }

    #[test]
    fn nesting_and_digit_bounds_hold() {
        let tree = surrogate_tree(4);
        for k in 1..=4 {
            let meta = tree.level(k);
            for node in tree.nodes(k) {
                let parent = &tree.nodes(k - 1)[node.parent];
                assert!(parent.interval.contains_interval(&node.interval));
                let digit = node.digits.last().unwrap();
                assert!(*digit >= meta.lo && *digit <= meta.hi);
            }
        }
    }

    #[test]
    fn intervals_match_the_cylinder_hull_oracle() {
        // recompute each node interval as the hull over all child cylinders
        let tree = surrogate_tree(3);
        for k in 1..=3 {
            let child_meta = super::super::symbol_range(&tree.params, k + 1).unwrap();
            let (clo, chi) = match child_meta {
                SymbolRange::Exact { lo, hi } => (lo, hi),
                _ => unreachable!(),
            };
            for node in tree.nodes(k) {
                let mut left: Option<Rational> = None;
                let mut right: Option<Rational> = None;
                let mut digit = clo.clone();
                while digit <= chi {
                    let mut digits = node.digits.clone();
                    digits.push(digit.clone());
                    let (iv, _) = cylinder_interval(&CFWord::new(digits).unwrap());
                    left = Some(left.map_or(iv.left.clone(), |l: Rational| l.min(iv.left.clone())));
                    right = Some(right.map_or(iv.right.clone(), |r: Rational| r.max(iv.right.clone())));
                    digit += BigUint::one();
                }
                assert_eq!(node.interval.left, left.unwrap());
                assert_eq!(node.interval.right, right.unwrap());
            }
        }
    }

    #[test]
    fn separation_holds_at_every_level() {
        let tree = surrogate_tree(4);
        for n in 0..=4 {
            assert!(verify_separation(&tree, n).unwrap(), "level {n}");
        }
        assert!(verify_separation(&tree, 5).is_err());
    }

    #[test]
    fn shrunken_gap_fails_separation() {
        let mut tree = surrogate_tree(3);
        // stretch one level-3 interval rightward into its neighbour's gap
        let nodes = &mut tree.nodes[3];
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&a, &b| nodes[a].interval.left.cmp(&nodes[b].interval.left));
        let (a, b) = (order[0], order[1]);
        let target = &nodes[b].interval.left - ratio(1, u64::MAX);
        nodes[a].interval.right = target;
        assert!(!verify_separation(&tree, 3).unwrap());
    }

    #[test]
    fn mass_sums_to_one_after_pruning() {
        let tree = surrogate_tree(4);
        let mass = MassAssignment::new(&tree).unwrap();
        for k in 0..=4 {
            assert_eq!(mass.level_mass_sum(k), Rational::one(), "level {k}");
        }
    }

    #[test]
    fn full_interval_has_mass_one() {
        let tree = surrogate_tree(3);
        let mass = MassAssignment::new(&tree).unwrap();
        let u = Interval::closed(Rational::zero(), Rational::one()).unwrap();
        assert_eq!(mass.natural_mass(&u).unwrap(), Rational::one());
    }

    #[test]
    fn single_node_interval_carries_at_least_its_own_mass() {
        let tree = surrogate_tree(3);
        let mass = MassAssignment::new(&tree).unwrap();
        // a retained node: first child chain always survives pruning
        let node = &tree.nodes(3)[0];
        let m = mass.natural_mass(&node.interval).unwrap();
        let m1m2m3 = ratio(1, 27); // m = 3, 3, 3
        assert!(m >= m1m2m3, "mass {m} below the node's own share");
    }

    #[test]
    fn mass_query_outside_unit_interval_is_rejected() {
        let tree = surrogate_tree(2);
        let mass = MassAssignment::new(&tree).unwrap();
        let u = Interval::closed(ratio(1, 2), ratio(3, 2)).unwrap();
        assert!(mass.natural_mass(&u).is_err());
    }

    #[test]
    fn holder_ratio_is_finite_and_seed_stable() {
        let tree = surrogate_tree(4);
        let mass = MassAssignment::new(&tree).unwrap();
        let s = 0.10;
        let r1 = mass.holder_check(s, 2000, 1).unwrap();
        let r2 = mass.holder_check(s, 2000, 2).unwrap();
        assert!(r1.is_finite() && r1 > 0.0);
        assert!((r1 - r2).abs() / r1 < 0.25, "r1 = {r1}, r2 = {r2}");
    }
}
