//! Brute-force enumerators used as ground truth by the tests.
//!
//! Nothing here consults the counting formulas: trees are listed by
//! exhaustive construction and compared against the formulas afterwards.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::tree::{BinaryTree, GrowingTree, GrowthChoice, TreeStats};

pub const MAX_ORACLE_LEAVES: usize = 12;
pub const MAX_ORACLE_STEPS: u32 = 5;

/// Chi-square tests reject at this false-alarm rate.
pub const FALSE_ALARM: f64 = 1e-6;

/// Every binary tree with `n_leaves` leaves, in a fixed order: by size of
/// the left subtree, then recursively.
pub fn all_binary_trees(n_leaves: usize) -> Result<Vec<BinaryTree>> {
    if n_leaves == 0 || n_leaves > MAX_ORACLE_LEAVES {
        return Err(Error::BoundExceeded {
            what: "n_leaves",
            value: n_leaves,
            max: MAX_ORACLE_LEAVES,
        });
    }
    let mut by_size: Vec<Vec<BinaryTree>> = vec![Vec::new(), vec![BinaryTree::leaf()]];
    for n in 2..=n_leaves {
        let mut trees = Vec::new();
        for left_size in 1..n {
            for l in &by_size[left_size] {
                for r in &by_size[n - left_size] {
                    trees.push(BinaryTree::join(l, r));
                }
            }
        }
        by_size.push(trees);
    }
    Ok(by_size.swap_remove(n_leaves))
}

pub fn trees_with_profile(p: &Profile) -> Result<Vec<BinaryTree>> {
    let leaves = p.leaf_count() as usize;
    let mut trees = all_binary_trees(leaves)?;
    trees.retain(|t| &t.profile() == p);
    Ok(trees)
}

/// Visits every maximal growth history of at most `h_steps` steps: trees
/// still active after exactly `h_steps` steps, and trees that died out
/// earlier.
pub fn for_each_growth_history(
    h_steps: u32,
    mut visit: impl FnMut(&GrowingTree, &TreeStats),
) -> Result<()> {
    if h_steps > MAX_ORACLE_STEPS {
        return Err(Error::BoundExceeded {
            what: "h_steps",
            value: h_steps as usize,
            max: MAX_ORACLE_STEPS as usize,
        });
    }
    let mut stack = vec![GrowingTree::new_seed()];
    while let Some(tree) = stack.pop() {
        if !tree.is_active() || tree.step() == h_steps {
            visit(&tree, &tree.stats());
            continue;
        }
        let anchors = tree.anchor_count();
        // reversed so the stack pops choice vectors in increasing order
        for mask in (0u64..1 << anchors).rev() {
            let choices: Vec<GrowthChoice> = (0..anchors)
                .map(|i| {
                    if mask >> (anchors - 1 - i) & 1 == 1 {
                        GrowthChoice::Branch
                    } else {
                        GrowthChoice::Die
                    }
                })
                .collect();
            stack.push(tree.grow_step(&choices)?);
        }
    }
    Ok(())
}

pub fn all_growth_histories(h_steps: u32) -> Result<Vec<(GrowingTree, TreeStats)>> {
    let mut out = Vec::new();
    for_each_growth_history(h_steps, |t, s| out.push((t.clone(), *s)))?;
    Ok(out)
}

/// Active trees after exactly `h_steps` steps, bucketed by
/// `(internal nodes, anchors, height)`.
pub fn active_buckets(h_steps: u32) -> Result<BTreeMap<(usize, usize, usize), u64>> {
    let mut buckets = BTreeMap::new();
    for_each_growth_history(h_steps, |t, s| {
        if t.is_active() {
            *buckets.entry((s.n, s.m, s.h)).or_insert(0) += 1;
        }
    })?;
    Ok(buckets)
}

/// Binary trees with `n` internal nodes that are not the frozen form of any
/// active growing tree. Each tree is thawed, its history replayed from the
/// seed, and the replay compared with the thawed tree.
pub fn unreachable_count(n: usize) -> Result<u64> {
    let trees = all_binary_trees(n + 1)?;
    let mut missing = 0;
    for t in &trees {
        let thawed = t.thaw();
        let reached = GrowingTree::replay(&thawed.history())
            .map(|r| r == thawed && r.is_active() && r.freeze() == *t)
            .unwrap_or(false);
        if !reached {
            missing += 1;
        }
    }
    Ok(missing)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub threshold: f64,
    pub dof: usize,
    pub pass: bool,
}

/// Pearson's statistic against the uniform law on `observed.len()` outcomes.
pub fn chi_square(observed: &[u64]) -> Result<ChiSquareResult> {
    let outcomes = observed.len();
    let total: u64 = observed.iter().sum();
    let needed = 100 * outcomes.max(2) as u64;
    if outcomes < 2 || total < needed {
        return Err(Error::InsufficientDraws {
            total,
            outcomes,
            needed,
        });
    }
    let expected = total as f64 / outcomes as f64;
    let statistic = observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = outcomes - 1;
    let threshold = chi_square_upper_quantile(dof, FALSE_ALARM);
    Ok(ChiSquareResult {
        statistic,
        threshold,
        dof,
        pass: statistic < threshold,
    })
}

/// The `x` with `P(X > x) = alpha` for a chi-square law with `dof` degrees
/// of freedom.
pub fn chi_square_upper_quantile(dof: usize, alpha: f64) -> f64 {
    let law = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    let (mut lo, mut hi) = (0.0f64, dof as f64 + 10.0);
    while law.sf(hi) > alpha {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if law.sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 * hi {
            break;
        }
    }
    hi
}

/// One oracle comparison, emitted as a JSON line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub checked: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl OracleReport {
    pub fn check(checked: impl Into<String>, expected: impl ToString, actual: impl ToString) -> Self {
        let expected = expected.to_string();
        let actual = actual.to_string();
        OracleReport {
            checked: checked.into(),
            pass: expected == actual,
            expected,
            actual,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain strings and bools")
    }
}
