//! Uniform random binary trees with a prescribed leaf profile, built bottom
//! up one level at a time.
//!
//! Going up from the deepest level, the subtrees already built are
//! interleaved with the fresh leaves of the current level and then paired
//! under new parents. A tree is determined by the interleaving chosen at
//! every level, so drawing those interleavings uniformly and independently
//! yields a uniform tree. All levels are drawn from a single uniform rank
//! over the product of the per-level pattern counts, which keeps the bit
//! overhead of the whole sample below two bits.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand_core::RngCore;
use serde::Serialize;

use crate::bits::{draw_below, BitSource};
use crate::error::{Error, Result};
use crate::profiles::{binomial, count_factors, count_trees, Profile};
use crate::tree::{BinNode, BinaryTree};

/// An order-preserving interleaving of `p` items with `q` items: `true`
/// marks a slot taken by the second sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MergePattern {
    word: Vec<bool>,
}

impl MergePattern {
    pub fn word(&self) -> &[bool] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn ones(&self) -> Vec<usize> {
        self.word
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Interleaves `first` (at the `false` slots) with `second`.
    pub fn merge<T>(&self, first: impl IntoIterator<Item = T>, second: impl IntoIterator<Item = T>) -> Vec<T> {
        let mut a = first.into_iter();
        let mut b = second.into_iter();
        self.word
            .iter()
            .map(|&take_second| {
                if take_second { b.next() } else { a.next() }.expect("pattern arity")
            })
            .collect()
    }
}

/// The `rank`-th pattern with `q` ones among `p + q` slots, patterns being
/// ordered lexicographically by their sorted one-positions.
pub fn unrank_merge(rank: &BigUint, p: usize, q: usize) -> Result<MergePattern> {
    let n = p + q;
    let total = binomial(n as u128, q as u128);
    if rank >= &total {
        return Err(Error::RankOutOfRange {
            rank: rank.to_string(),
            count: total.to_string(),
        });
    }
    let mut word = vec![false; n];
    if q == 0 {
        return Ok(MergePattern { word });
    }
    let mut rank = rank.clone();
    let mut ones_left = q;
    // patterns that put a one at `pos`, given the prefix: binom(n-pos-1, ones_left-1)
    let mut with_one = binomial(n as u128 - 1, q as u128 - 1);
    for (pos, slot) in word.iter_mut().enumerate() {
        let rest = (n - pos - 1) as u64;
        let k = (ones_left - 1) as u64;
        if rank < with_one {
            *slot = true;
            ones_left -= 1;
            if ones_left == 0 {
                break;
            }
            // binom(rest - 1, k - 1) = binom(rest, k) * k / rest
            with_one = with_one * k / rest;
        } else {
            rank -= &with_one;
            // binom(rest - 1, k) = binom(rest, k) * (rest - k) / rest
            with_one = with_one * (rest - k) / rest;
        }
    }
    Ok(MergePattern { word })
}

/// Inverse of [`unrank_merge`].
pub fn rank_merge(pattern: &MergePattern) -> BigUint {
    let n = pattern.len();
    let mut ones_left = pattern.word.iter().filter(|&&b| b).count();
    let mut rank = BigUint::zero();
    for (pos, &bit) in pattern.word.iter().enumerate() {
        if ones_left == 0 {
            break;
        }
        if bit {
            ones_left -= 1;
        } else {
            rank += binomial((n - pos - 1) as u128, (ones_left - 1) as u128);
        }
    }
    rank
}

/// A uniform interleaving of `p` and `q` items.
pub fn sample_merge<R: RngCore>(src: &mut BitSource<R>, p: usize, q: usize) -> MergePattern {
    let total = binomial((p + q) as u128, q as u128);
    let rank = draw_below(src, &total).expect("binomial is positive");
    unrank_merge(&rank, p, q).expect("rank drawn in range")
}

/// One sampled tree together with what it cost.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleTrace {
    pub tree: BinaryTree,
    pub bits_consumed: u64,
    /// Elementary construction steps: one per leaf created, and two per
    /// internal node (creation, then hand-off to the next level's sequence).
    pub steps: u64,
    /// Pattern ranks per level, deepest merging level first.
    pub level_ranks: Vec<BigUint>,
}

/// A uniform binary tree with profile `p`.
pub fn uniform_tree<R: RngCore>(p: &Profile, src: &mut BitSource<R>) -> Result<BinaryTree> {
    uniform_tree_traced(p, src).map(|t| t.tree)
}

pub fn uniform_tree_traced<R: RngCore>(p: &Profile, src: &mut BitSource<R>) -> Result<SampleTrace> {
    // validates before touching the bit source
    let factors = count_factors(p)?;
    let start_bits = src.bits_consumed();
    let h = p.height();
    if h == 0 {
        return Ok(SampleTrace {
            tree: BinaryTree::leaf(),
            bits_consumed: 0,
            steps: 1,
            level_ranks: Vec::new(),
        });
    }
    let levels = p.levels();
    let total: BigUint = factors.iter().product();
    let mut joint = draw_below(src, &total)?;

    // factors[j - 1] counts the interleavings on level j
    let mut level_ranks = Vec::with_capacity(h.saturating_sub(1));
    for j in (1..h).rev() {
        let radix = &factors[j - 1];
        level_ranks.push(&joint % radix);
        joint /= radix;
    }

    let mut arena: Vec<BinNode> = Vec::new();
    let mut steps = 0u64;
    let mut new_node = |arena: &mut Vec<BinNode>, node: BinNode| {
        arena.push(node);
        steps += 1;
        (arena.len() - 1) as u32
    };

    let mut carried: Vec<u32> = Vec::with_capacity((levels[h] / 2) as usize);
    for _ in 0..levels[h] / 2 {
        let left = new_node(&mut arena, BinNode::Leaf);
        let right = new_node(&mut arena, BinNode::Leaf);
        carried.push(new_node(&mut arena, BinNode::Internal { left, right }));
    }
    let mut handoffs = carried.len() as u64;

    for (j, rank) in (1..h).rev().zip(&level_ranks) {
        let fresh = levels[j] as usize;
        let pattern = unrank_merge(rank, carried.len(), fresh)?;
        let mut level: Vec<u32> = Vec::with_capacity(pattern.len());
        let mut below = carried.iter();
        for &is_leaf in pattern.word() {
            level.push(if is_leaf {
                new_node(&mut arena, BinNode::Leaf)
            } else {
                *below.next().expect("pattern arity")
            });
        }
        carried = level
            .chunks_exact(2)
            .map(|pair| {
                new_node(
                    &mut arena,
                    BinNode::Internal {
                        left: pair[0],
                        right: pair[1],
                    },
                )
            })
            .collect();
        handoffs += carried.len() as u64;
    }
    debug_assert_eq!(carried.len(), 1);
    let root = carried[0];
    Ok(SampleTrace {
        tree: BinaryTree::from_arena(&arena, root),
        bits_consumed: src.bits_consumed() - start_bits,
        steps: steps + handoffs,
        level_ranks,
    })
}

/// `log2` of the number of trees with profile `p`: the entropy of one
/// uniform sample.
pub fn entropy_bound(p: &Profile) -> Result<f64> {
    Ok(log2_big(&count_trees(p)?))
}

pub fn log2_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    if n.is_one() {
        return 0.0;
    }
    let bits = n.bits();
    if bits <= 64 {
        return n.to_u64().expect("fits").to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_u64().expect("64 bits");
    (top as f64).log2() + shift as f64
}

/// Per-sample summary emitted next to sampled trees.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub profile: Profile,
    pub bits_consumed: u64,
    pub node_count: usize,
}
