//! Formula modules against exhaustive enumeration.

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use growtree::enumeration::{catalan, t_height_table, t_height_table_bounded, t_table};
use growtree::oracle::{active_buckets, all_binary_trees, all_growth_histories, for_each_growth_history};
use growtree::profiles::{binomial, internal_profile_bottom_up, truncate_profile, Profile};
use growtree::sequences::{a_hat_seq, a_hat_seq_meta, b_seq, ruler};
use growtree::{BinaryTree, GrowingTree};

#[test]
fn reachable_trees_keep_their_invariants() {
    let mut seen = 0u64;
    for_each_growth_history(5, |t, s| {
        seen += 1;
        assert_eq!(s.ell, s.n + 1 - s.m);
        if !t.is_active() {
            return;
        }
        assert_eq!(s.h, t.step() as usize, "anchors sit on the last level");
        if t.step() >= 1 {
            assert_eq!(s.m % 2, 0);
            let k = s.m / 2;
            let h = s.h;
            assert!(h + k <= s.n + 1 && s.n + 1 - k <= 1 << (h - 1), "{s:?}");
        }
    })
    .unwrap();
    assert!(seen > 100_000);
}

#[test]
fn histories_yield_distinct_trees() {
    for h in 1..=4 {
        let all = all_growth_histories(h).unwrap();
        let distinct: HashSet<&GrowingTree> = all.iter().map(|(t, _)| t).collect();
        assert_eq!(distinct.len(), all.len(), "step {h}");
    }
}

#[test]
fn active_trees_freeze_injectively() {
    for h in 1..=5u32 {
        let mut frozen = HashSet::new();
        let mut active = 0;
        for_each_growth_history(h, |t, _| {
            if t.is_active() {
                active += 1;
                let bt = t.freeze();
                assert_eq!(bt.height(), h as usize);
                assert_eq!(bt.thaw(), *t);
                frozen.insert(bt);
            }
        })
        .unwrap();
        assert_eq!(frozen.len(), active, "h = {h}");
    }
}

#[test]
fn history_buckets_match_height_tables() {
    for h in 1..=5u32 {
        let brute = active_buckets(h).unwrap();
        let table = t_height_table::<BigUint>(h);
        let from_oracle: BTreeMap<(u64, u64), BigUint> = brute
            .iter()
            .map(|(&(n, m, hh), &c)| {
                assert_eq!(hh, h as usize);
                ((n as u64, m as u64 / 2), BigUint::from(c))
            })
            .collect();
        assert_eq!(&from_oracle, table.entries(), "h = {h}");
    }
}

#[test]
fn height_tables_sum_to_the_full_table() {
    let n_max = 12;
    let full = t_table::<BigUint>(n_max);
    let mut summed: BTreeMap<(u64, u64), BigUint> = BTreeMap::new();
    // a tree with n internal nodes has height at most n
    for h in 1..=n_max as u32 {
        for (&cell, v) in t_height_table_bounded::<BigUint>(h, n_max as u64).entries() {
            *summed.entry(cell).or_insert_with(BigUint::zero) += v;
        }
    }
    for n in 1..=n_max {
        for k in 1..=n {
            let s = summed.get(&(n as u64, k as u64)).cloned().unwrap_or_default();
            assert_eq!(s, full.get(n, k), "t_{{{n},{}}}", 2 * k);
        }
    }
}

#[test]
fn every_binary_tree_is_a_frozen_active_tree() {
    for n in 0..=8usize {
        let table = t_table::<BigUint>(n.max(1));
        let trees = all_binary_trees(n + 1).unwrap();
        assert_eq!(BigUint::from(trees.len()), catalan::<BigUint>(n));
        if n >= 1 {
            assert_eq!(table.column_sum(n), BigUint::from(trees.len()));
        }
        for t in &trees {
            let thawed = t.thaw();
            assert!(thawed.is_active());
            assert_eq!(GrowingTree::replay(&thawed.history()).unwrap(), thawed);
            assert_eq!(thawed.freeze(), *t);
        }
    }
}

#[test]
fn json_round_trips_on_small_trees() {
    for leaves in 1..=6 {
        for t in all_binary_trees(leaves).unwrap() {
            assert_eq!(BinaryTree::from_json(&t.to_json()).unwrap(), t);
        }
    }
    for (t, _) in all_growth_histories(3).unwrap() {
        assert_eq!(GrowingTree::from_json(&t.to_json()).unwrap(), t);
    }
}

/// `T(x, z)` with exact coefficients keyed by `(z-degree, x-degree)`.
type Bivariate = BTreeMap<(usize, usize), BigInt>;

fn add_term(p: &mut Bivariate, key: (usize, usize), v: BigInt) {
    let slot = p.entry(key).or_insert_with(BigInt::zero);
    *slot += v;
    if slot.is_zero() {
        p.remove(&key);
    }
}

#[test]
fn functional_equation_holds_to_order_ten() {
    // T(x,z) - x - T(1 + z x^2, z) + T(1, z) = 0 modulo z^(N+1)
    let n_max = 10;
    let t = t_table::<BigUint>(n_max);
    // seed term x z^0, then t_{n,2k} x^{2k} z^n
    let mut terms: Vec<(usize, usize, BigInt)> = vec![(0, 1, BigInt::one())];
    for n in 1..=n_max {
        for k in 1..=t.max_k(n) {
            terms.push((n, 2 * k, BigInt::from(t.get(n, k))));
        }
    }
    let mut lhs = Bivariate::new();
    for (n, m, c) in &terms {
        add_term(&mut lhs, (*n, *m), c.clone());
        // T(1, z)
        add_term(&mut lhs, (*n, 0), c.clone());
        // -(1 + z x^2)^m z^n
        for j in 0..=*m {
            if n + j > n_max {
                break;
            }
            let b = BigInt::from(binomial(*m as u128, j as u128));
            add_term(&mut lhs, (n + j, 2 * j), -(c * b));
        }
    }
    add_term(&mut lhs, (0, 1), -BigInt::one());
    assert!(lhs.is_empty(), "residual terms: {lhs:?}");
}

#[test]
fn kraft_validity_matches_bottom_up_parity_walk() {
    fn visit(prefix: &mut Vec<u64>, left: u64, checked: &mut u64) {
        if prefix.len() > 1 && prefix[prefix.len() - 1] > 0 {
            let p = Profile::new(prefix.clone()).unwrap();
            assert_eq!(p.is_valid(), internal_profile_bottom_up(&p).is_ok(), "{p}");
            *checked += 1;
        }
        if prefix.len() == 12 {
            return;
        }
        for l in 0..=left {
            prefix.push(l);
            visit(prefix, left - l, checked);
            prefix.pop();
        }
    }
    let mut checked = 0;
    visit(&mut vec![0], 12, &mut checked);
    assert!(checked > 1_000_000);
}

#[test]
fn truncations_stay_valid() {
    let mut profiles = HashSet::new();
    for leaves in 2..=10 {
        for t in all_binary_trees(leaves).unwrap() {
            profiles.insert(t.profile());
        }
    }
    for p in profiles {
        for k in 0..p.height() {
            let q = truncate_profile(&p, k).unwrap();
            assert!(q.is_valid(), "{p} at {k} gives {q}");
            assert_eq!(q.height(), k + 1);
        }
    }
}

#[test]
fn ruler_and_a_hat_are_inverse() {
    let n_max = 10_000;
    let a_hat = a_hat_seq(n_max);
    assert_eq!(a_hat, a_hat_seq_meta(n_max));
    let counts = a_hat.repetitions(n_max / 2);
    for n in 1..=n_max / 2 {
        assert_eq!(counts.at(n), ruler(n as u64), "n = {n}");
    }
}

#[test]
fn b_doubling_rules() {
    let b = b_seq(20_000);
    assert_eq!(b.at(1), 2);
    for n in 1..10_000 {
        assert_eq!(b.at(2 * n), b.at(n) + 1);
        assert_eq!(b.at(2 * n + 1), 1);
    }
}
