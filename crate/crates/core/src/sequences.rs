//! Meta-Fibonacci sequences behind the column heights of the count tables,
//! and the cell sets `S_h` (nonzero domain at height `h`) with their right
//! and upper boundaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::series::PolySeries;

/// A 1-indexed integer sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequence(Vec<u64>);

impl Sequence {
    /// The `n`-th term, `n >= 1`.
    pub fn at(&self, n: usize) -> u64 {
        self.0[n - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    /// `#{k : self_k = n}` for `n = 1..=n_max`; the sequence must already
    /// exceed `n_max` somewhere for the last count to be complete.
    pub fn repetitions(&self, n_max: usize) -> Sequence {
        let mut counts = vec![0u64; n_max];
        for &v in &self.0 {
            if (1..=n_max as u64).contains(&v) {
                counts[v as usize - 1] += 1;
            }
        }
        Sequence(counts)
    }

    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        parts.join(",")
    }
}

pub type SeqA = Sequence;
pub type SeqB = Sequence;

/// `a_1 = 1`, `a_n = max{k : k <= 2 a_{n-k}}`.
///
/// The predicate `k <= 2 a_{n-k}` holds at `k = 1` and, since `a` is
/// nondecreasing, stays false once it fails, so the maximum is found by
/// bisection.
pub fn a_seq(n_max: usize) -> SeqA {
    assert!(n_max >= 1);
    let mut a = vec![0u64; n_max + 1];
    a[1] = 1;
    for n in 2..=n_max {
        let holds = |k: usize| (k as u64) <= 2 * a[n - k];
        let (mut lo, mut hi) = (1usize, n - 1);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        a[n] = lo as u64;
    }
    Sequence(a[1..].to_vec())
}

/// `a_0 = a_1 = a_2 = 1`, `a_n = a_{n-1-a_{n-1}} + a_{n-2-a_{n-2}}`.
pub fn a_seq_meta(n_max: usize) -> SeqA {
    assert!(n_max >= 1);
    let mut a = vec![1u64; (n_max + 1).max(3)];
    for n in 3..=n_max {
        a[n] = a[n - 1 - a[n - 1] as usize] + a[n - 2 - a[n - 2] as usize];
    }
    Sequence(a[1..=n_max].to_vec())
}

/// How often each value `1..=n_max` occurs in `a`.
pub fn b_seq(n_max: usize) -> SeqB {
    // a_n ~ n/2, and each value repeats at most log2(n) + 2 times
    let mut len = 2 * n_max + 8;
    loop {
        let a = a_seq_meta(len);
        if a.at(len) > n_max as u64 {
            return a.repetitions(n_max);
        }
        len *= 2;
    }
}

/// `p + 2` if `n = 2^p`, else `p + 1` with `p` the 2-adic valuation of `n`.
pub fn b_formula(n: u64) -> u64 {
    assert!(n >= 1);
    let p = n.trailing_zeros() as u64;
    if n.is_power_of_two() {
        p + 2
    } else {
        p + 1
    }
}

/// Checks that `z sum_{n>=0} prod_{i=1}^n (z + z^{2^i})` has coefficient
/// `a_n` at `z^n` for `1 <= n <= trunc`.
pub fn a_gf_check(trunc: usize) -> bool {
    assert!(trunc >= 1);
    let expected = a_seq(trunc);
    let mut total = PolySeries::<u64>::zero(trunc);
    // z * (empty product)
    let mut term = PolySeries::<u64>::monomial(1, trunc);
    let mut i = 0u32;
    while term.valuation().is_some() {
        total = &total + &term;
        i += 1;
        let high = 1usize.checked_shl(i).unwrap_or(usize::MAX);
        let next = if high <= trunc {
            &term.shift(1) + &term.shift(high)
        } else {
            term.shift(1)
        };
        term = next;
    }
    (1..=trunc).all(|n| total.coeff(n) == expected.at(n))
}

/// The ruler function: `1 + ` the 2-adic valuation of `n`.
pub fn ruler(n: u64) -> u64 {
    assert!(n >= 1);
    n.trailing_zeros() as u64 + 1
}

/// `â_n = min{k : ruler(1) + .. + ruler(k) >= n}`.
pub fn a_hat_seq(n_max: usize) -> Sequence {
    let mut out = Vec::with_capacity(n_max);
    let mut k = 1u64;
    let mut prefix = ruler(1);
    for n in 1..=n_max as u64 {
        while prefix < n {
            k += 1;
            prefix += ruler(k);
        }
        out.push(k);
    }
    Sequence(out)
}

/// `â` through the nested recurrence `c_0 = c_1 = c_2 = 1`,
/// `c_n = c_{n - c_{n-1}} + c_{n-1-c_{n-2}}`, read with a one-step offset:
/// `â_n = c_{n+1}`.
pub fn a_hat_seq_meta(n_max: usize) -> Sequence {
    let len = n_max + 2;
    let mut c = vec![1u64; len.max(3)];
    for n in 3..len {
        c[n] = c[n - c[n - 1] as usize] + c[n - 1 - c[n - 2] as usize];
    }
    Sequence(c[2..len].to_vec())
}

/// A finite set of integer cells `(n, k)`, stored column by column as sorted
/// disjoint inclusive `k`-intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellSet {
    columns: BTreeMap<u64, Vec<(u64, u64)>>,
}

impl CellSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut by_column: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (n, k) in cells {
            by_column.entry(n).or_default().push(k);
        }
        let mut set = CellSet::new();
        for (n, mut ks) in by_column {
            ks.sort_unstable();
            ks.dedup();
            set.columns.insert(n, runs(ks.into_iter()));
        }
        set
    }

    fn from_columns(columns: BTreeMap<u64, Vec<(u64, u64)>>) -> Self {
        CellSet {
            columns: columns.into_iter().filter(|(_, v)| !v.is_empty()).collect(),
        }
    }

    pub fn contains(&self, n: u64, k: u64) -> bool {
        self.columns
            .get(&n)
            .is_some_and(|runs| runs.iter().any(|&(lo, hi)| lo <= k && k <= hi))
    }

    pub fn len(&self) -> u64 {
        self.columns
            .values()
            .flat_map(|runs| runs.iter().map(|&(lo, hi)| hi - lo + 1))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Cells in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.columns
            .iter()
            .flat_map(|(&n, runs)| runs.iter().flat_map(move |&(lo, hi)| (lo..=hi).map(move |k| (n, k))))
    }

    /// Column-wise runs, `(n, k_lo, k_hi)`.
    pub fn runs(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        self.columns
            .iter()
            .flat_map(|(&n, runs)| runs.iter().map(move |&(lo, hi)| (n, lo, hi)))
    }

    pub fn column_max(&self, n: u64) -> Option<u64> {
        self.columns.get(&n).and_then(|runs| runs.last()).map(|&(_, hi)| hi)
    }

    /// Cells `(n, k)` with `(n + 1, k)` outside the set.
    pub fn right_boundary(&self) -> CellSet {
        let empty = Vec::new();
        let columns = self
            .columns
            .iter()
            .map(|(&n, runs)| {
                let next = self.columns.get(&(n + 1)).unwrap_or(&empty);
                (n, difference(runs, next))
            })
            .collect();
        CellSet::from_columns(columns)
    }

    /// Cells `(n, k)` with `(n, k + 1)` outside the set: the top of every run.
    pub fn upper_boundary(&self) -> CellSet {
        let columns = self
            .columns
            .iter()
            .map(|(&n, runs)| (n, runs.iter().map(|&(_, hi)| (hi, hi)).collect()))
            .collect();
        CellSet::from_columns(columns)
    }

    pub fn shifted(&self, dn: u64, dk: u64) -> CellSet {
        let columns = self
            .columns
            .iter()
            .map(|(&n, runs)| (n + dn, runs.iter().map(|&(lo, hi)| (lo + dk, hi + dk)).collect()))
            .collect();
        CellSet { columns }
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let mut columns = self.columns.clone();
        for (&n, runs) in &other.columns {
            let merged = columns.remove(&n).unwrap_or_default();
            let mut all: Vec<(u64, u64)> = merged.into_iter().chain(runs.iter().copied()).collect();
            all.sort_unstable();
            let mut out: Vec<(u64, u64)> = Vec::with_capacity(all.len());
            for (lo, hi) in all {
                match out.last_mut() {
                    Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                    _ => out.push((lo, hi)),
                }
            }
            columns.insert(n, out);
        }
        CellSet { columns }
    }

    /// One cell per line, `"n k"`, lexicographically sorted.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (n, k) in self.iter() {
            let _ = writeln!(out, "{n} {k}");
        }
        out
    }
}

/// Collapses a sorted, deduplicated stream into inclusive runs.
fn runs(sorted: impl Iterator<Item = u64>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for k in sorted {
        match out.last_mut() {
            Some(last) if last.1 + 1 == k => last.1 = k,
            _ => out.push((k, k)),
        }
    }
    out
}

fn difference(a: &[(u64, u64)], b: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for &(lo, hi) in a {
        let mut start = lo;
        for &(blo, bhi) in b {
            if bhi < start || blo > hi {
                continue;
            }
            if blo > start {
                out.push((start, blo - 1));
            }
            start = bhi + 1;
            if start > hi {
                break;
            }
        }
        if start <= hi {
            out.push((start, hi));
        }
    }
    out
}

/// The one-step transition `psi(n, k) = {(n + i, i) : 1 <= i <= 2k}`,
/// applied to every cell of `set`.
pub fn psi(set: &CellSet) -> CellSet {
    let Some((&n_min, _)) = set.columns.iter().next() else {
        return CellSet::new();
    };
    let n_hi = *set.columns.keys().next_back().expect("nonempty");
    // psi(n, k') is contained in psi(n, k) for k' < k
    let top: Vec<u64> = (n_min..=n_hi).map(|n| set.column_max(n).unwrap_or(0)).collect();
    let reach = 2 * top.iter().copied().max().unwrap_or(0);
    let mut columns = BTreeMap::new();
    for target in (n_min + 1)..=(n_hi + reach) {
        let i_lo = target.saturating_sub(n_hi).max(1);
        let i_hi = (target - n_min).min(reach);
        let members = (i_lo..=i_hi).filter(|&i| 2 * top[(target - i - n_min) as usize] >= i);
        let r = runs(members);
        if !r.is_empty() {
            columns.insert(target, r);
        }
    }
    CellSet { columns }
}

/// The nonzero domain `S_h`, by `S_1 = {(1,1)}` and
/// `S_{h+1} = psi(upper_boundary(S_h))`.
pub fn s_domain(h: u32) -> CellSet {
    s_domains(h).pop().expect("h >= 1")
}

/// `S_1, ..., S_h`.
pub fn s_domains(h: u32) -> Vec<CellSet> {
    assert!(h >= 1);
    let mut out = vec![CellSet::from_cells([(1, 1)])];
    for _ in 1..h {
        let next = psi(&out.last().expect("nonempty").upper_boundary());
        out.push(next);
    }
    out
}

/// Right boundary of `S_h`: `{(2^{h-1} - 1 + i, i) : 1 <= i <= 2^{h-1}}`.
pub fn gamma(h: u32) -> CellSet {
    assert!(h >= 1);
    let half = 1u64 << (h - 1);
    CellSet::from_cells((1..=half).map(|i| (half - 1 + i, i)))
}

/// Upper boundary of `S_h`: `{(n, â_{n-h+1}) : h <= n <= 2^h - 1}`.
pub fn lambda_upper(h: u32) -> CellSet {
    assert!(h >= 1);
    let h64 = h as u64;
    let n_hi = (1u64 << h) - 1;
    let a_hat = a_hat_seq((n_hi - h64 + 1) as usize);
    CellSet::from_cells((h64..=n_hi).map(|n| (n, a_hat.at((n - h64 + 1) as usize))))
}

/// Closed form of `|S_h|`: `2^{h-2} (2^{h-1} - h + 2)` for `h >= 2`, and the
/// direct count `1` for `h = 1` (`0` for `h = 0`).
pub fn s_area_formula(h: u32) -> BigUint {
    match h {
        0 => BigUint::ZERO,
        1 => BigUint::from(1u32),
        _ => {
            let base = (BigUint::from(1u32) << (h - 1)) + 2u32 - h;
            base << (h - 2)
        }
    }
}

/// Euclidean distance from `(x, y)` to the closed triangle with vertices
/// `(0,0)`, `(1,0)`, `(2,1)`.
pub fn distance_to_limit_triangle(x: f64, y: f64) -> f64 {
    // y >= 0, y <= x/2, y >= x - 1
    if y >= 0.0 && 2.0 * y <= x && y >= x - 1.0 {
        return 0.0;
    }
    let edges = [((0.0, 0.0), (1.0, 0.0)), ((1.0, 0.0), (2.0, 1.0)), ((2.0, 1.0), (0.0, 0.0))];
    edges
        .iter()
        .map(|&(a, b)| segment_distance((x, y), a, b))
        .fold(f64::INFINITY, f64::min)
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Two-sided distance between `S_h / 2^{h-1}` and the limit triangle: the
/// farthest normalized cell from the triangle plus the farthest triangle
/// vertex from the normalized cells.
pub fn scaling_limit_deviation(h: u32) -> f64 {
    deviation_of(&s_domain(h), h)
}

/// [`scaling_limit_deviation`] for an already computed `S_h`.
pub fn deviation_of(domain: &CellSet, h: u32) -> f64 {
    assert!(h >= 2);
    let scale = (1u64 << (h - 1)) as f64;
    let norm = |n: u64, k: u64| (n as f64 / scale, k as f64 / scale);
    // distance to a convex set is convex along each column run, so the
    // run endpoints attain the maximum
    let outward = domain
        .runs()
        .flat_map(|(n, lo, hi)| [norm(n, lo), norm(n, hi)])
        .map(|(x, y)| distance_to_limit_triangle(x, y))
        .fold(0.0, f64::max);
    let vertices = [(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)];
    let inward = vertices
        .iter()
        .map(|&(vx, vy)| {
            domain
                .runs()
                .map(|(n, lo, hi)| {
                    let target = vy * scale;
                    let nearest = [target.floor(), target.ceil()]
                        .map(|k| (k.max(lo as f64).min(hi as f64)) as u64);
                    nearest
                        .iter()
                        .map(|&k| {
                            let (x, y) = norm(n, k);
                            ((x - vx).powi(2) + (y - vy).powi(2)).sqrt()
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    outward + inward
}

#[cfg(test)]
mod tests {
    use super::*;

    const A_LISTING: [u64; 27] = [
        1, 1, 2, 2, 2, 3, 4, 4, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 8, 9, 10, 10, 11, 12, 12, 12, 13,
    ];
    const B_LISTING: [u64; 27] = [
        2, 3, 1, 4, 1, 2, 1, 5, 1, 2, 1, 3, 1, 2, 1, 6, 1, 2, 1, 3, 1, 2, 1, 4, 1, 2, 1,
    ];
    const A_HAT_LISTING: [u64; 26] = [
        1, 2, 2, 3, 4, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 9, 10, 10, 11, 12, 12, 12, 13, 14, 14, 15,
    ];
    const B_HAT_LISTING: [u64; 27] = [
        1, 2, 1, 3, 1, 2, 1, 4, 1, 2, 1, 3, 1, 2, 1, 5, 1, 2, 1, 3, 1, 2, 1, 4, 1, 2, 1,
    ];

    #[test]
    fn listings() {
        assert_eq!(a_seq(27).values(), &A_LISTING);
        assert_eq!(a_seq_meta(27).values(), &A_LISTING);
        assert_eq!(b_seq(27).values(), &B_LISTING);
        assert_eq!(a_hat_seq(26).values(), &A_HAT_LISTING);
        assert_eq!(a_hat_seq_meta(26).values(), &A_HAT_LISTING);
        let ruled: Vec<u64> = (1..=27).map(ruler).collect();
        assert_eq!(ruled, B_HAT_LISTING);
    }

    #[test]
    fn b_closed_form() {
        assert_eq!(b_formula(12), 3);
        assert_eq!(b_formula(16), 6);
        assert_eq!(b_formula(1), 2);
        let b = b_seq(2000);
        for n in 1..=2000 {
            assert_eq!(b.at(n), b_formula(n as u64), "n = {n}");
        }
    }

    #[test]
    fn generating_function() {
        assert!(a_gf_check(1));
        assert!(a_gf_check(27));
        assert!(a_gf_check(200));
    }

    #[test]
    fn ruler_prefix_sums() {
        for h in 1..=20u32 {
            let sum: u64 = (1..(1u64 << h)).map(ruler).sum();
            assert_eq!(sum, (1u64 << (h + 1)) - (h as u64 + 2));
        }
    }

    #[test]
    fn boundaries_h4() {
        let g = gamma(4);
        assert_eq!(g.len(), 8);
        assert!(g.contains(8, 1) && g.contains(15, 8));
        assert_eq!(gamma(1), CellSet::from_cells([(1, 1)]));
        let l = lambda_upper(4);
        assert!(l.contains(4, 1) && l.contains(10, 4) && l.contains(15, 8));
        assert_eq!(l.len(), 16 - 4);
        assert_eq!(lambda_upper(2), CellSet::from_cells([(2, 1), (3, 2)]));
    }

    #[test]
    fn domains() {
        assert_eq!(s_domain(1), CellSet::from_cells([(1, 1)]));
        assert_eq!(s_domain(2), CellSet::from_cells([(2, 1), (3, 2)]));
        assert_eq!(s_domain(4).len(), 24);
        assert_eq!(s_domain(5).len(), 104);
        let s4 = s_domain(4);
        assert_eq!(s4.right_boundary(), gamma(4));
        assert_eq!(s4.upper_boundary(), lambda_upper(4));
    }

    #[test]
    fn area_formula() {
        assert_eq!(s_area_formula(1), BigUint::from(1u32));
        assert_eq!(s_area_formula(2), BigUint::from(2u32));
        assert_eq!(s_area_formula(4), BigUint::from(24u32));
        assert_eq!(s_area_formula(5), BigUint::from(104u32));
    }

    #[test]
    fn cellset_ops() {
        let s = CellSet::from_cells([(1, 1), (1, 2), (1, 4), (2, 2)]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.right_boundary(), CellSet::from_cells([(1, 1), (1, 4), (2, 2)]));
        assert_eq!(s.upper_boundary(), CellSet::from_cells([(1, 2), (1, 4), (2, 2)]));
        assert_eq!(s.shifted(1, 2), CellSet::from_cells([(2, 3), (2, 4), (2, 6), (3, 4)]));
        let u = s.union(&CellSet::from_cells([(1, 3)]));
        assert_eq!(u.runs().next(), Some((1, 1, 4)));
        assert_eq!(s.to_lines(), "1 1\n1 2\n1 4\n2 2\n");
    }

    #[test]
    fn psi_matches_pointwise_definition() {
        let s = CellSet::from_cells([(2, 1), (3, 2), (5, 1)]);
        let direct = CellSet::from_cells(
            s.iter().flat_map(|(n, k)| (1..=2 * k).map(move |i| (n + i, i))),
        );
        assert_eq!(psi(&s), direct);
    }

    #[test]
    fn triangle_distance() {
        assert_eq!(distance_to_limit_triangle(1.0, 0.2), 0.0);
        assert!((distance_to_limit_triangle(0.5, -0.5) - 0.5).abs() < 1e-12);
        assert!((distance_to_limit_triangle(3.0, 1.0) - 1.0).abs() < 1e-12);
    }
}
