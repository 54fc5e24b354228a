//! Exact counts of growing binary trees by internal nodes and anchors (and
//! optionally height), Catalan numbers, and the series identities linking
//! them to iterates of `x -> 1 + z x^2`.

use std::collections::BTreeMap;
use std::fmt::{self, Display, Write as _};

use num_traits::{Float, Zero};

use crate::scalar::{pascal_rows, Coeff};
use crate::sequences::CellSet;
use crate::series::PolySeries;

/// `t[n][k]`: growing trees with `n` internal nodes and `2k` anchors.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable<T> {
    n_max: usize,
    /// `columns[n - 1][k - 1]`, trailing zeros trimmed.
    columns: Vec<Vec<T>>,
}

impl<T: Coeff> CountTable<T> {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `t_{n,2k}`; zero outside the table or its support.
    pub fn get(&self, n: usize, k: usize) -> T {
        if n == 0 || k == 0 || n > self.n_max {
            return T::zero();
        }
        self.columns[n - 1].get(k - 1).cloned().unwrap_or_else(T::zero)
    }

    /// Largest `k` with a nonzero entry in column `n`.
    pub fn max_k(&self, n: usize) -> usize {
        self.columns
            .get(n.wrapping_sub(1))
            .and_then(|col| col.iter().rposition(|v| !v.is_zero()))
            .map_or(0, |i| i + 1)
    }

    pub fn column(&self, n: usize) -> &[T] {
        &self.columns[n - 1]
    }

    pub fn column_sum(&self, n: usize) -> T {
        self.column(n).iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// Nonzero entries as `((n, k), value)`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        self.columns.iter().enumerate().flat_map(|(ni, col)| {
            col.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(move |(ki, v)| ((ni + 1, ki + 1), v))
        })
    }
}

impl<T: Coeff + Display> CountTable<T> {
    /// Header `n,1,..,n_max`, then one row per `2k` with blank zero cells.
    pub fn to_csv(&self) -> String {
        let rows = (1..=self.n_max).map(|n| self.max_k(n)).max().unwrap_or(0);
        grid_csv(self.n_max, rows, |n, k| {
            let v = self.get(n, k);
            (!v.is_zero()).then(|| v.to_string())
        })
    }
}

fn grid_csv(cols: usize, rows: usize, cell: impl Fn(usize, usize) -> Option<String>) -> String {
    let mut out = String::from("n");
    for n in 1..=cols {
        let _ = write!(out, ",{n}");
    }
    out.push('\n');
    for k in 1..=rows {
        let _ = write!(out, "{}", 2 * k);
        for n in 1..=cols {
            out.push(',');
            if let Some(v) = cell(n, k) {
                out.push_str(&v);
            }
        }
        out.push('\n');
    }
    out
}

/// Builds `t_{n,2k}` for `n <= n_max` from
/// `t_{n,2k} = sum_m binom(2m, k) t_{n-k,2m}` with `t_{1,2} = 1`.
pub fn t_table<T: Coeff>(n_max: usize) -> CountTable<T> {
    assert!(n_max >= 1, "n_max must be positive");
    let binom = pascal_rows::<T>(2 * n_max);
    let mut columns: Vec<Vec<T>> = Vec::with_capacity(n_max);
    columns.push(vec![T::one()]);
    for n in 2..=n_max {
        let mut col = Vec::new();
        for k in 1..n {
            let prev = &columns[n - k - 1];
            let mut acc = T::zero();
            for (mi, v) in prev.iter().enumerate() {
                let two_m = 2 * (mi + 1);
                if k <= two_m && !v.is_zero() {
                    acc = acc + binom[two_m][k].clone() * v.clone();
                }
            }
            col.push(acc);
        }
        while col.last().is_some_and(|v| v.is_zero()) {
            col.pop();
        }
        columns.push(col);
    }
    CountTable { n_max, columns }
}

/// Catalan numbers `C_0..=C_n` by `C_{j+1} = sum_i C_i C_{j-i}`.
pub fn catalan_numbers<T: Coeff>(n: usize) -> Vec<T> {
    let mut c = vec![T::one()];
    for j in 0..n {
        let next = (0..=j).fold(T::zero(), |acc, i| acc + c[i].clone() * c[j - i].clone());
        c.push(next);
    }
    c
}

pub fn catalan<T: Coeff>(n: usize) -> T {
    catalan_numbers::<T>(n).pop().expect("nonempty")
}

/// Per-column gap `C_n - sum_k t_{n,2k}`: the number of `n`-internal-node
/// binary trees that are not the frozen image of an active growing tree.
pub fn column_deficits<T>(table: &CountTable<T>) -> Vec<num_bigint::BigInt>
where
    T: Coeff + Into<num_bigint::BigInt>,
{
    let cat = catalan_numbers::<num_bigint::BigInt>(table.n_max());
    (1..=table.n_max())
        .map(|n| &cat[n] - table.column_sum(n).into())
        .collect()
}

/// True iff every column of active counts sums to the Catalan number, that
/// is, every deficit is zero.
pub fn catalan_column_check<T>(table: &CountTable<T>) -> bool
where
    T: Coeff + Into<num_bigint::BigInt>,
{
    column_deficits(table).iter().all(Zero::is_zero)
}

/// `t_{n,2k,h}`: active growing trees of height `h`, nonzero cells only.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightTable<T> {
    h: u32,
    entries: BTreeMap<(u64, u64), T>,
}

impl<T: Coeff> HeightTable<T> {
    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn get(&self, n: u64, k: u64) -> T {
        self.entries.get(&(n, k)).cloned().unwrap_or_else(T::zero)
    }

    pub fn entries(&self) -> &BTreeMap<(u64, u64), T> {
        &self.entries
    }

    pub fn support(&self) -> CellSet {
        CellSet::from_cells(self.entries.keys().copied())
    }

    pub fn total(&self) -> T {
        self.entries.values().cloned().fold(T::zero(), |a, b| a + b)
    }
}

impl<T: Coeff + Display> HeightTable<T> {
    pub fn to_csv(&self) -> String {
        let cols = self.entries.keys().map(|&(n, _)| n).max().unwrap_or(0) as usize;
        let rows = self.entries.keys().map(|&(_, k)| k).max().unwrap_or(0) as usize;
        grid_csv(cols, rows, |n, k| {
            self.entries.get(&(n as u64, k as u64)).map(|v| v.to_string())
        })
    }
}

/// `t_{n,2k,h}` by pushing each height-`h-1` cell `(n, m)` to the cells
/// `(n + k, k)`, `1 <= k <= 2m`, weighted by `binom(2m, k)`.
pub fn t_height_table<T: Coeff>(h: u32) -> HeightTable<T> {
    t_height_table_bounded(h, u64::MAX)
}

/// Like [`t_height_table`], keeping only cells with at most `n_max` internal
/// nodes. The growth step never decreases `n`, so pruning is exact.
pub fn t_height_table_bounded<T: Coeff>(h: u32, n_max: u64) -> HeightTable<T> {
    assert!(h >= 1, "height must be positive");
    let mut entries = BTreeMap::new();
    if n_max >= 1 {
        entries.insert((1u64, 1u64), T::one());
    }
    let mut binom: Vec<Vec<T>> = pascal_rows(2);
    for _ in 1..h {
        let max_m = entries.keys().map(|&(_, m)| m).max().unwrap_or(0) as usize;
        if binom.len() <= 2 * max_m {
            binom = pascal_rows(2 * max_m);
        }
        let mut next: BTreeMap<(u64, u64), T> = BTreeMap::new();
        for (&(n, m), v) in &entries {
            for k in 1..=2 * m {
                if n + k > n_max {
                    break;
                }
                let add = binom[2 * m as usize][k as usize].clone() * v.clone();
                let slot = next.entry((n + k, k)).or_insert_with(T::zero);
                *slot = slot.clone() + add;
            }
        }
        entries = next;
    }
    HeightTable { h, entries }
}

/// `p_h(1, z)`: the `h`-fold iterate of `x -> 1 + z x^2` started at `x = 1`.
pub fn iterate_p<T: Coeff>(h: u32, trunc: usize) -> PolySeries<T> {
    let one = PolySeries::one(trunc);
    let mut x = PolySeries::one(trunc);
    for _ in 0..h {
        x = &one + &x.square().shift(1);
    }
    x
}

/// `M_h(z) = z p_h(1, z)`, the shifted Mandelbrot polynomials.
pub fn mandelbrot<T: Coeff>(h: u32, trunc: usize) -> PolySeries<T> {
    iterate_p::<T>(h, trunc).shift(1)
}

/// `1 + sum_{i>=1} 2^i prod_{j<i} M_j(z)`, whose `z^n` coefficient is the
/// total anchor count `sum_k 2k t_{n,2k}`.
///
/// The `i`-th term has valuation at least `i`, so the sum stops at `i = trunc`.
pub fn cumulative_anchor_series<T: Coeff>(trunc: usize) -> PolySeries<T> {
    assert!(trunc >= 1);
    let two = T::one() + T::one();
    let mut total = PolySeries::one(trunc);
    let mut product = PolySeries::one(trunc);
    let mut power = T::one();
    let mut p = PolySeries::<T>::one(trunc);
    let one = PolySeries::one(trunc);
    for _ in 1..=trunc {
        // p holds p_j(1, z) for j = i - 1
        product = &product * &p.shift(1);
        power = power * two.clone();
        total = &total + &product.scale(&power);
        p = &one + &p.square().shift(1);
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeOutcome<F> {
    Converged { limit: F, iterations: u64 },
    Diverged { at_iter: u64 },
    Undecided,
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeConfig<F> {
    pub tolerance: F,
    pub blow_up: F,
    pub max_iters: u64,
}

impl Default for ProbeConfig<f64> {
    fn default() -> Self {
        ProbeConfig {
            tolerance: 1e-12,
            blow_up: 1e6,
            max_iters: 100_000,
        }
    }
}

/// Iterates `x <- 1 + z x^2` from `x = 1` on the real line.
pub fn fixed_point_probe<F: Float>(z: F, config: ProbeConfig<F>) -> ProbeOutcome<F> {
    let mut x = F::one();
    for t in 1..=config.max_iters {
        let next = F::one() + z * x * x;
        if !next.is_finite() || next.abs() > config.blow_up {
            return ProbeOutcome::Diverged { at_iter: t };
        }
        if (next - x).abs() < config.tolerance {
            return ProbeOutcome::Converged {
                limit: next,
                iterations: t,
            };
        }
        x = next;
    }
    ProbeOutcome::Undecided
}

impl<F: Display> Display for ProbeOutcome<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeOutcome::Converged { limit, iterations } => {
                write!(f, "converged to {limit} after {iterations} iterations")
            }
            ProbeOutcome::Diverged { at_iter } => write!(f, "diverged at iteration {at_iter}"),
            ProbeOutcome::Undecided => write!(f, "undecided"),
        }
    }
}
