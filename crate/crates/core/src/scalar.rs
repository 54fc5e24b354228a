//! The coefficient ring shared by series and count tables.
//!
//! Counting code only needs a commutative semiring with `0` and `1`, so it is
//! written once over [`Coeff`] and instantiated with `BigUint` for exact
//! tables, `u64`/`u128` for small fast checks, or `f64` for approximations.

use std::fmt::Debug;
use std::ops::{Add, Mul};

use num_traits::{One, Zero};

pub trait Coeff: Clone + Debug + PartialEq + Zero + One + Add<Output = Self> + Mul<Output = Self> {
    /// `n` copies of one, built by doubling so it works in any semiring.
    fn from_count(mut n: u64) -> Self {
        let mut acc = Self::zero();
        let mut power = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc + power.clone();
            }
            power = power.clone() + power;
            n >>= 1;
        }
        acc
    }
}

impl<T> Coeff for T where T: Clone + Debug + PartialEq + Zero + One + Add<Output = T> + Mul<Output = T> {}

/// Pascal triangle rows `0..=n_max` in an arbitrary coefficient ring.
pub(crate) fn pascal_rows<T: Coeff>(n_max: usize) -> Vec<Vec<T>> {
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![T::one()]);
    for n in 1..=n_max {
        let prev = &rows[n - 1];
        let mut row = Vec::with_capacity(n + 1);
        row.push(T::one());
        for k in 1..n {
            row.push(prev[k - 1].clone() + prev[k].clone());
        }
        row.push(T::one());
        rows.push(row);
    }
    rows
}
