//! Truncated formal power series in one variable `z`.

use std::fmt;
use std::ops::{Add, Mul};

use crate::scalar::Coeff;

/// A power series known modulo `z^(trunc+1)`.
///
/// Coefficients are stored densely from `z^0` up to `z^trunc`; every
/// arithmetic operation drops terms of degree above `trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySeries<T> {
    coeffs: Vec<T>,
    trunc: usize,
}

impl<T: Coeff> PolySeries<T> {
    pub fn zero(trunc: usize) -> Self {
        PolySeries {
            coeffs: vec![T::zero(); trunc + 1],
            trunc,
        }
    }

    pub fn constant(c: T, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(T::one(), trunc)
    }

    /// The monomial `z^degree` (zero when `degree > trunc`).
    pub fn monomial(degree: usize, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if degree <= trunc {
            s.coeffs[degree] = T::one();
        }
        s
    }

    /// Builds a series from leading coefficients; missing ones are zero and
    /// extra ones beyond `trunc` are dropped.
    pub fn from_coeffs(mut coeffs: Vec<T>, trunc: usize) -> Self {
        coeffs.resize(trunc + 1, T::zero());
        PolySeries { coeffs, trunc }
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> T {
        self.coeffs.get(degree).cloned().unwrap_or_else(T::zero)
    }

    /// Lowest degree with a nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Multiplication by `z^by`.
    pub fn shift(&self, by: usize) -> Self {
        let mut out = Self::zero(self.trunc);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + by > self.trunc {
                break;
            }
            out.coeffs[i + by] = c.clone();
        }
        out
    }

    pub fn scale(&self, factor: &T) -> Self {
        PolySeries {
            coeffs: self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect(),
            trunc: self.trunc,
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Composition `self(inner)`, treating `self` as the polynomial formed by
    /// its stored coefficients.
    pub fn compose(&self, inner: &Self) -> Self {
        let trunc = self.trunc.min(inner.trunc);
        let mut acc = Self::zero(trunc);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone(), trunc);
        }
        acc
    }
}

impl<T: Coeff> Add for &PolySeries<T> {
    type Output = PolySeries<T>;

    fn add(self, rhs: Self) -> PolySeries<T> {
        let trunc = self.trunc.min(rhs.trunc);
        let coeffs = (0..=trunc)
            .map(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone())
            .collect();
        PolySeries { coeffs, trunc }
    }
}

impl<T: Coeff> Mul for &PolySeries<T> {
    type Output = PolySeries<T>;

    fn mul(self, rhs: Self) -> PolySeries<T> {
        let trunc = self.trunc.min(rhs.trunc);
        let mut out: PolySeries<T> = PolySeries::zero(trunc);
        for (i, a) in self.coeffs.iter().enumerate().take(trunc + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(trunc + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j] = out.coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        out
    }
}

impl<T: Coeff> Add for PolySeries<T> {
    type Output = PolySeries<T>;
    fn add(self, rhs: Self) -> PolySeries<T> {
        &self + &rhs
    }
}

impl<T: Coeff> Mul for PolySeries<T> {
    type Output = PolySeries<T>;
    fn mul(self, rhs: Self) -> PolySeries<T> {
        &self * &rhs
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for PolySeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}z")?,
                _ => write!(f, "{c}z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.trunc + 1)
    }
}
