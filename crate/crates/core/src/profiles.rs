//! Leaf profiles of binary trees: Kraft validity, internal-node profiles,
//! truncation, and the exact number of trees sharing a profile.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Leaf counts per level, `levels[i]` leaves at depth `i`, last entry nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Profile(Vec<u64>);

impl Profile {
    /// Checks the canonical shape only; Kraft validity is separate, see
    /// [`Profile::is_valid`].
    pub fn new(levels: Vec<u64>) -> Result<Profile> {
        match levels.as_slice() {
            [] => Err(Error::MalformedProfile("empty profile".into())),
            [1] => Ok(Profile(levels)),
            [_] => Err(Error::MalformedProfile(
                "a height-0 profile must be (1)".into(),
            )),
            [first, .., last] => {
                if *first != 0 {
                    Err(Error::MalformedProfile(
                        "the root is internal, so the level-0 count must be 0".into(),
                    ))
                } else if *last == 0 {
                    Err(Error::MalformedProfile(
                        "the deepest level must hold at least one leaf".into(),
                    ))
                } else {
                    Ok(Profile(levels))
                }
            }
        }
    }

    pub(crate) fn from_levels_unchecked(levels: Vec<u64>) -> Profile {
        debug_assert!(Profile::new(levels.clone()).is_ok());
        Profile(levels)
    }

    pub fn levels(&self) -> &[u64] {
        &self.0
    }

    pub fn height(&self) -> usize {
        self.0.len() - 1
    }

    pub fn leaf_count(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_valid(&self) -> bool {
        kraft_sum(self).is_one()
    }
}

impl From<Profile> for Vec<u64> {
    fn from(p: Profile) -> Vec<u64> {
        p.0
    }
}

impl TryFrom<Vec<u64>> for Profile {
    type Error = Error;
    fn try_from(levels: Vec<u64>) -> Result<Profile> {
        Profile::new(levels)
    }
}

/// Comma-separated shorthand, e.g. `0,0,2,4`.
impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Profile> {
        let levels = s
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::MalformedProfile(format!("{part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Profile::new(levels)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Internal-node counts per level, `levels[k]` internal nodes at depth `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InternalProfile(Vec<u128>);

impl InternalProfile {
    pub fn levels(&self) -> &[u128] {
        &self.0
    }
}

impl fmt::Display for InternalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u128::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `sum(levels[i] / 2^i)`, exactly.
pub fn kraft_sum(p: &Profile) -> BigRational {
    let h = p.height();
    let numer: BigUint = p
        .levels()
        .iter()
        .enumerate()
        .map(|(i, &l)| BigUint::from(l) << (h - i))
        .sum();
    BigRational::new(BigInt::from(numer), BigInt::one() << h)
}

/// Internal profile read bottom-up: `i_{h-1} = l_h / 2`, then
/// `i_k = (i_{k+1} + l_{k+1}) / 2`, each division required to be exact and
/// the walk required to end on a single root.
///
/// This succeeds exactly on Kraft-valid profiles, so it doubles as an
/// integer-only validity test.
pub fn internal_profile_bottom_up(p: &Profile) -> Result<InternalProfile> {
    let l = p.levels();
    let h = p.height();
    if h == 0 {
        return Err(Error::LevelOutOfRange { level: 0, height: 0 });
    }
    let mut out = vec![0u128; h];
    // nodes on level k+1, all of them children of level-k internal nodes
    let mut below: u128 = l[h] as u128;
    for k in (0..h).rev() {
        if below % 2 == 1 {
            return Err(Error::ParityViolation {
                level: k + 1,
                value: below,
            });
        }
        out[k] = below / 2;
        below = out[k] + l[k] as u128;
    }
    if below != 1 {
        return Err(Error::KraftViolation(kraft_sum(p)));
    }
    Ok(InternalProfile(out))
}

/// Internal profile read top-down: `i_0 = 1`, `i_k = 2 i_{k-1} - l_k`.
fn internal_profile_top_down(p: &Profile) -> Option<Vec<u128>> {
    let l = p.levels();
    let mut out = Vec::with_capacity(p.height());
    let mut current: u128 = 1;
    out.push(current);
    for &leaves in &l[1..p.height()] {
        current = (2 * current).checked_sub(leaves as u128)?;
        if current == 0 {
            return None;
        }
        out.push(current);
    }
    Some(out)
}

/// The internal-node profile, computed both top-down and bottom-up.
pub fn internal_profile(p: &Profile) -> Result<InternalProfile> {
    let sum = kraft_sum(p);
    if !sum.is_one() {
        return Err(Error::KraftViolation(sum));
    }
    let bottom_up = internal_profile_bottom_up(p)?;
    let top_down = internal_profile_top_down(p);
    assert_eq!(
        top_down.as_deref(),
        Some(bottom_up.levels()),
        "internal profiles disagree for valid profile {p}"
    );
    Ok(bottom_up)
}

/// `n choose k` by the multiplicative formula; every intermediate quotient
/// is itself a binomial coefficient, so each division is exact.
pub fn binomial(n: u128, k: u128) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// The per-level factors `binom(2 i_k, l_{k+1})`, `k = 0..h`.
pub fn count_factors(p: &Profile) -> Result<Vec<BigUint>> {
    if p.height() == 0 {
        return Ok(Vec::new());
    }
    let internal = internal_profile(p)?;
    Ok(internal
        .levels()
        .iter()
        .zip(&p.levels()[1..])
        .map(|(&i, &l)| binomial(2 * i, l as u128))
        .collect())
}

/// Number of binary trees with profile `p`.
pub fn count_trees(p: &Profile) -> Result<BigUint> {
    Ok(count_factors(p)?.into_iter().product())
}

/// The valid profile of height `k + 1` obtained by turning every level-`k+1`
/// internal node into a leaf.
pub fn truncate_profile(p: &Profile, k: usize) -> Result<Profile> {
    let h = p.height();
    if h == 0 || k >= h {
        return Err(Error::LevelOutOfRange { level: k, height: h });
    }
    let internal = internal_profile(p)?;
    let below = internal.levels().get(k + 1).copied().unwrap_or(0);
    let mut levels = p.levels()[..=k].to_vec();
    let last = below + p.levels()[k + 1] as u128;
    levels.push(u64::try_from(last).expect("bounded by the leaf count"));
    Profile::new(levels)
}
