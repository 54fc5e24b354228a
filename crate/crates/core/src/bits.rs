//! Fair random bits with exact consumption accounting, and uniform integers
//! drawn from them with near-minimal entropy.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// A stream of fair bits that counts every bit handed out.
#[derive(Clone, Debug)]
pub struct BitSource<R = ChaCha8Rng> {
    rng: R,
    word: u64,
    left: u32,
    consumed: u64,
}

impl BitSource<ChaCha8Rng> {
    pub fn from_seed(seed: u64) -> Self {
        BitSource::new(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl<R: RngCore> BitSource<R> {
    pub fn new(rng: R) -> Self {
        BitSource {
            rng,
            word: 0,
            left: 0,
            consumed: 0,
        }
    }

    pub fn next_bit(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        let bit = self.word & 1 == 1;
        self.word >>= 1;
        self.left -= 1;
        self.consumed += 1;
        bit
    }

    pub fn bits_consumed(&self) -> u64 {
        self.consumed
    }
}

/// Replays a fixed bit string, then panics; for tests that pin exact draws.
#[derive(Clone, Debug)]
pub struct FixedBits {
    bits: Vec<bool>,
    pos: usize,
}

impl FixedBits {
    pub fn new(bits: impl IntoIterator<Item = bool>) -> Self {
        FixedBits {
            bits: bits.into_iter().collect(),
            pos: 0,
        }
    }
}

impl RngCore for FixedBits {
    fn next_u32(&mut self) -> u32 {
        self.next_u64() as u32
    }

    fn next_u64(&mut self) -> u64 {
        let mut w = 0u64;
        for i in 0..64 {
            let bit = *self.bits.get(self.pos).expect("fixed bit string exhausted");
            self.pos += 1;
            w |= (bit as u64) << i;
            if self.pos == self.bits.len() {
                break;
            }
        }
        w
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        rand_core::impls::fill_bytes_via_next(self, dst)
    }
}

/// A uniform integer in `[0, n)`.
///
/// Lumbroso's fast dice roller: keep a uniform value `c` in `[0, v)`, double
/// both with one fresh bit at a time, and once `v >= n` either accept `c < n`
/// or keep the rejected remainder `c - n`, uniform in `[0, v - n)`. Expected
/// consumption is below `log2(n) + 2` bits; `n = 1` consumes nothing.
pub fn draw_below<R: RngCore>(src: &mut BitSource<R>, n: &BigUint) -> Result<BigUint> {
    if n.is_zero() {
        return Err(Error::EmptyRange);
    }
    if let Some(small) = n.to_u64() {
        return Ok(BigUint::from(draw_below_u64(src, small)?));
    }
    let mut v = BigUint::one();
    let mut c = BigUint::zero();
    loop {
        v <<= 1;
        c <<= 1;
        if src.next_bit() {
            c += 1u32;
        }
        if &v >= n {
            if &c < n {
                return Ok(c);
            }
            v -= n;
            c -= n;
        }
    }
}

/// [`draw_below`] for machine-word bounds; consumes the same bits.
pub fn draw_below_u64<R: RngCore>(src: &mut BitSource<R>, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::EmptyRange);
    }
    let n = n as u128;
    let (mut v, mut c) = (1u128, 0u128);
    if n == 1 {
        return Ok(0);
    }
    loop {
        v <<= 1;
        c = (c << 1) | src.next_bit() as u128;
        if v >= n {
            if c < n {
                return Ok(c as u64);
            }
            v -= n;
            c -= n;
        }
    }
}
