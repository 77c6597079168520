//! A uniformly random real in `(0, 1)` revealed one 64-bit block at a time.
//!
//! After `B` bits the real lies in `[k / 2^B, (k + 1) / 2^B]`. A partial
//! quotient is reported only once the canonical expansions of both endpoints
//! agree through its index; every real in the closed interval then shares it.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const BLOCK_BITS: u64 = 64;
pub const DEFAULT_MAX_BITS: u64 = 1 << 16;
pub const QUOTIENT_CAP: u64 = 1 << 63;

/// Euclid state `num / rem` for one endpoint.
#[derive(Clone, Debug)]
struct Euclid {
    num: BigUint,
    rem: BigUint,
}

impl Euclid {
    fn new(num: BigUint, den: BigUint) -> Self {
        Self { num, rem: den }
    }

    /// Next quotient of the expansion of `num / rem`, or `None` once exhausted.
    fn step(&mut self) -> Option<BigUint> {
        if self.rem.is_zero() {
            return None;
        }
        let (a, r) = self.num.div_rem(&self.rem);
        self.num = std::mem::replace(&mut self.rem, r);
        Some(a)
    }
}

#[derive(Clone, Debug)]
pub struct DyadicSource {
    seed: u64,
    rng: ChaCha8Rng,
    head: u64,
    numerator: BigUint,
    bits: u64,
    max_bits: u64,
    /// Quotients `a_1, a_2, ...` proven so far.
    prefix: Vec<u64>,
    lower: Euclid,
    upper: Euclid,
    diverged: bool,
}

impl DyadicSource {
    pub fn new(seed: u64, initial_bits: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks = initial_bits.div_ceil(BLOCK_BITS).max(1);
        let head = rng.next_u64();
        let mut numerator = BigUint::from(head);
        for _ in 1..blocks {
            numerator = (numerator << BLOCK_BITS) | BigUint::from(rng.next_u64());
        }
        let bits = blocks * BLOCK_BITS;
        let (lower, upper) = endpoint_states(&numerator, bits);
        let mut source = Self {
            seed,
            rng,
            head,
            numerator,
            bits,
            max_bits: DEFAULT_MAX_BITS.max(bits),
            prefix: Vec::new(),
            lower,
            upper,
            diverged: false,
        };
        source.skip_integer_part();
        source
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn max_bits(&self) -> u64 {
        self.max_bits
    }

    pub fn set_max_bits(&mut self, max_bits: u64) {
        self.max_bits = max_bits.max(self.bits);
    }

    /// Quotients proven so far, without consuming more bits.
    pub fn known_prefix(&self) -> &[u64] {
        &self.prefix
    }

    /// Current enclosing interval as `(k, B)`: the real lies in
    /// `[k / 2^B, (k + 1) / 2^B]`.
    pub fn interval(&self) -> (&BigUint, u64) {
        (&self.numerator, self.bits)
    }

    /// The `n`-th partial quotient (`n >= 1`), consuming bits as needed.
    pub fn quotient(&mut self, n: usize) -> Result<u64> {
        while self.prefix.len() < n {
            if !self.advance()? {
                self.refine()?;
            }
        }
        Ok(self.prefix[n - 1])
    }

    /// Appends one 64-bit block and re-derives the common prefix, checking that
    /// previously reported quotients are unchanged.
    pub fn refine(&mut self) -> Result<()> {
        if self.bits + BLOCK_BITS > self.max_bits {
            return Err(Error::NeedsMoreBits { bits: self.bits });
        }
        let word = self.rng.next_u64();
        self.numerator = (std::mem::take(&mut self.numerator) << BLOCK_BITS) | BigUint::from(word);
        self.bits += BLOCK_BITS;
        let (lower, upper) = endpoint_states(&self.numerator, self.bits);
        self.lower = lower;
        self.upper = upper;
        self.diverged = false;
        self.skip_integer_part();
        let known = std::mem::take(&mut self.prefix);
        for (i, &a) in known.iter().enumerate() {
            let advanced = self.advance()?;
            if !advanced || self.prefix[i] != a {
                return Err(Error::Invariant(format!(
                    "dyadic refinement changed quotient a_{}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Exact comparison of the real with `num/den`, refining until the fraction
    /// falls outside the enclosing interval.
    pub fn compare(&mut self, num: &BigUint, den: &BigUint) -> Result<Ordering> {
        if let (Some(n), Some(d)) = (num.to_u64(), den.to_u64()) {
            if let Some(ord) = self.compare_head(n, d) {
                return Ok(ord);
            }
        }
        loop {
            let scaled = num << self.bits;
            let lo = &self.numerator * den;
            if scaled < lo {
                return Ok(Ordering::Greater);
            }
            let hi = lo + den;
            if scaled > hi {
                return Ok(Ordering::Less);
            }
            self.refine()?;
        }
    }

    /// Same as [`compare`](Self::compare) for machine-sized fractions.
    pub fn compare_u64(&mut self, num: u64, den: u64) -> Result<Ordering> {
        match self.compare_head(num, den) {
            Some(ord) => Ok(ord),
            None => self.compare(&BigUint::from(num), &BigUint::from(den)),
        }
    }

    /// Decides using only the first 64 bits when `num/den` is outside
    /// `[head / 2^64, (head + 1) / 2^64]`.
    fn compare_head(&self, num: u64, den: u64) -> Option<Ordering> {
        let scaled = (num as u128) << 64;
        let lo = self.head as u128 * den as u128;
        if scaled < lo {
            return Some(Ordering::Greater);
        }
        let hi = lo + den as u128;
        if scaled > hi {
            return Some(Ordering::Less);
        }
        None
    }

    /// Tries to prove one more quotient from the current interval.
    fn advance(&mut self) -> Result<bool> {
        if self.diverged {
            return Ok(false);
        }
        match (self.lower.step(), self.upper.step()) {
            (Some(a), Some(b)) if a == b => {
                let index = self.prefix.len() + 1;
                let value = a
                    .to_u64()
                    .filter(|&v| v <= QUOTIENT_CAP)
                    .ok_or(Error::QuotientOverflow { index })?;
                self.prefix.push(value);
                Ok(true)
            }
            _ => {
                self.diverged = true;
                Ok(false)
            }
        }
    }

    fn skip_integer_part(&mut self) {
        let a = self.lower.step();
        let b = self.upper.step();
        if a != b || a.is_none() {
            self.diverged = true;
        }
    }
}

fn endpoint_states(numerator: &BigUint, bits: u64) -> (Euclid, Euclid) {
    let den = BigUint::one() << bits;
    let lower = Euclid::new(numerator.clone(), den.clone());
    let upper = Euclid::new(numerator + 1u32, den);
    (lower, upper)
}
