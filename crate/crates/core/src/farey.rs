//! Farey neighbors, the indicator `chi_beta`, its exact expectation and
//! Farey enumeration.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive};

use crate::arith::{is_prime_u64, mod_inverse_big, mod_inverse_u64, reciprocal_sum, Sieve};
use crate::cf::{is_integer, PartialQuotientStream};
use crate::error::{Error, Result};
use crate::exact::FareyFraction;

/// The neighbors `beta' < beta < beta''` of `beta` in `F_{h(beta)}`.
///
/// `upper` lives in `(0, 1]`; the value 1 stands for the zero class
/// approached from below.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborPair {
    pub lower: FareyFraction,
    pub upper: Ratio<BigUint>,
}

impl NeighborPair {
    pub fn lower_height(&self) -> &BigUint {
        self.lower.height()
    }

    pub fn upper_height(&self) -> &BigUint {
        self.upper.denom()
    }

    /// `beta'' - beta'`.
    pub fn width(&self) -> BigRational {
        let upper = BigRational::new(
            BigInt::from(self.upper.numer().clone()),
            BigInt::from(self.upper.denom().clone()),
        );
        upper - self.lower.to_ratio()
    }
}

/// Neighbors via the modular inverse of the numerator: the lower neighbor
/// `c/d` solves `a d - c q = 1` with `0 < d <= q`, and the upper neighbor has
/// height `q - d`.
pub fn farey_neighbors(beta: &FareyFraction) -> Result<NeighborPair> {
    let q = beta.denominator();
    if q.is_one() {
        return Err(Error::NoNeighbors);
    }
    let a = beta.numerator();
    if let (Some(a), Some(q)) = (a.to_u64(), q.to_u64()) {
        let ((c, d), (e, f)) = neighbors_u64(a, q);
        return Ok(NeighborPair {
            lower: FareyFraction::from_u64(c, d)?,
            upper: Ratio::new_raw(BigUint::from(e), BigUint::from(f)),
        });
    }
    let d = mod_inverse_big(a, q).ok_or_else(|| Error::Invariant(format!("{beta} not reduced")))?;
    let c = (a * &d - 1u32) / q;
    let f = q - &d;
    let e = (a * &f + 1u32) / q;
    Ok(NeighborPair {
        lower: FareyFraction::new(c, d)?,
        upper: Ratio::new_raw(e, f),
    })
}

/// Machine-word version of [`farey_neighbors`] for `1 <= a < q`, `gcd = 1`:
/// returns `((c, d), (e, f))`.
pub fn neighbors_u64(a: u64, q: u64) -> ((u64, u64), (u64, u64)) {
    let d = mod_inverse_u64(a, q).expect("numerator is a unit mod q");
    let c = ((a as u128 * d as u128 - 1) / q as u128) as u64;
    let f = q - d;
    let e = ((a as u128 * f as u128 + 1) / q as u128) as u64;
    ((c, d), (e, f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChiValue {
    Zero,
    Half,
    One,
}

impl ChiValue {
    /// The value in units of 1/2.
    pub fn half_units(self) -> u64 {
        match self {
            ChiValue::Zero => 0,
            ChiValue::Half => 1,
            ChiValue::One => 2,
        }
    }

    pub fn to_ratio(self) -> BigRational {
        BigRational::new(BigInt::from(self.half_units()), BigInt::from(2))
    }
}

impl fmt::Display for ChiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChiValue::Zero => "0",
            ChiValue::Half => "1/2",
            ChiValue::One => "1",
        })
    }
}

/// `chi_beta(x)`: 1 on the open neighbor interval, 1/2 at its endpoints and
/// 0 outside; identically 1 for the zero class.
pub fn chi(beta: &FareyFraction, x: &mut PartialQuotientStream) -> Result<ChiValue> {
    match farey_neighbors(beta) {
        Err(Error::NoNeighbors) => Ok(ChiValue::One),
        Err(e) => Err(e),
        Ok(pair) => chi_with_neighbors(&pair, x),
    }
}

/// `chi` given precomputed neighbors.
pub fn chi_with_neighbors(pair: &NeighborPair, x: &mut PartialQuotientStream) -> Result<ChiValue> {
    if let Some(value) = x.rational_value() {
        // x = 0 in R/Z coincides with the upper endpoint 1.
        if is_integer(value) && pair.upper.is_one() {
            return Ok(ChiValue::Half);
        }
    }
    let lower = x.compare_fractional(pair.lower.numerator(), pair.lower.denominator())?;
    match lower {
        Ordering::Less => return Ok(ChiValue::Zero),
        Ordering::Equal => return Ok(ChiValue::Half),
        Ordering::Greater => {}
    }
    Ok(match x.compare_fractional(pair.upper.numer(), pair.upper.denom())? {
        Ordering::Less => ChiValue::One,
        Ordering::Equal => ChiValue::Half,
        Ordering::Greater => ChiValue::Zero,
    })
}

/// `chi` for neighbors `c/d < beta < e/f` held in machine words.
pub fn chi_u64(x: &mut PartialQuotientStream, lower: (u64, u64), upper: (u64, u64)) -> Result<ChiValue> {
    if let Some(value) = x.rational_value() {
        if is_integer(value) && upper.0 == upper.1 {
            return Ok(ChiValue::Half);
        }
    }
    match x.compare_fractional_u64(lower.0, lower.1)? {
        Ordering::Less => return Ok(ChiValue::Zero),
        Ordering::Equal => return Ok(ChiValue::Half),
        Ordering::Greater => {}
    }
    Ok(match x.compare_fractional_u64(upper.0, upper.1)? {
        Ordering::Less => ChiValue::One,
        Ordering::Equal => ChiValue::Half,
        Ordering::Greater => ChiValue::Zero,
    })
}

/// `E(chi_beta) = 1 / (h(beta') h(beta''))`; 1 for the zero class.
pub fn expected_chi(beta: &FareyFraction) -> BigRational {
    match farey_neighbors(beta) {
        Ok(pair) => BigRational::new(
            BigInt::one(),
            BigInt::from(pair.lower_height() * pair.upper_height()),
        ),
        Err(_) => BigRational::one(),
    }
}

/// `F_Q` in increasing order starting at `0/1`, by the next-term recurrence.
pub fn enumerate_farey(order: u64) -> FareyIter {
    FareyIter {
        inner: FareyPairs::new(order),
    }
}

pub struct FareyIter {
    inner: FareyPairs,
}

impl Iterator for FareyIter {
    type Item = FareyFraction;

    fn next(&mut self) -> Option<FareyFraction> {
        self.inner
            .next()
            .map(|(a, q)| FareyFraction::from_u64(a, q).expect("Farey terms are reduced"))
    }
}

/// `(numerator, denominator)` pairs of `F_Q` in increasing order.
#[derive(Clone, Debug)]
pub struct FareyPairs {
    order: u64,
    current: (u64, u64),
    next: (u64, u64),
    done: bool,
}

impl FareyPairs {
    pub fn new(order: u64) -> Self {
        assert!(order >= 1, "Farey order must be positive");
        Self {
            order,
            current: (0, 1),
            next: (1, order),
            done: false,
        }
    }
}

impl Iterator for FareyPairs {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        if self.done {
            return None;
        }
        let out = self.current;
        if self.next == (1, 1) {
            self.done = true;
        } else {
            let (a, b) = self.current;
            let (c, d) = self.next;
            let k = (self.order + b) / d;
            self.current = self.next;
            self.next = (k * c - a, k * d - b);
        }
        Some(out)
    }
}

/// `E(sum over h(beta) = q of chi_beta)`, exactly.
pub fn row_sum_exact(q: u64) -> BigRational {
    assert!(q >= 2, "row sums start at q = 2");
    reciprocal_sum(row_denominators(q))
}

fn row_denominators(q: u64) -> impl Iterator<Item = u64> {
    (1..q).filter_map(move |a| {
        mod_inverse_u64(a, q).map(|_| {
            let ((_, d), (_, f)) = neighbors_u64(a, q);
            d * f
        })
    })
}

/// `2 phi(q)/q^2 (log q + sum_{p | q} log p / (p - 1) + c_0)`, without the
/// `O(log log q / q^2)` remainder.
pub fn row_sum_formula(q: u64) -> f64 {
    assert!(q >= 2, "row sums start at q = 2");
    let mut primes = Vec::new();
    let mut n = q;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            primes.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    let phi = primes.iter().fold(q, |acc, &p| acc / p * (p - 1)) as f64;
    let prime_sum: f64 = primes.iter().map(|&p| (p as f64).ln() / (p as f64 - 1.0)).sum();
    let qf = q as f64;
    2.0 * phi / (qf * qf) * (qf.ln() + prime_sum + crate::arith::euler_gamma())
}

/// `(sum_{q=2}^{Q} row_sum_exact(q), (6/pi^2) (log Q)^2)`.
pub fn cumulative_expected_count(order: u64) -> (BigRational, f64) {
    assert!(order >= 2, "cumulative counts start at Q = 2");
    let exact = reciprocal_sum((2..=order).flat_map(row_denominators));
    let lq = (order as f64).ln();
    (exact, 6.0 / std::f64::consts::PI.powi(2) * lq * lq)
}

/// A set of heights, as used by the divergence functional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightSet {
    All,
    Primes,
    Residue { modulus: u64, residue: u64 },
    Explicit(BTreeSet<u64>),
}

impl HeightSet {
    pub fn contains(&self, q: u64) -> bool {
        match self {
            HeightSet::All => true,
            HeightSet::Primes => is_prime_u64(q),
            HeightSet::Residue { modulus, residue } => q % modulus == *residue,
            HeightSet::Explicit(set) => set.contains(&q),
        }
    }
}

impl FromStr for HeightSet {
    type Err = Error;

    /// `all`, `primes`, `mod:d,r` or `file:<path>` (one integer per line).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "all" => return Ok(HeightSet::All),
            "primes" => return Ok(HeightSet::Primes),
            _ => {}
        }
        if let Some(body) = s.strip_prefix("mod:") {
            let (d, r) = body
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected `mod:d,r`, got `{s}`")))?;
            let modulus: u64 = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad modulus in `{s}`")))?;
            let residue: u64 = r
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad residue in `{s}`")))?;
            if modulus == 0 || residue >= modulus {
                return Err(Error::Parse(format!("need 0 <= r < d in `{s}`")));
            }
            return Ok(HeightSet::Residue { modulus, residue });
        }
        if let Some(path) = s.strip_prefix("file:") {
            let text = std::fs::read_to_string(path)?;
            return parse_height_list(&text).map(HeightSet::Explicit);
        }
        Err(Error::Parse(format!("unknown height set `{s}`")))
    }
}

impl fmt::Display for HeightSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightSet::All => f.write_str("all"),
            HeightSet::Primes => f.write_str("primes"),
            HeightSet::Residue { modulus, residue } => write!(f, "mod:{modulus},{residue}"),
            HeightSet::Explicit(set) => write!(f, "explicit({} heights)", set.len()),
        }
    }
}

pub fn parse_height_list(text: &str) -> Result<BTreeSet<u64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad height `{l}`")))
        })
        .collect()
}

/// `sum_{q <= X, q in set} phi(q) log q / q^2`.
pub fn divergence_functional(set: &HeightSet, x_max: u64) -> f64 {
    let limit = u32::try_from(x_max).expect("height bound fits in u32");
    let sieve = Sieve::new(limit);
    (2..=limit)
        .filter(|&q| set.contains(q as u64))
        .map(|q| {
            let qf = q as f64;
            sieve.totient(q) as f64 * qf.ln() / (qf * qf)
        })
        .sum()
}
