use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::FareyFraction;

/// Canonical finite expansion `[a0; a1, ..., aL]` of a rational number.
///
/// All `a_i >= 1` for `i >= 1`, and `a_L >= 2` whenever `L >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    a0: BigInt,
    quotients: Vec<BigUint>,
}

impl ContinuedFraction {
    pub fn new(a0: BigInt, quotients: Vec<BigUint>) -> Result<Self> {
        let cf = Self { a0, quotients };
        let ones_ok = cf.quotients.iter().all(|a| !a.is_zero());
        let tail_ok = cf.quotients.last().map_or(true, |a| *a >= BigUint::from(2u32));
        if !ones_ok || !tail_ok {
            return Err(Error::NotCanonical(cf.to_string()));
        }
        Ok(cf)
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    /// `a_1, ..., a_L`.
    pub fn quotients(&self) -> &[BigUint] {
        &self.quotients
    }

    /// Number of partial quotients after `a0`.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn value(&self) -> BigRational {
        value_of_cf(self)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.a0)?;
        for (i, a) in self.quotients.iter().enumerate() {
            let sep = if i == 0 { "; " } else { ", " };
            write!(f, "{sep}{a}")?;
        }
        write!(f, "]")
    }
}

/// Canonical expansion of `numerator/denominator` by the Euclidean algorithm
/// with floor division.
pub fn cf_of_rational(numerator: &BigInt, denominator: &BigUint) -> Result<ContinuedFraction> {
    if denominator.is_zero() {
        return Err(Error::InvalidDenominator);
    }
    let den = BigInt::from(denominator.clone());
    let (a0, r) = numerator.div_mod_floor(&den);
    let mut quotients = Vec::new();
    // remaining value is den / r
    let (mut num, mut rem) = (den, r);
    while !rem.is_zero() {
        let (a, next) = num.div_mod_floor(&rem);
        quotients.push(a.magnitude().clone());
        num = rem;
        rem = next;
    }
    Ok(ContinuedFraction { a0, quotients })
}

pub fn cf_of_fraction(beta: &FareyFraction) -> ContinuedFraction {
    cf_of_rational(&BigInt::from(beta.numerator().clone()), beta.denominator())
        .expect("Farey fractions have positive denominators")
}

pub fn cf_of_ratio(r: &BigRational) -> ContinuedFraction {
    cf_of_rational(r.numer(), r.denom().magnitude()).expect("ratio denominators are nonzero")
}

/// Exact value by backward evaluation.
pub fn value_of_cf(cf: &ContinuedFraction) -> BigRational {
    // h/k = [a_i; ...]
    let mut value: Option<BigRational> = None;
    for a in cf.quotients.iter().rev() {
        let a = BigRational::from_integer(BigInt::from(a.clone()));
        value = Some(match value {
            None => a,
            Some(v) => a + v.recip(),
        });
    }
    let a0 = BigRational::from_integer(cf.a0.clone());
    match value {
        None => a0,
        Some(v) => a0 + v.recip(),
    }
}

/// Terminal partial quotient `a_L` of the canonical expansion of `beta`, with
/// the zero class taken as the expansion `[1]` (so the result is 1).
pub fn terminal_quotient(beta: &FareyFraction) -> BigUint {
    if beta.is_zero_class() {
        return BigUint::one();
    }
    if let (Some(p), Some(q)) = (beta.numerator().to_u64(), beta.denominator().to_u64()) {
        return BigUint::from(terminal_quotient_u64(p, q));
    }
    cf_of_fraction(beta)
        .quotients()
        .last()
        .cloned()
        .unwrap_or_else(BigUint::one)
}

/// `a_L` for the reduced fraction `p/q` in `[0, 1)`; 1 for `0/1`.
pub fn terminal_quotient_u64(p: u64, q: u64) -> u64 {
    if p == 0 {
        return 1;
    }
    let (mut num, mut rem) = (q, p);
    loop {
        let a = num / rem;
        let next = num % rem;
        if next == 0 {
            return a;
        }
        num = rem;
        rem = next;
    }
}
