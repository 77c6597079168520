//! Reduced fractions modulo one, mediants and heights.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A representative in `[0, 1)` of an element of `Q/Z`, in lowest terms.
///
/// The class of zero is stored as `0/1`; it is the only element of height 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FareyFraction {
    numerator: BigUint,
    denominator: BigUint,
}

impl FareyFraction {
    pub fn new(numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidDenominator);
        }
        let reduced = numerator.gcd(&denominator).is_one();
        let in_range = numerator < denominator;
        if !reduced || !in_range {
            return Err(Error::NotFareyFraction(format!("{numerator}/{denominator}")));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn from_u64(numerator: u64, denominator: u64) -> Result<Self> {
        Self::new(BigUint::from(numerator), BigUint::from(denominator))
    }

    pub fn zero() -> Self {
        Self {
            numerator: BigUint::zero(),
            denominator: BigUint::one(),
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn height(&self) -> &BigUint {
        &self.denominator
    }

    pub fn is_zero_class(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new_raw(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator.clone()),
        )
    }
}

impl Ord for FareyFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.numerator * &other.denominator).cmp(&(&other.numerator * &self.denominator))
    }
}

impl PartialOrd for FareyFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FareyFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for FareyFraction {
    type Err = Error;

    /// Parses `a/q` and reduces it mod 1.
    fn from_str(s: &str) -> Result<Self> {
        let pair: RawPair = s.parse()?;
        pair.reduce_mod1()
    }
}

/// Reduced representative of `a/q mod 1` in `[0, 1)`.
pub fn reduce_mod1(a: &BigInt, q: &BigInt) -> Result<FareyFraction> {
    if !q.is_positive() {
        return Err(Error::InvalidDenominator);
    }
    let g = a.gcd(q);
    let (a, q) = if g.is_one() || g.is_zero() {
        (a.clone(), q.clone())
    } else {
        (a / &g, q / &g)
    };
    let r = a.mod_floor(&q);
    Ok(FareyFraction {
        numerator: r.magnitude().clone(),
        denominator: q.magnitude().clone(),
    })
}

/// An unreduced fraction `numerator/denominator` with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPair {
    pub numerator: BigInt,
    pub denominator: BigUint,
}

impl RawPair {
    pub fn new(numerator: BigInt, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidDenominator);
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn from_i64(numerator: i64, denominator: u64) -> Result<Self> {
        Self::new(BigInt::from(numerator), BigUint::from(denominator))
    }

    pub fn reduce_mod1(&self) -> Result<FareyFraction> {
        reduce_mod1(&self.numerator, &BigInt::from(self.denominator.clone()))
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(
            self.numerator.clone(),
            BigInt::from(self.denominator.clone()),
        )
    }

    pub fn is_reduced(&self) -> bool {
        self.numerator.magnitude().gcd(&self.denominator).is_one()
    }
}

impl From<&FareyFraction> for RawPair {
    fn from(b: &FareyFraction) -> Self {
        Self {
            numerator: BigInt::from_biguint(Sign::Plus, b.numerator.clone()),
            denominator: b.denominator.clone(),
        }
    }
}

impl fmt::Display for RawPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for RawPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected `p/q`, got `{s}`")))?;
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let q: BigUint = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        Self::new(p, q)
    }
}

/// `(p1 + p2) / (q1 + q2)`, unreduced.
pub fn mediant(x: &RawPair, y: &RawPair) -> RawPair {
    RawPair {
        numerator: &x.numerator + &y.numerator,
        denominator: &x.denominator + &y.denominator,
    }
}

pub fn height(b: &FareyFraction) -> BigUint {
    b.denominator.clone()
}

/// `p2 q1 - p1 q2 == 1` for `left = p1/q1`, `right = p2/q2`.
pub fn is_unimodular(left: &RawPair, right: &RawPair) -> bool {
    let lhs = &right.numerator * BigInt::from(left.denominator.clone());
    let rhs = &left.numerator * BigInt::from(right.denominator.clone());
    (lhs - rhs).is_one()
}
