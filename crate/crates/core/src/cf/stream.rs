use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic::{DyadicSource, QUOTIENT_CAP};
use super::expansion::{cf_of_ratio, cf_of_rational, ContinuedFraction};
use crate::error::{Error, Result};

/// A real number `x` given by its exact partial quotients `a_1, a_2, ...`.
///
/// Rational and periodic streams are immutable in effect; a dyadic stream
/// consumes random bits on demand and needs `&mut` access for queries.
#[derive(Clone, Debug)]
pub struct PartialQuotientStream {
    source: Source,
}

#[derive(Clone, Debug)]
enum Source {
    Rational {
        value: BigRational,
        expansion: ContinuedFraction,
    },
    Periodic {
        a0: BigInt,
        preperiod: Vec<u64>,
        period: Vec<u64>,
    },
    Dyadic(Box<DyadicSource>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamKind {
    Rational,
    Periodic,
    Dyadic,
}

impl PartialQuotientStream {
    pub fn rational(numerator: BigInt, denominator: BigUint) -> Result<Self> {
        let expansion = cf_of_rational(&numerator, &denominator)?;
        let value = BigRational::new(numerator, BigInt::from(denominator));
        Ok(Self {
            source: Source::Rational { value, expansion },
        })
    }

    pub fn from_ratio(value: BigRational) -> Self {
        let expansion = cf_of_ratio(&value);
        Self {
            source: Source::Rational { value, expansion },
        }
    }

    /// `[a0; preperiod..., period, period, ...]`; the period must be nonempty
    /// and every quotient positive.
    pub fn periodic(a0: BigInt, preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("periodic stream needs a nonempty period".into()));
        }
        if preperiod.iter().chain(&period).any(|&a| a == 0) {
            return Err(Error::Parse("partial quotients must be positive".into()));
        }
        if preperiod.iter().chain(&period).any(|&a| a > QUOTIENT_CAP) {
            return Err(Error::QuotientOverflow { index: 0 });
        }
        Ok(Self {
            source: Source::Periodic {
                a0,
                preperiod,
                period,
            },
        })
    }

    /// `[0; 1, 1, 1, ...]`.
    pub fn golden() -> Self {
        Self::periodic(BigInt::zero(), vec![], vec![1]).expect("valid period")
    }

    /// Uniform random real in `(0, 1)` driven by the seeded bit source.
    pub fn dyadic(seed: u64, initial_bits: u64) -> Self {
        Self {
            source: Source::Dyadic(Box::new(DyadicSource::new(seed, initial_bits))),
        }
    }

    pub fn kind(&self) -> StreamKind {
        match self.source {
            Source::Rational { .. } => StreamKind::Rational,
            Source::Periodic { .. } => StreamKind::Periodic,
            Source::Dyadic(_) => StreamKind::Dyadic,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.kind() == StreamKind::Rational
    }

    pub fn a0(&self) -> BigInt {
        match &self.source {
            Source::Rational { expansion, .. } => expansion.a0().clone(),
            Source::Periodic { a0, .. } => a0.clone(),
            Source::Dyadic(_) => BigInt::zero(),
        }
    }

    pub fn dyadic_source(&self) -> Option<&DyadicSource> {
        match &self.source {
            Source::Dyadic(d) => Some(d),
            _ => None,
        }
    }

    pub fn dyadic_source_mut(&mut self) -> Option<&mut DyadicSource> {
        match &mut self.source {
            Source::Dyadic(d) => Some(d),
            _ => None,
        }
    }

    /// Exact value for rational streams.
    pub fn rational_value(&self) -> Option<&BigRational> {
        match &self.source {
            Source::Rational { value, .. } => Some(value),
            _ => None,
        }
    }

    /// `a_n` for `n >= 1`, or `None` when a rational expansion has ended.
    pub fn try_quotient(&mut self, n: usize) -> Result<Option<u64>> {
        assert!(n >= 1, "partial quotients are indexed from 1");
        match &mut self.source {
            Source::Rational { expansion, .. } => match expansion.quotients().get(n - 1) {
                None => Ok(None),
                Some(a) => a
                    .to_u64()
                    .filter(|&v| v <= QUOTIENT_CAP)
                    .map(Some)
                    .ok_or(Error::QuotientOverflow { index: n }),
            },
            Source::Periodic {
                preperiod, period, ..
            } => {
                let i = n - 1;
                Ok(Some(if i < preperiod.len() {
                    preperiod[i]
                } else {
                    period[(i - preperiod.len()) % period.len()]
                }))
            }
            Source::Dyadic(d) => d.quotient(n).map(Some),
        }
    }

    /// `a_n` for `n >= 1`; a finished rational expansion is an error.
    pub fn quotient(&mut self, n: usize) -> Result<u64> {
        match self.try_quotient(n)? {
            Some(a) => Ok(a),
            None => Err(Error::OutOfQuotients {
                index: n,
                length: self.expansion_len().unwrap_or(0),
            }),
        }
    }

    /// `[a_1, ..., a_n]`.
    pub fn quotients(&mut self, n: usize) -> Result<Vec<u64>> {
        (1..=n).map(|i| self.quotient(i)).collect()
    }

    /// Length `L` of a rational expansion.
    pub fn expansion_len(&self) -> Option<usize> {
        match &self.source {
            Source::Rational { expansion, .. } => Some(expansion.len()),
            _ => None,
        }
    }

    /// Exact ordering of `x` against `r`.
    pub fn compare_rational(&mut self, r: &BigRational) -> Result<Ordering> {
        match &mut self.source {
            Source::Rational { value, .. } => Ok((*value).cmp(r)),
            Source::Dyadic(d) => {
                if !r.is_positive() {
                    return Ok(Ordering::Greater);
                }
                if *r >= BigRational::one() {
                    return Ok(Ordering::Less);
                }
                d.compare(r.numer().magnitude(), r.denom().magnitude())
            }
            Source::Periodic { .. } => {
                let expansion = cf_of_ratio(r);
                self.compare_irrational_with(&expansion)
            }
        }
    }

    /// Ordering of the fractional part `x - a0` against `num/den` in `[0, 1]`.
    pub fn compare_fractional(&mut self, num: &BigUint, den: &BigUint) -> Result<Ordering> {
        if let Source::Dyadic(d) = &mut self.source {
            return d.compare(num, den);
        }
        let shifted = BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
            + BigRational::from_integer(self.a0());
        self.compare_rational(&shifted)
    }

    /// Fast path of [`compare_fractional`](Self::compare_fractional).
    pub fn compare_fractional_u64(&mut self, num: u64, den: u64) -> Result<Ordering> {
        if let Source::Dyadic(d) = &mut self.source {
            return d.compare_u64(num, den);
        }
        self.compare_fractional(&BigUint::from(num), &BigUint::from(den))
    }

    /// Alternating lexicographic comparison of an infinite expansion against
    /// the canonical expansion of a rational.
    fn compare_irrational_with(&mut self, r: &ContinuedFraction) -> Result<Ordering> {
        // index 0
        let mut slot = self.a0().cmp(r.a0());
        let mut index = 0usize;
        if slot == Ordering::Equal {
            for (i, b) in r.quotients().iter().enumerate() {
                let a = BigUint::from(self.quotient(i + 1)?);
                index = i + 1;
                slot = a.cmp(b);
                if slot != Ordering::Equal {
                    break;
                }
            }
            if slot == Ordering::Equal {
                // x continues past the end of r, so its slot at the last index
                // of r is strictly larger.
                index = r.len();
                slot = Ordering::Greater;
            }
        }
        Ok(if index % 2 == 0 { slot } else { slot.reverse() })
    }
}

impl fmt::Display for PartialQuotientStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Source::Rational { value, .. } => write!(f, "rational:{value}"),
            Source::Periodic {
                a0,
                preperiod,
                period,
            } => {
                let join = |v: &[u64]| {
                    v.iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                write!(f, "periodic:[{a0};{}|{}]", join(preperiod), join(period))
            }
            Source::Dyadic(d) => write!(f, "dyadic:seed={},bits={}", d.seed(), d.bits()),
        }
    }
}

impl FromStr for PartialQuotientStream {
    type Err = Error;

    /// `rational:p/q`, `periodic:[a0;pre...|per...]` or
    /// `dyadic:seed=<u64>,bits=<B>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "golden" {
            return Ok(Self::golden());
        }
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("stream spec `{s}` has no kind prefix")))?;
        match kind {
            "rational" => {
                let pair: crate::exact::RawPair = body.parse()?;
                Self::rational(pair.numerator, pair.denominator)
            }
            "periodic" => parse_periodic(body),
            "dyadic" => parse_dyadic(body),
            other => Err(Error::Parse(format!("unknown stream kind `{other}`"))),
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad partial quotient `{t}`")))
        })
        .collect()
}

fn parse_periodic(body: &str) -> Result<PartialQuotientStream> {
    let inner = body
        .trim()
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("periodic spec `{body}` must be `[a0;pre|per]`")))?;
    let (a0, rest) = inner
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("periodic spec `{body}` is missing `;`")))?;
    let (pre, per) = rest
        .split_once('|')
        .ok_or_else(|| Error::Parse(format!("periodic spec `{body}` is missing `|`")))?;
    let a0: BigInt = a0
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad a0 in `{body}`")))?;
    PartialQuotientStream::periodic(a0, parse_list(pre)?, parse_list(per)?)
}

fn parse_dyadic(body: &str) -> Result<PartialQuotientStream> {
    let mut seed = None;
    let mut bits = 256u64;
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad dyadic field `{part}`")))?;
        let value: u64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad number in `{part}`")))?;
        match key.trim() {
            "seed" => seed = Some(value),
            "bits" => bits = value,
            other => return Err(Error::Parse(format!("unknown dyadic field `{other}`"))),
        }
    }
    let seed = seed.ok_or_else(|| Error::Parse("dyadic spec needs `seed=`".into()))?;
    if bits < 64 {
        return Err(Error::Parse("dyadic streams start with at least 64 bits".into()));
    }
    Ok(PartialQuotientStream::dyadic(seed, bits))
}

/// True when `num/den` is an integer (used for the `0 = 1` identification).
pub(crate) fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one() || r.numer().is_multiple_of(r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn golden_quotients() {
        let mut g = PartialQuotientStream::golden();
        for n in [1, 2, 10, 1000] {
            assert_eq!(g.quotient(n).unwrap(), 1);
        }
    }

    #[test]
    fn rational_quotients_and_end() {
        let mut x: PartialQuotientStream = "rational:2/5".parse().unwrap();
        assert_eq!(x.quotient(2).unwrap(), 2);
        assert_eq!(x.try_quotient(3).unwrap(), None);
        assert_eq!(
            x.quotient(3),
            Err(Error::OutOfQuotients {
                index: 3,
                length: 2
            })
        );
    }

    #[test]
    fn comparisons() {
        let mut g = PartialQuotientStream::golden();
        assert_eq!(g.compare_rational(&ratio(1, 2)).unwrap(), Ordering::Greater);
        assert_eq!(g.compare_rational(&ratio(2, 3)).unwrap(), Ordering::Less);
        assert_eq!(g.compare_rational(&ratio(3, 5)).unwrap(), Ordering::Greater);
        assert_eq!(g.compare_rational(&ratio(5, 8)).unwrap(), Ordering::Less);
        assert_eq!(g.compare_rational(&ratio(0, 1)).unwrap(), Ordering::Greater);
        assert_eq!(g.compare_rational(&ratio(1, 1)).unwrap(), Ordering::Less);
        assert_eq!(g.compare_rational(&ratio(-3, 1)).unwrap(), Ordering::Greater);
        let mut r: PartialQuotientStream = "rational:2/5".parse().unwrap();
        assert_eq!(r.compare_rational(&ratio(2, 5)).unwrap(), Ordering::Equal);
    }

    #[test]
    fn periodic_comparison_agrees_with_float() {
        // sqrt(2) - 1 = [0; 2, 2, 2, ...]
        let mut s: PartialQuotientStream = "periodic:[0;|2]".parse().unwrap();
        let target = 2f64.sqrt() - 1.0;
        for q in 1..60i64 {
            for p in 0..=q {
                let ord = s.compare_rational(&ratio(p, q)).unwrap();
                let expected = target.partial_cmp(&(p as f64 / q as f64)).unwrap();
                assert_eq!(ord, expected, "{p}/{q}");
            }
        }
    }

    #[test]
    fn dyadic_comparison_agrees_with_quotient_prefix() {
        // Any real compares with p/q the same way its own convergents do.
        let mut s = PartialQuotientStream::dyadic(11, 256);
        let a = s.quotients(20).unwrap();
        let mut lex = PartialQuotientStream::periodic(BigInt::zero(), a, vec![1]).unwrap();
        for q in 1..80i64 {
            for p in 1..q {
                let r = ratio(p, q);
                assert_eq!(
                    s.compare_rational(&r).unwrap(),
                    lex.compare_rational(&r).unwrap(),
                    "{p}/{q}"
                );
            }
        }
    }

    #[test]
    fn spec_parsing() {
        let s: PartialQuotientStream = "periodic:[0;2,3|1]".parse().unwrap();
        assert_eq!(s.to_string(), "periodic:[0;2,3|1]");
        let mut d: PartialQuotientStream = "dyadic:seed=7,bits=128".parse().unwrap();
        assert_eq!(d.kind(), StreamKind::Dyadic);
        let mut d2 = PartialQuotientStream::dyadic(7, 128);
        assert_eq!(d.quotients(30).unwrap(), d2.quotients(30).unwrap());
        assert!("periodic:[0;1|]".parse::<PartialQuotientStream>().is_err());
        assert!("dyadic:bits=64".parse::<PartialQuotientStream>().is_err());
        assert!("dyadic:seed=1,bits=8".parse::<PartialQuotientStream>().is_err());
        assert!("float:0.5".parse::<PartialQuotientStream>().is_err());
        assert!("rational:1/0".parse::<PartialQuotientStream>().is_err());
    }

    #[test]
    fn fractional_comparison_shifts_by_a0() {
        let mut x: PartialQuotientStream = "rational:355/113".parse().unwrap();
        // 355/113 - 3 = 16/113
        let ord = x
            .compare_fractional(&BigUint::from(16u32), &BigUint::from(113u32))
            .unwrap();
        assert_eq!(ord, Ordering::Equal);
        assert!(is_integer(&ratio(6, 3)));
    }
}
