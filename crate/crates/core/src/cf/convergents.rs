use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::stream::PartialQuotientStream;
use crate::error::{Error, Result};
use crate::exact::{mediant, FareyFraction, RawPair};

/// `p_n / q_n` with its index.
///
/// Initialized by `p_{-1} = 1, p_{-2} = 0, q_{-1} = 0, q_{-2} = 1`, so that
/// `E_n = { [a0; a_1, ..., a_{n-1}, m] : 1 <= m <= a_n }` holds exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentPair {
    pub index: i64,
    pub p: BigInt,
    pub q: BigUint,
}

impl ConvergentPair {
    pub fn as_raw(&self) -> RawPair {
        RawPair {
            numerator: self.p.clone(),
            denominator: self.q.clone(),
        }
    }

    fn minus_two() -> Self {
        Self {
            index: -2,
            p: BigInt::zero(),
            q: BigUint::one(),
        }
    }

    fn minus_one() -> Self {
        Self {
            index: -1,
            p: BigInt::one(),
            q: BigUint::zero(),
        }
    }

    fn next(&self, prev: &Self, a: &BigUint) -> Self {
        Self {
            index: self.index + 1,
            p: BigInt::from(a.clone()) * &self.p + &prev.p,
            q: a * &self.q + &prev.q,
        }
    }
}

/// `p_n/q_n` for `n = 0..=n_max`.
pub fn convergents(x: &mut PartialQuotientStream, n_max: usize) -> Result<Vec<ConvergentPair>> {
    let mut prev = ConvergentPair::minus_two();
    let mut cur = ConvergentPair::minus_one();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let a = if n == 0 {
            x.a0()
        } else {
            BigInt::from(x.quotient(n)?)
        };
        let next = ConvergentPair {
            index: cur.index + 1,
            p: &a * &cur.p + &prev.p,
            q: (a.magnitude() * &cur.q) + &prev.q,
        };
        prev = std::mem::replace(&mut cur, next);
        out.push(cur.clone());
    }
    Ok(out)
}

/// `N(Q, x)` and `a(Q, x)`.
///
/// `level` is `min { n >= 0 : Q < q_n + q_{n-1} }` and `index` the unique
/// `a` with `a q_{N-1} + q_{N-2} <= Q < (a + 1) q_{N-1} + q_{N-2}`. When a
/// rational expansion ends first, `terminated` is set, `level` is the
/// expansion length `L` and `index` is `a_L` (every level is complete).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cutoff {
    pub level: usize,
    pub index: u64,
    pub terminated: bool,
}

/// The walk over levels shared by [`cutoff`] and [`intermediates`].
struct LevelWalk {
    /// `p_{n-2}/q_{n-2}` and `p_{n-1}/q_{n-1}` for the next level `n`.
    before: ConvergentPair,
    last: ConvergentPair,
}

enum Level {
    /// Level `n` is entirely below the cutoff.
    Full { quotient: u64 },
    /// Level `n` is the cutoff level `N`, truncated at `a(Q, x)`.
    Partial { quotient: u64, index: u64 },
    /// The rational expansion has ended.
    Ended,
}

impl LevelWalk {
    fn new(x: &PartialQuotientStream) -> Self {
        let minus_two = ConvergentPair::minus_two();
        let minus_one = ConvergentPair::minus_one();
        let a0 = x.a0();
        let zero = ConvergentPair {
            index: 0,
            p: &a0 * &minus_one.p + &minus_two.p,
            q: minus_two.q.clone(),
        };
        Self {
            before: minus_one,
            last: zero,
        }
    }

    /// Classifies the next level (`n = last.index + 1`) and advances.
    fn step(&mut self, x: &mut PartialQuotientStream, q_max: &BigUint) -> Result<Level> {
        let n = (self.last.index + 1) as usize;
        let Some(a) = x.try_quotient(n)? else {
            return Ok(Level::Ended);
        };
        let a_big = BigUint::from(a);
        let next = self.last.next(&self.before, &a_big);
        let level = if *q_max < &next.q + &self.last.q {
            // a q_{N-1} + q_{N-2} <= Q
            let index = (q_max - &self.before.q) / &self.last.q;
            let index = index
                .to_u64()
                .ok_or(Error::QuotientOverflow { index: n })?;
            Level::Partial { quotient: a, index }
        } else {
            Level::Full { quotient: a }
        };
        self.before = std::mem::replace(&mut self.last, next);
        Ok(level)
    }
}

pub fn cutoff(x: &mut PartialQuotientStream, q_max: u64) -> Result<Cutoff> {
    if q_max == 0 {
        return Err(Error::InvalidConfig("Q must be at least 1".into()));
    }
    let q_big = BigUint::from(q_max);
    let mut walk = LevelWalk::new(x);
    let mut last_quotient = 0u64;
    loop {
        match walk.step(x, &q_big)? {
            Level::Full { quotient } => last_quotient = quotient,
            Level::Partial { index, .. } => {
                return Ok(Cutoff {
                    level: walk.last.index as usize,
                    index,
                    terminated: false,
                })
            }
            Level::Ended => {
                return Ok(Cutoff {
                    level: walk.last.index as usize,
                    index: last_quotient,
                    terminated: true,
                })
            }
        }
    }
}

/// One element of `E_n(x)`: `(m p_{n-1} + p_{n-2}) / (m q_{n-1} + q_{n-2})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intermediate {
    /// The fraction reduced mod 1.
    pub fraction: FareyFraction,
    pub level: usize,
    pub index: u64,
    pub height: BigUint,
}

#[derive(Clone, Debug)]
pub struct Intermediates {
    pub items: Vec<Intermediate>,
    pub cutoff: Cutoff,
    /// Quotients `a_1, ..., a_N` visited by the walk.
    pub quotients: Vec<u64>,
}

/// All elements of `E_1(x), E_2(x), ...` of height at most `q_max`, in order
/// of strictly increasing height.
pub fn intermediates(x: &mut PartialQuotientStream, q_max: u64) -> Result<Intermediates> {
    if q_max == 0 {
        return Err(Error::InvalidConfig("Q must be at least 1".into()));
    }
    let q_big = BigUint::from(q_max);
    let mut walk = LevelWalk::new(x);
    let mut items = Vec::new();
    let mut quotients = Vec::new();
    loop {
        let start = walk.before.as_raw();
        let step = walk.last.as_raw();
        let (count, done, terminated) = match walk.step(x, &q_big)? {
            Level::Full { quotient } => (quotient, false, false),
            Level::Partial { quotient, index } => {
                quotients.push(quotient);
                (index, true, false)
            }
            Level::Ended => (0, true, true),
        };
        if !done {
            quotients.push(count);
        }
        let level = walk.last.index as usize;
        let mut cur = start;
        for m in 1..=count {
            cur = mediant(&cur, &step);
            items.push(Intermediate {
                fraction: cur.reduce_mod1()?,
                level,
                index: m,
                height: cur.denominator.clone(),
            });
        }
        if done {
            let cutoff = if terminated {
                Cutoff {
                    level,
                    index: quotients.last().copied().unwrap_or(0),
                    terminated: true,
                }
            } else {
                Cutoff {
                    level,
                    index: count,
                    terminated: false,
                }
            };
            return Ok(Intermediates {
                items,
                cutoff,
                quotients,
            });
        }
    }
}
