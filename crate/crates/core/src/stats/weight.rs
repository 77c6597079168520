//! Weight functions `g`, truncations `f` and terminal-quotient histograms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::weighted_reciprocal_sum;
use crate::error::{Error, Result};

/// Either an exact rational or a double.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightValue {
    Exact(BigRational),
    Approx(f64),
}

impl WeightValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            WeightValue::Exact(r) => ratio_to_f64(r),
            WeightValue::Approx(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            WeightValue::Exact(r) => Some(r),
            WeightValue::Approx(_) => None,
        }
    }
}

impl fmt::Display for WeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightValue::Exact(r) => write!(f, "{r}"),
            WeightValue::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// Ratio to double without overflowing on huge numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64().filter(|v| v.is_finite()) {
        if v != 0.0 || r.is_zero() {
            return v;
        }
    }
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift > 0 {
        BigRational::new(n.clone(), d.clone() << shift as usize)
    } else {
        BigRational::new(n.clone() << (-shift) as usize, d.clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// `g: N -> [0, inf)`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFunction {
    /// `g(m) = m^-(1/2 + gamma)`.
    Power { gamma: f64 },
    /// `g(m) = 1/m`.
    Harmonic,
    /// `g(m) = 1`.
    Unit,
    /// Finitely many listed values, zero elsewhere.
    Table { values: BTreeMap<u64, BigRational> },
}

impl WeightFunction {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!("power weight needs gamma > 0, got {gamma}")));
        }
        Ok(WeightFunction::Power { gamma })
    }

    pub fn table(values: BTreeMap<u64, BigRational>) -> Result<Self> {
        for (m, v) in &values {
            if *m == 0 || v < &BigRational::zero() {
                return Err(Error::InvalidConfig(format!("bad table entry g({m}) = {v}")));
            }
        }
        Ok(WeightFunction::Table { values })
    }

    /// True when every value is an exact rational.
    pub fn is_exact(&self) -> bool {
        !matches!(self, WeightFunction::Power { .. })
    }

    /// Decay exponent `s` with `g(m) <= m^-s`, when the family has one.
    pub fn decay_exponent(&self) -> Option<f64> {
        match self {
            WeightFunction::Power { gamma } => Some(0.5 + gamma),
            WeightFunction::Harmonic => Some(1.0),
            WeightFunction::Unit => Some(0.0),
            WeightFunction::Table { .. } => None,
        }
    }

    pub fn exact(&self, m: u64) -> Option<BigRational> {
        assert!(m >= 1, "weights are indexed from 1");
        match self {
            WeightFunction::Power { .. } => None,
            WeightFunction::Harmonic => Some(BigRational::new(1.into(), m.into())),
            WeightFunction::Unit => Some(BigRational::from_integer(1.into())),
            WeightFunction::Table { values } => Some(values.get(&m).cloned().unwrap_or_else(BigRational::zero)),
        }
    }

    pub fn value_f64(&self, m: u64) -> f64 {
        assert!(m >= 1, "weights are indexed from 1");
        match self {
            WeightFunction::Power { gamma } => (m as f64).powf(-(0.5 + gamma)),
            WeightFunction::Harmonic => 1.0 / m as f64,
            WeightFunction::Unit => 1.0,
            WeightFunction::Table { values } => values.get(&m).map_or(0.0, ratio_to_f64),
        }
    }

    pub fn value(&self, m: u64) -> WeightValue {
        match self.exact(m) {
            Some(r) => WeightValue::Exact(r),
            None => WeightValue::Approx(self.value_f64(m)),
        }
    }

    /// `sum_{m=lo}^{hi} g(m)` in double precision; empty when `hi < lo`.
    pub fn run_sum_f64(&self, lo: u64, hi: u64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        match self {
            WeightFunction::Unit => (hi - lo + 1) as f64,
            WeightFunction::Table { values } => values.range(lo..=hi).map(|(_, v)| ratio_to_f64(v)).sum(),
            WeightFunction::Harmonic => power_run_sum(1.0, lo, hi),
            WeightFunction::Power { gamma } => power_run_sum(0.5 + gamma, lo, hi),
        }
    }

    /// Exact `sum_{m=lo}^{hi} g(m)` for rational families.
    pub fn run_sum_exact(&self, lo: u64, hi: u64) -> Option<BigRational> {
        if hi < lo {
            return self.is_exact().then(BigRational::zero);
        }
        match self {
            WeightFunction::Power { .. } => None,
            WeightFunction::Unit => Some(BigRational::from_integer((hi - lo + 1).into())),
            WeightFunction::Harmonic => Some(weighted_reciprocal_sum((lo..=hi).map(|m| (m, 1)))),
            WeightFunction::Table { values } => {
                Some(values.range(lo..=hi).fold(BigRational::zero(), |acc, (_, v)| acc + v))
            }
        }
    }

    pub fn run_sum(&self, lo: u64, hi: u64) -> WeightValue {
        match self.run_sum_exact(lo, hi) {
            Some(r) => WeightValue::Exact(r),
            None => WeightValue::Approx(self.run_sum_f64(lo, hi)),
        }
    }
}

/// `sum_{m=lo}^{hi} m^-s`: direct for the first terms, Euler-Maclaurin after.
fn power_run_sum(s: f64, lo: u64, hi: u64) -> f64 {
    const DIRECT: u64 = 2048;
    let f = |m: f64| m.powf(-s);
    let split = lo.saturating_add(DIRECT).min(hi);
    let mut total = 0.0;
    // small terms first
    for m in (lo..=split).rev() {
        total += f(m as f64);
    }
    if split == hi {
        return total;
    }
    let (a, b) = ((split + 1) as f64, hi as f64);
    let integral = if (s - 1.0).abs() < 1e-15 {
        (b / a).ln()
    } else {
        (b.powf(1.0 - s) - a.powf(1.0 - s)) / (1.0 - s)
    };
    let d1 = |m: f64| -s * m.powf(-s - 1.0);
    let d3 = |m: f64| -s * (s + 1.0) * (s + 2.0) * m.powf(-s - 3.0);
    total + integral + (f(a) + f(b)) / 2.0 + (d1(b) - d1(a)) / 12.0 - (d3(b) - d3(a)) / 720.0
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Power { gamma } => write!(f, "power:{gamma}"),
            WeightFunction::Harmonic => f.write_str("harmonic"),
            WeightFunction::Unit => f.write_str("unit"),
            WeightFunction::Table { values } => write!(f, "table({} entries)", values.len()),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// `power:<gamma>`, `harmonic`, `unit` or `table:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "harmonic" => return Ok(WeightFunction::Harmonic),
            "unit" => return Ok(WeightFunction::Unit),
            _ => {}
        }
        if let Some(g) = s.strip_prefix("power:") {
            let gamma: f64 = g
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad gamma in `{s}`")))?;
            return WeightFunction::power(gamma);
        }
        if let Some(path) = s.strip_prefix("table:") {
            let text = std::fs::read_to_string(path)?;
            return WeightFunction::table(parse_weight_table(&text)?);
        }
        Err(Error::Parse(format!("unknown weight `{s}`")))
    }
}

/// Lines of `m value`, value an integer, `p/q` or a terminating decimal.
pub fn parse_weight_table(text: &str) -> Result<BTreeMap<u64, BigRational>> {
    let mut out = BTreeMap::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(m), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("table line `{line}` is not `m value`")));
        };
        let m: u64 = m
            .parse()
            .map_err(|_| Error::Parse(format!("bad index `{m}`")))?;
        if out.insert(m, parse_exact(v)?).is_some() {
            return Err(Error::Parse(format!("duplicate table index {m}")));
        }
    }
    Ok(out)
}

fn parse_exact(v: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad weight value `{v}`"));
    if let Some((p, q)) = v.split_once('/') {
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = v.split_once('.') {
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        return Ok(BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)));
    }
    v.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

/// `f(n) = floor(n (log n)^(1/2 + delta))`, `f(1) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationFn {
    pub delta: f64,
}

impl TruncationFn {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidConfig(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { delta })
    }

    pub fn eval(&self, n: u64) -> u64 {
        assert!(n >= 1);
        if n == 1 {
            return 1;
        }
        let nf = n as f64;
        let v = nf * nf.ln().powf(0.5 + self.delta);
        // guard against v landing a hair under an integer
        let r = v.round();
        if (v - r).abs() < 1e-9 * v.max(1.0) {
            r as u64
        } else {
            v.floor() as u64
        }
    }
}

/// Multiset of terminal quotients `a_L`, each weighted in units of 1/2
/// (the value of `chi` at an endpoint), stored as disjoint runs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TerminalCounts {
    /// `(lo, hi, half_units)`, sorted, disjoint, adjacent runs of equal
    /// weight merged, no zero weights.
    runs: Vec<(u64, u64, u64)>,
}

impl TerminalCounts {
    pub fn from_runs(raw: impl IntoIterator<Item = (u64, u64, u64)>) -> Self {
        let mut events: Vec<(u64, i128)> = Vec::new();
        for (lo, hi, w) in raw {
            if hi < lo || w == 0 {
                continue;
            }
            events.push((lo, w as i128));
            events.push((hi + 1, -(w as i128)));
        }
        events.sort_unstable();
        let mut runs: Vec<(u64, u64, u64)> = Vec::new();
        let mut level: i128 = 0;
        let mut i = 0;
        while i < events.len() {
            let pos = events[i].0;
            while i < events.len() && events[i].0 == pos {
                level += events[i].1;
                i += 1;
            }
            let Some(&(next, _)) = events.get(i) else { break };
            if level > 0 {
                let w = level as u64;
                match runs.last_mut() {
                    Some(last) if last.1 + 1 == pos && last.2 == w => last.1 = next - 1,
                    _ => runs.push((pos, next - 1, w)),
                }
            }
        }
        Self { runs }
    }

    pub fn runs(&self) -> &[(u64, u64, u64)] {
        &self.runs
    }

    /// Total weight in half units.
    pub fn total_half_units(&self) -> u128 {
        self.runs
            .iter()
            .map(|&(lo, hi, w)| (hi - lo + 1) as u128 * w as u128)
            .sum()
    }

    /// `(1/2) sum w g(m)`.
    pub fn evaluate(&self, g: &WeightFunction) -> WeightValue {
        match self.evaluate_exact(g) {
            Some(r) => WeightValue::Exact(r),
            None => WeightValue::Approx(self.evaluate_f64(g)),
        }
    }

    pub fn evaluate_f64(&self, g: &WeightFunction) -> f64 {
        self.runs
            .iter()
            .map(|&(lo, hi, w)| w as f64 * g.run_sum_f64(lo, hi))
            .sum::<f64>()
            / 2.0
    }

    pub fn evaluate_exact(&self, g: &WeightFunction) -> Option<BigRational> {
        let half = BigRational::new(1.into(), 2.into());
        match g {
            WeightFunction::Power { .. } => None,
            WeightFunction::Unit => Some(BigRational::from_integer(BigInt::from(self.total_half_units())) * half),
            WeightFunction::Harmonic => {
                let terms = self
                    .runs
                    .iter()
                    .flat_map(|&(lo, hi, w)| (lo..=hi).map(move |m| (m, w)));
                Some(weighted_reciprocal_sum(terms) * half)
            }
            WeightFunction::Table { values } => {
                let mut acc = BigRational::zero();
                for &(lo, hi, w) in &self.runs {
                    for v in values.range(lo..=hi).map(|(_, v)| v) {
                        acc += v * BigRational::from_integer(w.into());
                    }
                }
                Some(acc * half)
            }
        }
    }
}
