//! `M_Q(x) = sum_{beta in F_Q} c(beta) chi_beta(x)` three ways, and the
//! main terms of its growth.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::arith::ln_biguint;
use crate::cf::{cutoff, intermediates, terminal_quotient, terminal_quotient_u64, PartialQuotientStream};
use crate::error::{Error, Result};
use crate::exact::FareyFraction;
use crate::farey::{chi_u64, neighbors_u64, FareyPairs};
use crate::stats::weight::{TerminalCounts, WeightFunction, WeightValue};

/// `c(beta) = g(a_L)`, with `g(1)` for the zero class.
pub fn weight_c(beta: &FareyFraction, g: &WeightFunction) -> WeightValue {
    let a = terminal_quotient(beta);
    match a.to_u64() {
        Some(m) => g.value(m),
        None => match g {
            WeightFunction::Harmonic => {
                WeightValue::Exact(BigRational::new(1.into(), BigInt::from(a)))
            }
            WeightFunction::Unit => g.value(1),
            WeightFunction::Table { .. } => WeightValue::Exact(BigRational::from_integer(0.into())),
            WeightFunction::Power { gamma } => WeightValue::Approx((-(0.5 + gamma) * ln_biguint(&a)).exp()),
        },
    }
}

/// Every `beta in F_Q` other than the zero class, with its neighbors and
/// terminal quotient precomputed.
#[derive(Clone, Debug)]
pub struct FareyTable {
    order: u64,
    entries: Vec<TableEntry>,
}

#[derive(Clone, Copy, Debug)]
struct TableEntry {
    lower: (u32, u32),
    upper: (u32, u32),
    terminal: u32,
}

impl FareyTable {
    pub fn new(order: u64) -> Result<Self> {
        if order == 0 || order > u32::MAX as u64 {
            return Err(Error::InvalidConfig(format!("Farey table order {order} out of range")));
        }
        let entries = FareyPairs::new(order)
            .skip(1)
            .map(|(a, q)| {
                let ((c, d), (e, f)) = neighbors_u64(a, q);
                TableEntry {
                    lower: (c as u32, d as u32),
                    upper: (e as u32, f as u32),
                    terminal: terminal_quotient_u64(a, q) as u32,
                }
            })
            .collect();
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `|F_Q|`, zero class included.
    pub fn len(&self) -> usize {
        self.entries.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Terminal-quotient histogram of `{beta in F_Q}` weighted by `chi_beta(x)`.
pub fn terminal_counts_via_farey(x: &mut PartialQuotientStream, table: &FareyTable) -> Result<TerminalCounts> {
    let mut hist: Vec<u64> = vec![0; table.order as usize + 1];
    // zero class: chi = 1, a_L = 1
    hist[1] += 2;
    for e in &table.entries {
        let lower = (e.lower.0 as u64, e.lower.1 as u64);
        let upper = (e.upper.0 as u64, e.upper.1 as u64);
        let w = chi_u64(x, lower, upper)?.half_units();
        hist[e.terminal as usize] += w;
    }
    Ok(histogram_runs(&hist))
}

fn histogram_runs(hist: &[u64]) -> TerminalCounts {
    TerminalCounts::from_runs(
        hist.iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(|(m, &w)| (m as u64, m as u64, w)),
    )
}

/// Terminal-quotient histogram of the listed intermediate convergents.
pub fn terminal_counts_via_intermediates(x: &mut PartialQuotientStream, q_max: u64) -> Result<TerminalCounts> {
    let list = intermediates(x, q_max)?;
    let mut hist: Vec<u64> = vec![0; q_max as usize + 1];
    for item in &list.items {
        let t = terminal_quotient(&item.fraction)
            .to_u64()
            .ok_or_else(|| Error::Invariant("terminal quotient above Q".into()))?;
        hist[t as usize] += 2;
    }
    Ok(histogram_runs(&hist))
}

/// Histogram implied by the closed form
/// `g(1) + sum_{n<N} sum_{m=2}^{a_n+1} g(m) + sum_{m=2}^{a(Q,x)} g(m)`.
pub fn terminal_counts_closed_form(x: &mut PartialQuotientStream, q_max: u64) -> Result<TerminalCounts> {
    let c = cutoff(x, q_max)?;
    let mut runs = vec![(1, 1, 2)];
    for n in 1..c.level {
        let a = x.quotient(n)?;
        runs.push((2, a + 1, 2));
    }
    runs.push((2, c.index, 2));
    Ok(TerminalCounts::from_runs(runs))
}

/// `M_Q(x)` by enumerating `F_Q`.
pub fn mq_via_farey(x: &mut PartialQuotientStream, q_max: u64, g: &WeightFunction) -> Result<WeightValue> {
    let table = FareyTable::new(q_max)?;
    Ok(terminal_counts_via_farey(x, &table)?.evaluate(g))
}

/// `M_Q(x)` as the sum of `c` over the intermediate convergents.
pub fn mq_via_intermediates(x: &mut PartialQuotientStream, q_max: u64, g: &WeightFunction) -> Result<WeightValue> {
    Ok(terminal_counts_via_intermediates(x, q_max)?.evaluate(g))
}

/// `M_Q(x)` from `N(Q, x)`, `a(Q, x)` and the partial quotients alone.
pub fn mq_closed_form(x: &mut PartialQuotientStream, q_max: u64, g: &WeightFunction) -> Result<WeightValue> {
    Ok(terminal_counts_closed_form(x, q_max)?.evaluate(g))
}

/// All methods on one stream.
#[derive(Clone, Debug, PartialEq)]
pub struct MqReport {
    pub farey: Option<WeightValue>,
    pub intermediates: WeightValue,
    pub closed: WeightValue,
    /// Exact equality of the values that were computed (histograms when `g`
    /// is not rational-valued).
    pub agree: bool,
}

/// Runs the closed form and the intermediate listing, plus the Farey
/// enumeration when `table` is given, and compares them.
pub fn mq_all_methods(
    x: &mut PartialQuotientStream,
    q_max: u64,
    g: &WeightFunction,
    table: Option<&FareyTable>,
) -> Result<MqReport> {
    let closed_h = terminal_counts_closed_form(x, q_max)?;
    let inter_h = terminal_counts_via_intermediates(x, q_max)?;
    let farey_h = match table {
        Some(t) => {
            if t.order() != q_max {
                return Err(Error::InvalidConfig("Farey table built for another Q".into()));
            }
            Some(terminal_counts_via_farey(x, t)?)
        }
        None => None,
    };
    let closed = closed_h.evaluate(g);
    let inter = inter_h.evaluate(g);
    let farey = farey_h.as_ref().map(|h| h.evaluate(g));
    let agree = if g.is_exact() {
        closed == inter && farey.as_ref().map_or(true, |f| *f == closed)
    } else {
        closed_h == inter_h && farey_h.as_ref().map_or(true, |f| *f == closed_h)
    };
    Ok(MqReport {
        farey,
        intermediates: inter,
        closed,
        agree,
    })
}

/// Which `m` the main-term series starts at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesStart {
    One,
    Two,
}

const SERIES_TOL: f64 = 1e-10;

/// `sum_{m=start}^{cutoff or inf} g(m) log(1 + 1/m)`.
pub fn log_series(g: &WeightFunction, start: SeriesStart, cutoff: Option<u64>) -> Result<f64> {
    let first = match start {
        SeriesStart::One => 1,
        SeriesStart::Two => 2,
    };
    let term = |m: u64| g.value_f64(m) * (1.0 / m as f64).ln_1p();
    if let Some(c) = cutoff {
        return Ok((first..=c).rev().map(term).sum());
    }
    match g {
        WeightFunction::Table { values } => Ok(values
            .keys()
            .filter(|&&m| m >= first)
            .map(|&m| term(m))
            .sum()),
        WeightFunction::Unit => Err(Error::DivergentSeries("sum of log(1 + 1/m) diverges".into())),
        _ => {
            let s = g.decay_exponent().expect("power and harmonic have exponents");
            Ok(power_log_series(s, first))
        }
    }
}

/// `sum_{m>=first} m^-s log(1 + 1/m)` with the remainder below 1e-10.
///
/// Sum to `M`, then `int_M^inf t + t(M)/2 - t'(M)/12`. Without the last
/// correction the error is at most `|t'(M)| / 12 <= (s + 1) M^(-s-2) / 12`
/// for convex decreasing `t`; `M` is picked so that this is below 1e-10.
fn power_log_series(s: f64, first: u64) -> f64 {
    let m_big = ((s + 1.0) / (12.0 * SERIES_TOL)).powf(1.0 / (s + 2.0)).ceil().max(16.0) as u64;
    let t = |m: f64| m.powf(-s) * (1.0 / m).ln_1p();
    let head: f64 = (first..m_big).rev().map(|m| t(m as f64)).sum();
    let m = m_big as f64;
    let dt = -s * m.powf(-s - 1.0) * (1.0 / m).ln_1p() - m.powf(-s) / (m * (m + 1.0));
    head + log_tail_integral(s, m) + t(m) / 2.0 - dt / 12.0
}

/// `int_A^inf x^-s log(1 + 1/x) dx = sum_j (-1)^(j+1) A^(1-s-j) / (j (s+j-1))`.
pub fn log_tail_integral(s: f64, a: f64) -> f64 {
    assert!(a > 1.0 && s > 0.0);
    let mut total = 0.0;
    for j in 1..200 {
        let jf = j as f64;
        let t = a.powf(1.0 - s - jf) / (jf * (s + jf - 1.0));
        total += if j % 2 == 1 { t } else { -t };
        if t < 1e-20 * total.abs() {
            break;
        }
    }
    total
}

/// `(12/pi^2) (sum_m g(m) log(1 + 1/m)) log Q`, the series from `start`
/// and up to `cutoff` when given.
pub fn main_term(g: &WeightFunction, q_max: u64, start: SeriesStart, cutoff: Option<u64>) -> Result<f64> {
    Ok(12.0 / (PI * PI) * log_series(g, start, cutoff)? * (q_max as f64).ln())
}

/// Limit of `M_Q(x) / log Q` for almost every `x`, read off the closed
/// form: each full level contributes `sum_{m=2}^{a} g(m) + g(a+1)` and
/// levels grow like `(12 log 2 / pi^2) log Q`. Under Gauss-Kuzmin this is
/// `(12/pi^2) (sum_{m>=2} g(m) log(1+1/m) + sum_{k>=1} g(k+1) log((k+1)^2/(k(k+2))))`.
pub fn mq_growth_constant(g: &WeightFunction) -> Result<f64> {
    let from_two = log_series(g, SeriesStart::Two, None)?;
    let w = |k: u64| {
        let kf = k as f64;
        g.value_f64(k + 1) * (1.0 / (kf * (kf + 2.0))).ln_1p()
    };
    let extra: f64 = match g {
        WeightFunction::Table { values } => values.keys().filter(|&&m| m >= 2).map(|&m| w(m - 1)).sum(),
        _ => {
            let s = g.decay_exponent().unwrap_or(0.0);
            // terms below (k+1)^-s / k^2; tail past K below K^-(s+1) / (s+1)
            let k_big = (1.0 / ((s + 1.0) * SERIES_TOL)).powf(1.0 / (s + 1.0)).ceil() as u64;
            (1..=k_big).rev().map(w).sum()
        }
    };
    Ok(12.0 / (PI * PI) * (from_two + extra))
}

/// `N(Q, x)` growth rate `12 log 2 / pi^2`.
pub fn levels_per_log() -> f64 {
    12.0 * std::f64::consts::LN_2 / (PI * PI)
}

/// Number of listed intermediates, used as the count in the second part of
/// the level estimate.
pub fn count_intermediates(x: &mut PartialQuotientStream, q_max: u64) -> Result<u64> {
    let c = cutoff(x, q_max)?;
    let mut total = c.index;
    for n in 1..c.level {
        total += x.quotient(n)?;
    }
    Ok(total)
}

/// `M_0(Q, x) = max_{n <= N(Q,x)} a_n`.
pub fn max_quotient_below(x: &mut PartialQuotientStream, q_max: u64) -> Result<u64> {
    let c = cutoff(x, q_max)?;
    let mut best = 0;
    for n in 1..=c.level {
        match x.try_quotient(n)? {
            Some(a) => best = best.max(a),
            None => break,
        }
    }
    Ok(best)
}
