//! Statistics of the partial quotients themselves: indicator counts
//! `f_{m,n}`, `X_{n,f}`, ergodic averages, Gauss-Kuzmin, Khinchin-Levy,
//! double exceedances and the hypotheses on `g`.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::ln_biguint;
use crate::cf::PartialQuotientStream;
use crate::error::Result;
use crate::stats::mq::{log_series, SeriesStart};
use crate::stats::weight::{ratio_to_f64, TerminalCounts, TruncationFn, WeightFunction, WeightValue};

/// `#{i <= n : a_i >= m}`.
pub fn indicator_sum(x: &mut PartialQuotientStream, m: u64, n: usize) -> Result<u64> {
    let mut count = 0;
    for i in 1..=n {
        if x.quotient(i)? >= m {
            count += 1;
        }
    }
    Ok(count)
}

/// `X_{n,f}(x) = sum_{m=2}^{f(n)} g(m) #{i <= n : a_i >= m}`.
pub fn x_nf(x: &mut PartialQuotientStream, n: usize, g: &WeightFunction, trunc: &TruncationFn) -> Result<WeightValue> {
    let top = trunc.eval(n as u64);
    // each i contributes g(2) + ... + g(min(a_i, f(n)))
    let mut runs = Vec::with_capacity(n);
    for i in 1..=n {
        let a = x.quotient(i)?;
        runs.push((2, a.min(top), 2));
    }
    Ok(TerminalCounts::from_runs(runs).evaluate(g))
}

/// `(n / log 2) sum_{m=2}^{f(n)} g(m) log(1 + 1/m)`.
pub fn x_nf_main(n: usize, g: &WeightFunction, trunc: &TruncationFn) -> f64 {
    let top = trunc.eval(n as u64);
    n as f64 / LN_2 * log_series(g, SeriesStart::Two, Some(top)).expect("finite sums converge")
}

/// A function of one partial quotient, for ergodic averages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuotientFn {
    /// `1` when `a = r`.
    Indicator(u64),
    Constant(f64),
    /// `log a`, whose average tends to the log of Khinchin's constant.
    Log,
}

impl QuotientFn {
    pub fn eval(&self, a: u64) -> f64 {
        match self {
            QuotientFn::Indicator(r) => f64::from(u8::from(a == *r)),
            QuotientFn::Constant(c) => *c,
            QuotientFn::Log => (a as f64).ln(),
        }
    }

    /// `sum_r f(r) log_2(1 + 1/(r(r+2)))`.
    pub fn reference(&self) -> f64 {
        match self {
            QuotientFn::Indicator(r) => gauss_kuzmin_prob(*r),
            QuotientFn::Constant(c) => *c,
            QuotientFn::Log => log_quotient_mean(),
        }
    }
}

/// `sum_r log r log_2(1 + 1/(r(r+2)))`: direct to `R`, then the tail
/// `int_R^inf log x / (x (x+2))` expanded in `1/x` plus the half term.
fn log_quotient_mean() -> f64 {
    const R: u64 = 100_000;
    let h = |r: f64| r.ln() * (1.0 / (r * (r + 2.0))).ln_1p() / LN_2;
    let head: f64 = (2..R).rev().map(|r| h(r as f64)).sum();
    let rf = R as f64;
    let lr = rf.ln();
    // 1/(x(x+2)) = sum_{k>=2} (-2)^(k-2) x^-k and
    // int_R^inf x^-k log x = R^(1-k) (log R/(k-1) + 1/(k-1)^2)
    let mut tail = 0.0;
    for k in 2..8 {
        let kf = (k - 1) as f64;
        tail += (-2f64).powi(k - 2) * rf.powf(-kf) * (lr / kf + 1.0 / (kf * kf));
    }
    head + tail / LN_2 + h(rf) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirkhoffAverage {
    pub average: f64,
    pub reference: f64,
}

/// `(1/n) sum_{k<=n} f(a_k)` with its almost-sure limit.
pub fn birkhoff_average(x: &mut PartialQuotientStream, f: &QuotientFn, n: usize) -> Result<BirkhoffAverage> {
    assert!(n >= 1);
    let mut total = 0.0;
    for k in 1..=n {
        total += f.eval(x.quotient(k)?);
    }
    Ok(BirkhoffAverage {
        average: total / n as f64,
        reference: f.reference(),
    })
}

/// `log_2(1 + 1/(k(k+2)))`.
pub fn gauss_kuzmin_prob(k: u64) -> f64 {
    assert!(k >= 1);
    let kf = k as f64;
    (1.0 / (kf * (kf + 2.0))).ln_1p() / LN_2
}

/// `pi^2 / (12 log 2)`.
pub fn khinchin_levy_constant() -> f64 {
    PI * PI / (12.0 * LN_2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalStats {
    /// `log q_n / n`.
    pub levy_stat: f64,
    pub pq_sum: u128,
    pub pq_max: u64,
    pub q_n: BigUint,
}

pub fn classical_stats(x: &mut PartialQuotientStream, n: usize) -> Result<ClassicalStats> {
    assert!(n >= 1);
    // q_{-2} = 1, q_{-1} = 0, so q_0 = 1
    let (mut before, mut last) = (BigUint::zero(), BigUint::one());
    let (mut pq_sum, mut pq_max) = (0u128, 0u64);
    for k in 1..=n {
        let a = x.quotient(k)?;
        pq_sum += a as u128;
        pq_max = pq_max.max(a);
        let next = &last * a + &before;
        before = std::mem::replace(&mut last, next);
    }
    Ok(ClassicalStats {
        levy_stat: ln_biguint(&last) / n as f64,
        pq_sum,
        pq_max,
        q_n: last,
    })
}

/// `M' = M (log M)^(1/2 + delta)`.
pub fn exceedance_threshold(m: u64, delta: f64) -> f64 {
    let mf = m as f64;
    mf * mf.ln().powf(0.5 + delta)
}

/// `#{i <= M : a_i > M'}`; two or more is the event of the lemma.
pub fn double_exceedance(x: &mut PartialQuotientStream, m: u64, delta: f64) -> Result<u64> {
    assert!(m >= 2);
    let threshold = exceedance_threshold(m, delta);
    let mut count = 0;
    for i in 1..=m as usize {
        if x.quotient(i)? as f64 > threshold {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    /// `sum_m g(m)/m`, `None` when it diverges.
    pub sum_g_over_m: Option<f64>,
    /// `G_f(n)` for `n = 1..=n_max`.
    pub gf_trajectory: Vec<f64>,
}

/// The two hypotheses on `g`: `sum g(m)/m < inf`, and the ratios
/// `G_f(n) = sum_{m <= f((n+1)^2)} g(m) / sum_{m <= f(n^2)} g(m)`.
pub fn hypothesis_check(g: &WeightFunction, delta: f64, n_max: u64) -> Result<HypothesisReport> {
    let trunc = TruncationFn::new(delta)?;
    let sum_g_over_m = match g {
        WeightFunction::Unit => None,
        WeightFunction::Harmonic => Some(PI * PI / 6.0),
        WeightFunction::Power { gamma } => Some(zeta(1.5 + gamma)),
        WeightFunction::Table { values } => Some(values.iter().map(|(m, v)| ratio_to_f64(v) / *m as f64).sum()),
    };
    let mut gf_trajectory = Vec::with_capacity(n_max as usize);
    let mut prev_top = trunc.eval(1);
    let mut prev_sum = g.run_sum_f64(1, prev_top);
    for n in 1..=n_max {
        let top = trunc.eval((n + 1) * (n + 1));
        let sum = prev_sum + g.run_sum_f64(prev_top + 1, top);
        gf_trajectory.push(sum / prev_sum);
        prev_top = top;
        prev_sum = sum;
    }
    Ok(HypothesisReport {
        sum_g_over_m,
        gf_trajectory,
    })
}

/// `zeta(s)` for `s > 1`: direct sum then Euler-Maclaurin to `m^-(s+5)`.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0);
    const M: u64 = 64;
    let head: f64 = (1..M).rev().map(|m| (m as f64).powf(-s)).sum();
    let m = M as f64;
    let f = m.powf(-s);
    let mut tail = m.powf(1.0 - s) / (s - 1.0) + f / 2.0;
    // B2/2!, B4/4!, B6/6! times the derivatives
    tail += s * m.powf(-s - 1.0) / 12.0;
    tail -= s * (s + 1.0) * (s + 2.0) * m.powf(-s - 3.0) / 720.0;
    tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * m.powf(-s - 5.0) / 30240.0;
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn stream(spec: &str) -> PartialQuotientStream {
        spec.parse().unwrap()
    }

    #[test]
    fn indicator_examples() {
        let mut g = stream("golden");
        assert_eq!(indicator_sum(&mut g, 1, 10).unwrap(), 10);
        assert_eq!(indicator_sum(&mut g, 2, 10).unwrap(), 0);
        assert_eq!(indicator_sum(&mut stream("periodic:[0;|2,3]"), 3, 4).unwrap(), 2);
        for seed in 0..20 {
            let mut x = PartialQuotientStream::dyadic(seed, 64);
            assert_eq!(indicator_sum(&mut x, 1, 50).unwrap(), 50);
        }
    }

    #[test]
    fn x_nf_examples() {
        let f = TruncationFn::new(0.5).unwrap();
        assert_eq!(f.eval(4), 5);
        let alt = || stream("periodic:[0;|2,3]");
        let got = x_nf(&mut alt(), 4, &WeightFunction::Harmonic, &f).unwrap();
        assert_eq!(got, WeightValue::Exact(BigRational::new(8.into(), 3.into())));
        let t = WeightFunction::table([(2, BigRational::from_integer(1.into()))].into_iter().collect()).unwrap();
        assert_eq!(x_nf(&mut alt(), 4, &t, &f).unwrap(), WeightValue::Exact(BigRational::from_integer(4.into())));
        for n in [2, 10, 40] {
            let v = x_nf(&mut stream("golden"), n, &WeightFunction::Harmonic, &f).unwrap();
            assert_eq!(v.to_f64(), 0.0);
        }
    }

    #[test]
    fn x_nf_matches_double_loop() {
        let f = TruncationFn::new(0.25).unwrap();
        for seed in 0..15 {
            let n = 60;
            let mut x = PartialQuotientStream::dyadic(seed, 64);
            for g in [WeightFunction::Harmonic, WeightFunction::power(0.3).unwrap()] {
                let mut direct = 0.0;
                for m in 2..=f.eval(n as u64) {
                    direct += g.value_f64(m) * indicator_sum(&mut x, m, n).unwrap() as f64;
                }
                let got = x_nf(&mut x, n, &g, &f).unwrap().to_f64();
                assert!((got - direct).abs() < 1e-9 * direct.max(1.0), "{seed} {g}");
            }
        }
    }

    #[test]
    fn birkhoff_examples() {
        let one = birkhoff_average(&mut stream("golden"), &QuotientFn::Indicator(1), 100).unwrap();
        assert_eq!(one.average, 1.0);
        assert!((one.reference - 0.415_037).abs() < 1e-6);
        assert!((one.reference - (4.0f64 / 3.0).log2()).abs() < 1e-15);
        let two = birkhoff_average(&mut stream("periodic:[0;|2,3]"), &QuotientFn::Indicator(2), 100).unwrap();
        assert_eq!(two.average, 0.5);
        for seed in 0..5 {
            let c = birkhoff_average(&mut PartialQuotientStream::dyadic(seed, 64), &QuotientFn::Constant(1.0), 37).unwrap();
            assert_eq!(c.average, 1.0);
        }
    }

    #[test]
    fn khinchin_reference() {
        // mpmath: log(khinchin) = 0.987849056833810789669
        assert!((QuotientFn::Log.reference() - 0.987_849_056_833_810_8).abs() < 1e-10);
    }

    #[test]
    fn gauss_kuzmin() {
        assert!((gauss_kuzmin_prob(1) - 0.415_037).abs() < 1e-6);
        assert!((gauss_kuzmin_prob(2) - 0.169_925).abs() < 1e-6);
        for k in [1u64, 5, 50, 1000] {
            let partial: f64 = (1..=k).map(gauss_kuzmin_prob).sum();
            let kf = k as f64;
            let closed = 1.0 - ((kf + 2.0) / (kf + 1.0)).log2();
            assert!((partial - closed).abs() < 1e-13, "{k}");
        }
    }

    #[test]
    fn classical_examples() {
        let s = classical_stats(&mut stream("golden"), 10).unwrap();
        assert_eq!(s.q_n, BigUint::from(89u32));
        assert!((s.levy_stat - 89f64.ln() / 10.0).abs() < 1e-15);
        assert_eq!((s.pq_sum, s.pq_max), (10, 1));
        let s = classical_stats(&mut stream("periodic:[0;|2,3]"), 4).unwrap();
        assert_eq!((s.pq_sum, s.pq_max), (10, 3));
        assert!((khinchin_levy_constant() - 1.186_569).abs() < 1e-6);
        for seed in 0..10 {
            let mut x = PartialQuotientStream::dyadic(seed, 64);
            let s = classical_stats(&mut x, 80).unwrap();
            for i in 1..=80 {
                assert!(s.pq_max >= x.quotient(i).unwrap());
            }
        }
    }

    #[test]
    fn exceedance_examples() {
        assert_eq!(double_exceedance(&mut stream("golden"), 1000, 0.5).unwrap(), 0);
        let big = || stream("periodic:[0;100,100|1]");
        assert!((exceedance_threshold(2, 0.5) - 1.386).abs() < 1e-3);
        assert_eq!(double_exceedance(&mut big(), 2, 0.5).unwrap(), 2);
        // 29 log 29 = 97.7 < 100 < 30 log 30 = 102.0
        assert_eq!(double_exceedance(&mut big(), 29, 0.5).unwrap(), 2);
        assert_eq!(double_exceedance(&mut big(), 30, 0.5).unwrap(), 0);
        assert_eq!(double_exceedance(&mut big(), 10_000, 0.5).unwrap(), 0);
    }

    #[test]
    fn hypotheses() {
        let h = hypothesis_check(&WeightFunction::Harmonic, 0.5, 10).unwrap();
        assert!((h.sum_g_over_m.unwrap() - 1.644_934_066_848_226).abs() < 1e-15);
        assert_eq!(h.gf_trajectory.len(), 10);
        assert!(hypothesis_check(&WeightFunction::Unit, 0.5, 3).unwrap().sum_g_over_m.is_none());
        let p = hypothesis_check(&WeightFunction::power(0.25).unwrap(), 0.5, 400).unwrap();
        // mpmath: zeta(1.75) = 1.96232009945134
        assert!((p.sum_g_over_m.unwrap() - 1.962_320_099_451_342).abs() < 1e-12);
        let tail = &p.gf_trajectory[300..];
        assert!(tail.iter().all(|&v| v > 1.0 && v < 1.05));
        assert!(p.gf_trajectory.windows(2).skip(10).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
    }
}
