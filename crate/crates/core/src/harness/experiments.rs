//! Per-sample statistics and pooled rows for each experiment kind.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_rational::BigRational;

use super::output::{ResultRow, RowIndex, Value};
use super::{ExperimentConfig, ExperimentKind};
use crate::cf::{cutoff, intermediates, PartialQuotientStream};
use crate::error::{Error, Result};
use crate::farey::{divergence_functional, HeightSet};
use crate::stats::{
    birkhoff_average, classical_stats, count_intermediates, double_exceedance, indicator_sum, max_quotient_below,
    mq_all_methods, x_nf, x_nf_main, FareyTable, QuotientFn, TruncationFn, WeightFunction, WeightValue,
};

/// Values `r, s` tabulated by pairdep.
const PAIR_VALUES: [u64; 2] = [1, 2];

pub(super) struct Plan {
    kind: ExperimentKind,
    seed: u64,
    grid: Vec<u64>,
    /// The fixed `n` of gauss_kuzmin, variance and pairdep.
    n: u64,
    weight: WeightFunction,
    trunc: TruncationFn,
    delta: f64,
    set: HeightSet,
    tables: BTreeMap<u64, FareyTable>,
    functionals: BTreeMap<u64, f64>,
}

fn or_default(v: &[u64], d: &[u64]) -> Vec<u64> {
    if v.is_empty() {
        d.to_vec()
    } else {
        v.to_vec()
    }
}

fn single(v: &[u64], d: u64, name: &str, kind: ExperimentKind) -> Result<u64> {
    match v {
        [] => Ok(d),
        [x] => Ok(*x),
        _ => Err(Error::InvalidConfig(format!("{kind} takes a single --{name}"))),
    }
}

fn unused(v: &[u64], name: &str, kind: ExperimentKind) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{kind} does not use --{name}")))
    }
}

impl Plan {
    pub(super) fn new(config: &ExperimentConfig) -> Result<Self> {
        use ExperimentKind::*;
        let p = &config.params;
        let kind = config.experiment;
        let weight = match (&p.weight, p.gamma) {
            (None, None) => WeightFunction::Harmonic,
            (Some(w), None) => w.clone(),
            (None, Some(g)) => WeightFunction::power(g)?,
            (Some(WeightFunction::Power { gamma }), Some(g)) if *gamma == g => WeightFunction::power(g)?,
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("--gamma conflicts with --weight".into()));
            }
        };
        let trunc = TruncationFn::new(p.delta)?;
        let mut n = 0;
        let grid = match kind {
            Levy | KhinchinAvg => {
                unused(&p.q, "Q", kind)?;
                or_default(&p.n, &[if kind == Levy { 100 } else { 1000 }])
            }
            GaussKuzmin => {
                n = single(&p.n, 100, "n", kind)?;
                or_default(&p.k, &[1, 2, 3])
            }
            Nq | CountIntermediates => {
                unused(&p.n, "n", kind)?;
                or_default(&p.q, &[1_000_000])
            }
            Mq | Openproblem => {
                unused(&p.n, "n", kind)?;
                or_default(&p.q, &[1000])
            }
            Xnf => or_default(&p.n, &[100]),
            Variance => {
                n = single(&p.n, 100, "n", kind)?;
                or_default(&p.m, &[2, 5, 10])
            }
            Pairdep => {
                n = single(&p.n, 1, "n", kind)?;
                or_default(&p.k, &[5, 10])
            }
            DoubleExceed => or_default(&p.m, &[1000]),
        };
        let min = match kind {
            DoubleExceed | Xnf => 2,
            _ => 1,
        };
        if grid.iter().any(|&v| v < min) || (n == 0 && matches!(kind, GaussKuzmin | Variance | Pairdep)) {
            return Err(Error::InvalidConfig(format!("{kind} parameters must be at least {min}")));
        }
        let mut tables = BTreeMap::new();
        if kind == Mq {
            for &q in grid.iter().filter(|&&q| q <= p.farey_limit) {
                tables.insert(q, FareyTable::new(q)?);
            }
        }
        let mut functionals = BTreeMap::new();
        if kind == Openproblem {
            for &q in &grid {
                functionals.insert(q, divergence_functional(&p.set, q));
            }
        }
        Ok(Self {
            kind,
            seed: config.master_seed,
            grid,
            n,
            weight,
            trunc,
            delta: p.delta,
            set: p.set.clone(),
            tables,
            functionals,
        })
    }

    fn row(&self, index: RowIndex, param: u64, stat: &str, value: Value) -> ResultRow {
        ResultRow {
            experiment: self.kind.name().to_string(),
            seed: self.seed,
            index,
            param,
            stat: stat.to_string(),
            value,
        }
    }

    pub(super) fn sample_rows(&self, index: u64, x: &mut PartialQuotientStream) -> Result<Vec<ResultRow>> {
        use ExperimentKind::*;
        let idx = RowIndex::Sample(index);
        let mut out = Vec::new();
        for &param in &self.grid {
            let mut push = |stat: &str, v: Value| out.push(self.row(idx, param, stat, v));
            match self.kind {
                Levy => {
                    let s = classical_stats(x, param as usize)?;
                    push("levy_stat", Value::Float(s.levy_stat));
                    push("pq_max", Value::Int(s.pq_max as i128));
                    push("pq_sum", Value::Int(s.pq_sum as i128));
                }
                GaussKuzmin => {
                    let a = x.quotients(self.n as usize)?;
                    let count = a.iter().filter(|&&v| v == param).count() as i128;
                    push("count", Value::Int(count));
                    push("freq", Value::Rational(BigRational::new(count.into(), self.n.into())));
                }
                Nq => {
                    let c = cutoff(x, param)?;
                    push("N", Value::Int(c.level as i128));
                    push("N_over_logQ", Value::Float(c.level as f64 / (param as f64).ln()));
                }
                Mq => {
                    let rep = mq_all_methods(x, param, &self.weight, self.tables.get(&param))?;
                    if !rep.agree {
                        return Err(Error::Invariant(format!(
                            "M_Q methods disagree for sample {index}, Q = {param}: {rep:?}"
                        )));
                    }
                    let m = match rep.closed {
                        WeightValue::Exact(r) => Value::Rational(r),
                        WeightValue::Approx(v) => Value::Float(v),
                    };
                    push("M_over_logQ", Value::Float(m.to_f64() / (param as f64).ln()));
                    push("M", m);
                    push("methods_agree", Value::Int(1));
                }
                CountIntermediates => {
                    let count = count_intermediates(x, param)?;
                    let lq = (param as f64).ln();
                    let scale = 12.0 / (PI * PI) * lq * lq.ln();
                    push("count", Value::Int(count as i128));
                    push("normalized", Value::Float(count as f64 / scale));
                    push("M0", Value::Int(max_quotient_below(x, param)? as i128));
                    push("N", Value::Int(cutoff(x, param)?.level as i128));
                }
                Xnf => {
                    let v = x_nf(x, param as usize, &self.weight, &self.trunc)?;
                    push("X", weight_value(v));
                    push("X_main", Value::Float(x_nf_main(param as usize, &self.weight, &self.trunc)));
                }
                Variance => {
                    let s = indicator_sum(x, param, self.n as usize)?;
                    push("S", Value::Int(s as i128));
                }
                Pairdep => {
                    push("a_n", Value::Int(x.quotient(self.n as usize)? as i128));
                    push("a_n_plus_k", Value::Int(x.quotient((self.n + param) as usize)? as i128));
                }
                DoubleExceed => {
                    let c = double_exceedance(x, param, self.delta)?;
                    push("count", Value::Int(c as i128));
                    push("event", Value::Int(i128::from(c >= 2)));
                }
                Openproblem => {
                    let list = intermediates(x, param)?;
                    let hits = list
                        .items
                        .iter()
                        .filter(|it| {
                            let h = u64::try_from(&it.height).expect("heights are at most Q");
                            self.set.contains(h)
                        })
                        .count();
                    push("count", Value::Int(hits as i128));
                    push("functional", Value::Float(self.functionals[&param]));
                }
                KhinchinAvg => {
                    let b = birkhoff_average(x, &QuotientFn::Log, param as usize)?;
                    push("avg", Value::Float(b.average));
                    push("reference", Value::Float(b.reference));
                }
            }
        }
        Ok(out)
    }

    /// Rows with index `*` computed from all samples.
    pub(super) fn pooled_rows(&self, rows: &[ResultRow]) -> Result<Vec<ResultRow>> {
        match self.kind {
            ExperimentKind::Variance => Ok(self.variance_rows(rows)),
            ExperimentKind::Pairdep => self.pairdep_rows(rows),
            _ => Ok(Vec::new()),
        }
    }

    fn values_by_sample(rows: &[ResultRow], param: u64, stat: &str) -> Vec<(RowIndex, i128)> {
        let mut v: Vec<(RowIndex, i128)> = rows
            .iter()
            .filter(|r| r.param == param && r.stat == stat)
            .map(|r| match r.value {
                Value::Int(i) => (r.index, i),
                _ => unreachable!("integer statistic"),
            })
            .collect();
        v.sort();
        v
    }

    fn variance_rows(&self, rows: &[ResultRow]) -> Vec<ResultRow> {
        let mut out = Vec::new();
        for &m in &self.grid {
            let s: Vec<f64> = Self::values_by_sample(rows, m, "S").into_iter().map(|(_, v)| v as f64).collect();
            let n = s.len() as f64;
            let mean = s.iter().sum::<f64>() / n;
            let var = if s.len() > 1 {
                s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let ratio = if mean > 0.0 { var / mean } else { f64::NAN };
            out.push(self.row(RowIndex::Pooled, m, "mean", Value::Float(mean)));
            out.push(self.row(RowIndex::Pooled, m, "var", Value::Float(var)));
            out.push(self.row(RowIndex::Pooled, m, "var_over_mean", Value::Float(ratio)));
        }
        out
    }

    fn pairdep_rows(&self, rows: &[ResultRow]) -> Result<Vec<ResultRow>> {
        let mut out = Vec::new();
        for &k in &self.grid {
            let first = Self::values_by_sample(rows, k, "a_n");
            let second = Self::values_by_sample(rows, k, "a_n_plus_k");
            let total = first.len() as i128;
            let mut joint: BTreeMap<(i128, i128), i128> = BTreeMap::new();
            for ((i, a), (j, b)) in first.iter().zip(&second) {
                debug_assert_eq!(i, j);
                *joint.entry((*a, *b)).or_default() += 1;
            }
            let frac = |c: i128| BigRational::new(c.into(), total.into());
            for r in PAIR_VALUES.map(i128::from) {
                let direct_r = first.iter().filter(|(_, a)| *a == r).count() as i128;
                let from_joint_r: i128 = joint.iter().filter(|((a, _), _)| *a == r).map(|(_, c)| c).sum();
                for s in PAIR_VALUES.map(i128::from) {
                    let direct_s = second.iter().filter(|(_, b)| *b == s).count() as i128;
                    let from_joint_s: i128 = joint.iter().filter(|((_, b), _)| *b == s).map(|(_, c)| c).sum();
                    if direct_r != from_joint_r || direct_s != from_joint_s {
                        return Err(Error::Invariant("pair marginals disagree with the joint table".into()));
                    }
                    let j = frac(joint.get(&(r, s)).copied().unwrap_or(0));
                    let product = frac(direct_r) * frac(direct_s);
                    let diff = &j - &product;
                    out.push(self.row(RowIndex::Pooled, k, &format!("joint_{r}_{s}"), Value::Rational(j)));
                    out.push(self.row(RowIndex::Pooled, k, &format!("product_{r}_{s}"), Value::Rational(product)));
                    out.push(self.row(RowIndex::Pooled, k, &format!("diff_{r}_{s}"), Value::Rational(diff)));
                }
                out.push(self.row(RowIndex::Pooled, k, &format!("marginal_n_{r}"), Value::Rational(frac(direct_r))));
            }
            for s in PAIR_VALUES.map(i128::from) {
                let direct_s = second.iter().filter(|(_, b)| *b == s).count() as i128;
                out.push(self.row(RowIndex::Pooled, k, &format!("marginal_nk_{s}"), Value::Rational(frac(direct_s))));
            }
        }
        Ok(out)
    }
}

fn weight_value(v: WeightValue) -> Value {
    match v {
        WeightValue::Exact(r) => Value::Rational(r),
        WeightValue::Approx(f) => Value::Float(f),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run, ExperimentConfig, ExperimentKind, Params};
    use super::*;

    fn cfg(kind: ExperimentKind, samples: u64, params: Params) -> ExperimentConfig {
        ExperimentConfig::new(kind, samples, 1).with_params(params)
    }

    #[test]
    fn levy_row_count() {
        let p = Params {
            n: vec![50],
            ..Params::default()
        };
        let rows = run(&cfg(ExperimentKind::Levy, 10, p)).unwrap();
        assert_eq!(rows.iter().filter(|r| r.stat == "levy_stat").count(), 10);
        assert_eq!(rows.len(), 30);
    }

    #[test]
    fn mq_methods_agree() {
        let p = Params {
            q: vec![1000],
            ..Params::default()
        };
        let rows = run(&cfg(ExperimentKind::Mq, 5, p)).unwrap();
        let agree: Vec<&ResultRow> = rows.iter().filter(|r| r.stat == "methods_agree").collect();
        assert_eq!(agree.len(), 5);
        assert!(agree.iter().all(|r| r.value == Value::Int(1)));
    }

    #[test]
    fn openproblem_empty_set() {
        let p = Params {
            q: vec![500],
            set: HeightSet::Explicit(Default::default()),
            ..Params::default()
        };
        let rows = run(&cfg(ExperimentKind::Openproblem, 6, p)).unwrap();
        let counts: Vec<&ResultRow> = rows.iter().filter(|r| r.stat == "count").collect();
        assert_eq!(counts.len(), 6);
        assert!(counts.iter().all(|r| r.value == Value::Int(0)));
    }

    #[test]
    fn openproblem_all_heights_counts_everything() {
        let p = Params {
            q: vec![300],
            ..Params::default()
        };
        let rows = run(&cfg(ExperimentKind::Openproblem, 4, p)).unwrap();
        for r in rows.iter().filter(|r| r.stat == "count") {
            let RowIndex::Sample(i) = r.index else { panic!() };
            let mut x = super::super::sample_stream(1, i, 256).unwrap();
            let n = count_intermediates(&mut x, 300).unwrap();
            assert_eq!(r.value, Value::Int(n as i128));
        }
    }

    #[test]
    fn row_counts_match_contract() {
        // samples x grid x stats, plus pooled rows
        let cases: [(ExperimentKind, usize, usize); 11] = [
            (ExperimentKind::Levy, 1, 3),
            (ExperimentKind::GaussKuzmin, 3, 2),
            (ExperimentKind::Nq, 1, 2),
            (ExperimentKind::Mq, 1, 3),
            (ExperimentKind::CountIntermediates, 1, 4),
            (ExperimentKind::Xnf, 1, 2),
            (ExperimentKind::Variance, 3, 1),
            (ExperimentKind::Pairdep, 2, 2),
            (ExperimentKind::DoubleExceed, 1, 2),
            (ExperimentKind::Openproblem, 1, 2),
            (ExperimentKind::KhinchinAvg, 1, 2),
        ];
        for (kind, grid, stats) in cases {
            let samples = 4;
            let rows = run(&cfg(kind, samples, Params::default())).unwrap();
            let per_sample = rows.iter().filter(|r| r.index != RowIndex::Pooled).count();
            assert_eq!(per_sample, samples as usize * grid * stats, "{kind}");
            let pooled = rows.iter().filter(|r| r.index == RowIndex::Pooled).count();
            let expected_pooled = match kind {
                ExperimentKind::Variance => 3 * grid,
                ExperimentKind::Pairdep => 16 * grid,
                _ => 0,
            };
            assert_eq!(pooled, expected_pooled, "{kind}");
        }
    }

    #[test]
    fn pairdep_marginals_from_joint() {
        let rows = run(&cfg(ExperimentKind::Pairdep, 200, Params::default())).unwrap();
        let get = |k: u64, stat: &str| {
            rows.iter()
                .find(|r| r.param == k && r.stat == stat && r.index == RowIndex::Pooled)
                .map(|r| match &r.value {
                    Value::Rational(q) => q.clone(),
                    _ => unreachable!(),
                })
                .unwrap()
        };
        for k in [5, 10] {
            // P(a_n = 1) >= P(a_n = 1, a_n+k in {1, 2})
            assert!(get(k, "marginal_n_1") >= get(k, "joint_1_1") + get(k, "joint_1_2"));
            assert_eq!(get(k, "diff_2_1"), get(k, "joint_2_1") - get(k, "product_2_1"));
        }
    }

    #[test]
    fn bad_configs() {
        let bad = |kind, p: Params| run(&cfg(kind, 2, p)).is_err();
        assert!(bad(
            ExperimentKind::Variance,
            Params {
                n: vec![10, 20],
                ..Params::default()
            }
        ));
        assert!(bad(
            ExperimentKind::Mq,
            Params {
                weight: Some(WeightFunction::Harmonic),
                gamma: Some(0.5),
                ..Params::default()
            }
        ));
        assert!(bad(
            ExperimentKind::Nq,
            Params {
                n: vec![3],
                ..Params::default()
            }
        ));
        assert!(bad(
            ExperimentKind::DoubleExceed,
            Params {
                m: vec![1],
                ..Params::default()
            }
        ));
        assert!(run(&ExperimentConfig::new(ExperimentKind::Levy, 0, 1)).is_err());
    }
}
