//! Result rows, their frozen CSV/JSON text form, and summaries.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use num_rational::BigRational;
use serde::Serialize;

use crate::error::Result;
use crate::stats::ratio_to_f64;

pub const CSV_HEADER: &str = "experiment,seed,index,param,stat,value";

/// Which sample a row belongs to; pooled rows sort after every sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowIndex {
    Sample(u64),
    Pooled,
}

impl fmt::Display for RowIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowIndex::Sample(i) => write!(f, "{i}"),
            RowIndex::Pooled => f.write_str("*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i128),
    Rational(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Int(v) => *v as f64,
            Value::Rational(r) => ratio_to_f64(r),
            Value::Float(v) => *v,
        }
    }

    /// Text form: integers as is, rationals as `p/q` in exact mode, all else
    /// with 12 significant digits.
    pub fn render(&self, exact: bool) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Rational(r) if exact => format!("{}/{}", r.numer(), r.denom()),
            other => format_sig12(other.to_f64()),
        }
    }
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `1e-5 <= |v| < 1e12`.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub seed: u64,
    pub index: RowIndex,
    pub param: u64,
    pub stat: String,
    pub value: Value,
}

impl ResultRow {
    pub fn sort_key(&self) -> (u64, RowIndex, &str) {
        (self.param, self.index, &self.stat)
    }
}

/// Sorts by `(param, index, stat)`.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

pub fn write_csv<W: Write>(rows: &[ResultRow], exact: bool, mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.experiment,
            r.seed,
            r.index,
            r.param,
            r.stat,
            r.value.render(exact)
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    experiment: &'a str,
    seed: u64,
    index: String,
    param: u64,
    stat: &'a str,
    value: String,
}

/// Same cells as the CSV, one object per row.
pub fn write_json<W: Write>(rows: &[ResultRow], exact: bool, mut out: W) -> Result<()> {
    let json: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            experiment: &r.experiment,
            seed: r.seed,
            index: r.index.to_string(),
            param: r.param,
            stat: &r.stat,
            value: r.value.render(exact),
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &json).map_err(|e| crate::Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub param: u64,
    pub stat: String,
    pub mean: f64,
    pub median: f64,
    pub trimmed_mean: f64,
    pub stddev: f64,
    pub count: usize,
}

pub const SUMMARY_HEADER: &str = "param,stat,count,mean,median,trimmed_mean,stddev";

impl Summary {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.param,
            self.stat,
            self.count,
            format_sig12(self.mean),
            format_sig12(self.median),
            format_sig12(self.trimmed_mean),
            format_sig12(self.stddev)
        )
    }
}

/// Per `(param, stat)` summaries of the per-sample rows; pooled rows are
/// skipped. Values are reduced in sample-index order.
pub fn aggregate(rows: &[ResultRow]) -> Vec<Summary> {
    let mut sample_rows: Vec<&ResultRow> = rows.iter().filter(|r| r.index != RowIndex::Pooled).collect();
    sample_rows.sort_by(|a, b| (a.param, &a.stat, a.index).cmp(&(b.param, &b.stat, b.index)));
    let mut out = Vec::new();
    let mut i = 0;
    while i < sample_rows.len() {
        let (param, stat) = (sample_rows[i].param, &sample_rows[i].stat);
        let mut values = Vec::new();
        while i < sample_rows.len() && sample_rows[i].param == param && &sample_rows[i].stat == stat {
            values.push(sample_rows[i].value.to_f64());
            i += 1;
        }
        out.push(summarize(param, stat.clone(), &values));
    }
    out
}

/// `trimmed_mean` drops `ceil(0.05 n)` values at each end of the sorted
/// sample (the median when nothing would remain); `stddev` uses `n - 1`.
pub fn summarize(param: u64, stat: String, values: &[f64]) -> Summary {
    let n = values.len();
    assert!(n > 0, "summaries need at least one value");
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let cut = (0.05 * n as f64).ceil() as usize;
    let trimmed_mean = if 2 * cut >= n {
        median
    } else {
        let kept = &sorted[cut..n - cut];
        kept.iter().sum::<f64>() / kept.len() as f64
    };
    let stddev = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Summary {
        param,
        stat,
        mean,
        median,
        trimmed_mean,
        stddev,
        count: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(index: RowIndex, param: u64, stat: &str, v: f64) -> ResultRow {
        ResultRow {
            experiment: "levy".into(),
            seed: 1,
            index,
            param,
            stat: stat.into(),
            value: Value::Float(v),
        }
    }

    #[test]
    fn sig12() {
        assert_eq!(format_sig12(0.842_765_913_272_6), "0.842765913273");
        assert_eq!(format_sig12(2.0), "2");
        assert_eq!(format_sig12(-1.5), "-1.5");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(123_456.789), "123456.789");
        assert_eq!(format_sig12(1e-7), "1e-07");
        assert_eq!(format_sig12(6.02214076e23), "6.02214076e+23");
        assert_eq!(format_sig12(999_999_999_999.9), "1e+12");
        assert_eq!(format_sig12(0.0), "0");
    }

    #[test]
    fn rendering() {
        let r = Value::Rational(BigRational::new(8.into(), 3.into()));
        assert_eq!(r.render(true), "8/3");
        assert_eq!(r.render(false), "2.66666666667");
        assert_eq!(Value::Rational(BigRational::from_integer(2.into())).render(true), "2/1");
        assert_eq!(Value::Int(-4).render(true), "-4");
    }

    #[test]
    fn sorting_puts_pooled_last() {
        let mut rows = vec![
            row(RowIndex::Pooled, 2, "var", 1.0),
            row(RowIndex::Sample(1), 2, "S", 1.0),
            row(RowIndex::Sample(0), 5, "S", 1.0),
            row(RowIndex::Sample(0), 2, "S", 1.0),
        ];
        sort_rows(&mut rows);
        let keys: Vec<String> = rows.iter().map(|r| format!("{}:{}", r.param, r.index)).collect();
        assert_eq!(keys, ["2:0", "2:1", "2:*", "5:0"]);
    }

    #[test]
    fn summaries() {
        let s = summarize(0, "x".into(), &[1.0, 2.0, 3.0]);
        assert_eq!((s.mean, s.median), (2.0, 2.0));
        assert_eq!(s.stddev, 1.0);
        let v: Vec<f64> = (0..20).map(f64::from).collect();
        let s = summarize(0, "x".into(), &v);
        // drops 0 and 19
        assert_eq!(s.trimmed_mean, 9.5);
        let mut skewed = v.clone();
        skewed[19] = 1e6;
        assert_eq!(summarize(0, "x".into(), &skewed).trimmed_mean, 9.5);
        assert_eq!(summarize(0, "x".into(), &[4.0]).trimmed_mean, 4.0);
    }

    #[test]
    fn aggregate_ignores_order_and_pooled() {
        let rows = vec![
            row(RowIndex::Sample(0), 1, "a", 3.0),
            row(RowIndex::Sample(1), 1, "a", 1.0),
            row(RowIndex::Sample(2), 1, "a", 2.0),
            row(RowIndex::Pooled, 1, "a", 100.0),
            row(RowIndex::Sample(0), 1, "b", 5.0),
        ];
        let mut reversed = rows.clone();
        reversed.reverse();
        let a = aggregate(&rows);
        assert_eq!(a, aggregate(&reversed));
        assert_eq!(a.len(), 2);
        assert_eq!((a[0].stat.as_str(), a[0].mean, a[0].count), ("a", 2.0, 3));
        let lines: Vec<String> = a.iter().map(Summary::csv_line).collect();
        let lines_r: Vec<String> = aggregate(&reversed).iter().map(Summary::csv_line).collect();
        assert_eq!(lines, lines_r);
        assert!(aggregate(&[]).is_empty());
    }

    #[test]
    fn csv_text() {
        let rows = vec![row(RowIndex::Sample(3), 50, "levy_stat", 1.25)];
        let mut buf = Vec::new();
        write_csv(&rows, false, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "experiment,seed,index,param,stat,value\nlevy,1,3,50,levy_stat,1.25\n");
        let mut buf = Vec::new();
        write_json(&rows, false, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["value"], "1.25");
        assert_eq!(v[0]["index"], "3");
    }
}
