//! Seeded Monte Carlo over uniformly sampled reals.
//!
//! Sample `i` of a run with master seed `S` is the dyadic stream seeded by
//! `splitmix64(S ^ splitmix64(i))`, where `splitmix64` is the standard
//! finalizer (golden-ratio increment, multipliers `0xbf58476d1ce4e5b9` and
//! `0x94d049bb133111eb`). The stream's bits come from ChaCha8 seeded with
//! that value, 64 bits per block, most significant bit first.

mod experiments;
mod output;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cf::PartialQuotientStream;
use crate::error::{Error, Result};
use crate::farey::HeightSet;
use crate::stats::WeightFunction;

pub use output::{
    aggregate, format_sig12, sort_rows, summarize, write_csv, write_json, ResultRow, RowIndex, Summary, Value,
    CSV_HEADER, SUMMARY_HEADER,
};

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn sample_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

/// The `index`-th uniform sample. The bit budget is unbounded, so
/// refinement never surfaces as an error.
pub fn sample_stream(master_seed: u64, index: u64, bits: u64) -> Result<PartialQuotientStream> {
    if bits < 64 {
        return Err(Error::InvalidConfig(format!("initial bits must be at least 64, got {bits}")));
    }
    let mut x = PartialQuotientStream::dyadic(sample_seed(master_seed, index), bits);
    if let Some(d) = x.dyadic_source_mut() {
        d.set_max_bits(u64::MAX);
    }
    Ok(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Levy,
    GaussKuzmin,
    Nq,
    Mq,
    CountIntermediates,
    Xnf,
    Variance,
    Pairdep,
    DoubleExceed,
    Openproblem,
    KhinchinAvg,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::Levy,
        ExperimentKind::GaussKuzmin,
        ExperimentKind::Nq,
        ExperimentKind::Mq,
        ExperimentKind::CountIntermediates,
        ExperimentKind::Xnf,
        ExperimentKind::Variance,
        ExperimentKind::Pairdep,
        ExperimentKind::DoubleExceed,
        ExperimentKind::Openproblem,
        ExperimentKind::KhinchinAvg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Levy => "levy",
            ExperimentKind::GaussKuzmin => "gauss_kuzmin",
            ExperimentKind::Nq => "nq",
            ExperimentKind::Mq => "mq",
            ExperimentKind::CountIntermediates => "count_intermediates",
            ExperimentKind::Xnf => "xnf",
            ExperimentKind::Variance => "variance",
            ExperimentKind::Pairdep => "pairdep",
            ExperimentKind::DoubleExceed => "double_exceed",
            ExperimentKind::Openproblem => "openproblem",
            ExperimentKind::KhinchinAvg => "khinchin_avg",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment `{s}`")))
    }
}

/// Experiment-specific parameters; empty lists take the defaults below.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub q: Vec<u64>,
    pub n: Vec<u64>,
    pub k: Vec<u64>,
    pub m: Vec<u64>,
    pub gamma: Option<f64>,
    pub delta: f64,
    pub weight: Option<WeightFunction>,
    pub set: HeightSet,
    /// Largest `Q` for which the mq experiment also enumerates `F_Q`.
    pub farey_limit: u64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            q: Vec::new(),
            n: Vec::new(),
            k: Vec::new(),
            m: Vec::new(),
            gamma: None,
            delta: 0.5,
            weight: None,
            set: HeightSet::All,
            farey_limit: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub samples: u64,
    pub master_seed: u64,
    pub initial_bits: u64,
    pub params: Params,
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, samples: u64, master_seed: u64) -> Self {
        Self {
            experiment,
            samples,
            master_seed,
            initial_bits: 256,
            params: Params::default(),
            threads: 1,
        }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// Runs the experiment and returns rows sorted by `(param, index, stat)`.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if config.samples == 0 {
        return Err(Error::InvalidConfig("samples must be positive".into()));
    }
    if config.initial_bits < 64 {
        return Err(Error::InvalidConfig("initial bits must be at least 64".into()));
    }
    if config.threads == 0 {
        return Err(Error::InvalidConfig("threads must be positive".into()));
    }
    let plan = experiments::Plan::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let per_sample: Vec<Result<Vec<ResultRow>>> = pool.install(|| {
        (0..config.samples)
            .into_par_iter()
            .map(|i| {
                let mut x = sample_stream(config.master_seed, i, config.initial_bits)?;
                plan.sample_rows(i, &mut x)
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_sample {
        rows.extend(r?);
    }
    let pooled = plan.pooled_rows(&rows)?;
    rows.extend(pooled);
    sort_rows(&mut rows);
    Ok(rows)
}
