use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use intconv::cf::{cf_of_rational, convergents, intermediates, PartialQuotientStream};
use intconv::exact::{FareyFraction, RawPair};
use intconv::farey::{chi, row_sum_exact, row_sum_formula, HeightSet};
use intconv::harness::{self, ExperimentConfig, ExperimentKind, Params, SUMMARY_HEADER};
use intconv::stats::{
    mq_all_methods, mq_closed_form, mq_via_farey, mq_via_intermediates, ratio_to_f64, FareyTable, WeightFunction,
    WeightValue,
};
use intconv::{Error, Result};

/// Intermediate convergents, Farey fractions and weighted counts.
///
/// Streams (`--x`) are `rational:p/q`, `periodic:[a0;pre|per]` (for example
/// `periodic:[0;|2,3]`), `golden`, or `dyadic:seed=S,bits=B`.
#[derive(Parser)]
#[command(name = "intconv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical continued fraction of p/q.
    Cf { fraction: String },
    /// Principal convergents p_n/q_n for n = 0..=N.
    Convergents {
        #[arg(long)]
        x: String,
        #[arg(long)]
        n: usize,
    },
    /// Intermediate convergents of height at most Q.
    Intermediates {
        #[arg(long)]
        x: String,
        #[arg(long = "Q")]
        q: u64,
    },
    /// chi_beta(x): 1 inside the neighbor interval, 1/2 on its ends, 0 outside.
    Chi {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        x: String,
    },
    /// Expected count of fractions of height q that are convergents.
    FareyRow {
        #[arg(long)]
        q: u64,
    },
    /// Weighted count M_Q(x).
    Mq {
        #[arg(long)]
        x: String,
        #[arg(long = "Q")]
        q: u64,
        #[arg(long, default_value = "harmonic")]
        weight: String,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// Seeded experiment over uniformly sampled reals.
    Montecarlo(MonteCarlo),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Farey,
    Conv,
    Closed,
    All,
}

#[derive(clap::Args)]
struct MonteCarlo {
    #[arg(long)]
    experiment: String,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long = "Q", value_delimiter = ',')]
    q: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    m: Vec<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long)]
    weight: Option<String>,
    /// all, primes, mod:d,r or file:<path>
    #[arg(long, default_value = "all")]
    set: String,
    #[arg(long, default_value_t = 256)]
    bits: u64,
    /// Largest Q at which mq also enumerates F_Q.
    #[arg(long, default_value_t = 2000)]
    farey_limit: u64,
    /// Output file; stdout when absent or `-`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Rationals as p/q.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    json: bool,
    /// Also write per-statistic summaries here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Invariant(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn stream(spec: &str) -> Result<PartialQuotientStream> {
    spec.parse()
}

fn show(v: &WeightValue) -> String {
    match v {
        WeightValue::Exact(r) => format!("{r} ({})", harness::format_sig12(ratio_to_f64(r))),
        WeightValue::Approx(f) => harness::format_sig12(*f),
    }
}

fn execute(command: Command) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Cf { fraction } => {
            let raw: RawPair = fraction.parse()?;
            writeln!(out, "{}", cf_of_rational(&raw.numerator, &raw.denominator)?)?;
        }
        Command::Convergents { x, n } => {
            let mut x = stream(&x)?;
            for c in convergents(&mut x, n)? {
                writeln!(out, "{} {}/{}", c.index, c.p, c.q)?;
            }
        }
        Command::Intermediates { x, q } => {
            let mut x = stream(&x)?;
            let list = intermediates(&mut x, q)?;
            writeln!(out, "level,index,fraction,height")?;
            for it in &list.items {
                writeln!(out, "{},{},{},{}", it.level, it.index, it.fraction, it.height)?;
            }
            let c = list.cutoff;
            let tag = if c.terminated { " (expansion ended)" } else { "" };
            writeln!(out, "# N = {}, a = {}, count = {}{tag}", c.level, c.index, list.items.len())?;
        }
        Command::Chi { beta, x } => {
            let beta: FareyFraction = beta.parse()?;
            writeln!(out, "{}", chi(&beta, &mut stream(&x)?)?)?;
        }
        Command::FareyRow { q } => {
            if q < 2 {
                return Err(Error::InvalidConfig("farey-row needs q >= 2".into()));
            }
            let exact = row_sum_exact(q);
            let value = ratio_to_f64(&exact);
            let formula = row_sum_formula(q);
            if exact.denom().bits() <= 256 {
                writeln!(out, "exact   {exact}")?;
            } else {
                writeln!(out, "exact   <{}-bit denominator>", exact.denom().bits())?;
            }
            writeln!(out, "value   {}", harness::format_sig12(value))?;
            writeln!(out, "formula {}", harness::format_sig12(formula))?;
            writeln!(out, "ratio   {}", harness::format_sig12(formula / value))?;
        }
        Command::Mq { x, q, weight, method } => {
            let g: WeightFunction = weight.parse()?;
            let mut x = stream(&x)?;
            if x.is_rational() {
                eprintln!("note: rational x; fractions with x at an interval end count 1/2 in the Farey sum");
            }
            match method {
                Method::Farey => writeln!(out, "farey  {}", show(&mq_via_farey(&mut x, q, &g)?))?,
                Method::Conv => writeln!(out, "conv   {}", show(&mq_via_intermediates(&mut x, q, &g)?))?,
                Method::Closed => writeln!(out, "closed {}", show(&mq_closed_form(&mut x, q, &g)?))?,
                Method::All => {
                    let table = FareyTable::new(q)?;
                    let rep = mq_all_methods(&mut x, q, &g, Some(&table))?;
                    writeln!(out, "farey  {}", show(rep.farey.as_ref().expect("table given")))?;
                    writeln!(out, "conv   {}", show(&rep.intermediates))?;
                    writeln!(out, "closed {}", show(&rep.closed))?;
                    writeln!(out, "agree  {}", u8::from(rep.agree))?;
                    if !rep.agree && !x.is_rational() {
                        return Err(Error::Invariant("M_Q methods disagree".into()));
                    }
                }
            }
        }
        Command::Montecarlo(mc) => montecarlo(mc)?,
    }
    out.flush()?;
    Ok(())
}

fn montecarlo(mc: MonteCarlo) -> Result<()> {
    let experiment: ExperimentKind = mc.experiment.parse()?;
    let weight = mc.weight.as_deref().map(str::parse::<WeightFunction>).transpose()?;
    let set: HeightSet = mc.set.parse()?;
    let params = Params {
        q: mc.q,
        n: mc.n,
        k: mc.k,
        m: mc.m,
        gamma: mc.gamma,
        delta: mc.delta,
        weight,
        set,
        farey_limit: mc.farey_limit,
    };
    let mut config = ExperimentConfig::new(experiment, mc.samples, mc.seed)
        .with_params(params)
        .with_threads(mc.threads);
    config.initial_bits = mc.bits;
    let rows = harness::run(&config)?;
    let sink: Box<dyn Write> = match mc.out.as_deref() {
        None => Box::new(io::stdout().lock()),
        Some(p) if p.as_os_str() == "-" => Box::new(io::stdout().lock()),
        Some(p) => Box::new(File::create(p)?),
    };
    let mut sink = BufWriter::new(sink);
    if mc.json {
        harness::write_json(&rows, mc.exact, &mut sink)?;
    } else {
        harness::write_csv(&rows, mc.exact, &mut sink)?;
    }
    sink.flush()?;
    if let Some(path) = mc.summary {
        let mut s = BufWriter::new(File::create(path)?);
        writeln!(s, "{SUMMARY_HEADER}")?;
        for line in harness::aggregate(&rows) {
            writeln!(s, "{}", line.csv_line())?;
        }
        s.flush()?;
    }
    Ok(())
}
