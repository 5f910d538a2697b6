//! `psph`: mine patterns, build histograms and estimate `LIKE` selectivity.
//!
//! Exit status is 0 on success, 2 on a usage error and 1 on any runtime
//! failure. `PSPH_LOG` (an env_logger filter such as `debug`) overrides the
//! verbosity flags.

mod output;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};

use psph_core::format::{load_catalog, load_patterns, write_catalog, write_patterns};
use psph_core::synth::{synth, SynthSpec};
use psph_core::workload::{generate, read_queries, write_queries};
use psph_core::{
    build, eliminate_redundant, estimate, evaluate, mine, EncapsulatedAggregate, Estimate, EstimatorConfig,
    EvaluationConfig, EvaluationReport, Histogram, HistogramMeta, LikePredicate, MinerConfig, Minsup, Mode, Query,
    QueryGroup, Rational, RedundancyConfig, Scalar, SequenceDatabase, WorkloadSpec,
};

use output::with_output;

#[derive(Parser, Debug)]
#[command(name = "psph", version, about = "Selectivity estimation for SQL LIKE predicates")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine frequent closed sequence patterns from a dataset.
    Mine(MineArgs),
    /// Build a histogram catalog from a pattern file.
    Build(BuildArgs),
    /// Estimate the selectivity of predicates against a catalog.
    Estimate(EstimateArgs),
    /// Compare estimates with true selectivities over a workload.
    Evaluate(EvaluateArgs),
    /// Generate a query workload from a dataset.
    Genq(GenqArgs),
    /// Write a deterministic synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Positional,
    Regular,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Positional => Mode::Positional,
            ModeArg::Regular => Mode::Regular,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AggregateArg {
    Max,
    Min,
}

#[derive(Args, Debug)]
struct MineArgs {
    /// Dataset, one row per line.
    #[arg(long, alias = "dataset")]
    input: PathBuf,
    /// Row count (`120`), percentage (`1.5%`) or fraction (`0.015`).
    #[arg(long, default_value = "1.5%")]
    minsup: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Positional)]
    mode: ModeArg,
    /// Disable BackScan pruning; the output is identical, only slower.
    #[arg(long)]
    no_backscan: bool,
    /// Only report patterns with at most this many literals.
    #[arg(long)]
    max_literals: Option<usize>,
    /// Pattern file to write (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long)]
    patterns: PathBuf,
    #[arg(long, default_value_t = 2048)]
    buckets: usize,
    /// Information-content threshold for redundant pattern elimination.
    #[arg(long, default_value_t = psph_core::histogram::DEFAULT_DELTA)]
    rpe_delta: f64,
    /// Keep redundant patterns.
    #[arg(long, conflicts_with = "rpe_delta")]
    no_rpe: bool,
    /// No-match estimate in percent of the minimum support, stored in the catalog.
    #[arg(long, default_value_t = psph_core::histogram::DEFAULT_T_PERCENT)]
    t_percent: f64,
    /// Catalog file to write (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimatorArgs {
    /// Partition length filter in literals.
    #[arg(long, default_value_t = 1)]
    epsilon: usize,
    /// Override the catalog's no-match percentage.
    #[arg(long)]
    t_percent: Option<f64>,
    #[arg(long)]
    no_partitioning: bool,
    /// How encapsulating endpoint frequencies are combined.
    #[arg(long, value_enum, default_value_t = AggregateArg::Max)]
    encapsulated: AggregateArg,
}

impl EstimatorArgs {
    fn config(&self, h: &Histogram) -> Result<EstimatorConfig> {
        let mut cfg = EstimatorConfig::for_histogram(h)
            .epsilon(self.epsilon)
            .partitioning(!self.no_partitioning)
            .encapsulated_aggregate(match self.encapsulated {
                AggregateArg::Max => EncapsulatedAggregate::Max,
                AggregateArg::Min => EncapsulatedAggregate::Min,
            });
        if let Some(t) = self.t_percent {
            cfg = cfg.t_percent(t);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    catalog: PathBuf,
    /// A single LIKE predicate.
    #[arg(long, required_unless_present = "queries", conflicts_with = "queries")]
    pattern: Option<String>,
    /// Query file (repeatable).
    #[arg(long)]
    queries: Vec<PathBuf>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
    /// Query file (repeatable).
    #[arg(long, required = true)]
    queries: Vec<PathBuf>,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Positive queries with at most this many matching rows are not scored.
    #[arg(long, default_value_t = 10)]
    exclusion_threshold: u64,
    /// Compute errors with exact rational arithmetic.
    #[arg(long)]
    exact: bool,
    /// Append the mean estimation time to the report.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenqArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Query group 1, 2 or 3 (repeatable; default all three).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    group: Vec<u8>,
    /// Queries per group.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 5000)]
    rows: usize,
    /// Number of distinct letters, at most 52.
    #[arg(long, default_value_t = 26)]
    alphabet: usize,
    #[arg(long, default_value_t = 18)]
    min_length: usize,
    #[arg(long, default_value_t = 60)]
    max_length: usize,
    #[arg(long, default_value_t = 400)]
    lexicon: usize,
    #[arg(long, default_value_t = 1.0)]
    letter_skew: f64,
    #[arg(long, default_value_t = 1.1)]
    word_skew: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(&cli);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psph: error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn init_logging(cli: &Cli) {
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => LevelFilter::Error,
        (false, 0) => LevelFilter::Warn,
        (false, 1) => LevelFilter::Info,
        (false, 2) => LevelFilter::Debug,
        _ => LevelFilter::Trace,
    };
    let mut b = env_logger::Builder::new();
    b.filter_level(level).format_timestamp(None);
    if let Ok(filter) = std::env::var("PSPH_LOG") {
        b.parse_filters(&filter);
    }
    b.init();
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Mine(a) => cmd_mine(a),
        Command::Build(a) => cmd_build(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Genq(a) => cmd_genq(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn load_dataset(path: &Path) -> Result<SequenceDatabase> {
    let db = SequenceDatabase::load(path).with_context(|| format!("cannot read dataset {}", path.display()))?;
    if db.is_empty() {
        anyhow::bail!("dataset {} has no rows", path.display());
    }
    info!("{}: {} rows", path.display(), db.size());
    Ok(db)
}

fn load_histogram(path: &Path) -> Result<Histogram> {
    load_catalog(path).with_context(|| format!("cannot read catalog {}", path.display()))
}

fn load_workload(paths: &[PathBuf]) -> Result<Vec<Query>> {
    let mut out = Vec::new();
    for p in paths {
        let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
        out.extend(read_queries(BufReader::new(f)).with_context(|| format!("in {}", p.display()))?);
    }
    Ok(out)
}

fn cmd_mine(a: MineArgs) -> Result<()> {
    let db = load_dataset(&a.input)?;
    let minsup: Minsup = a.minsup.parse()?;
    let cfg = MinerConfig::new(minsup)
        .mode(a.mode.into())
        .backscan(!a.no_backscan)
        .max_pattern_literals(a.max_literals);
    let t = Instant::now();
    let set = mine(&db, &cfg)?;
    info!(
        "mined {} {} patterns at minsup {} in {:.2?}",
        set.len(),
        set.mode,
        set.minsup_count,
        t.elapsed()
    );
    with_output(a.out.as_deref(), |w| Ok(write_patterns(&set, w)?))
}

fn cmd_build(a: BuildArgs) -> Result<()> {
    let set = load_patterns(&a.patterns).with_context(|| format!("cannot read patterns {}", a.patterns.display()))?;
    let rpe = if a.no_rpe {
        RedundancyConfig::disabled()
    } else {
        RedundancyConfig::with_delta(a.rpe_delta)
    };
    let db_size = set.db_size as u64;
    let elim = eliminate_redundant(set.patterns(), &rpe, db_size)?;
    info!("kept {} of {} patterns", elim.kept.len(), set.len());
    let meta = HistogramMeta::new(db_size, set.minsup_count).t_percent(a.t_percent);
    let h = build(&elim.kept, a.buckets, meta)?;
    info!("{} buckets", h.buckets().len());
    with_output(a.out.as_deref(), |w| Ok(write_catalog(&h, w)?))
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    let h = load_histogram(&a.catalog)?;
    let cfg = a.estimator.config(&h)?;
    if let Some(text) = &a.pattern {
        let p = LikePredicate::parse(text)?;
        let r: Estimate = estimate(&p, &h, &cfg);
        let witness = if r.witness.is_empty() {
            "-".to_string()
        } else {
            r.witness.iter().map(|b| b.endpoint.to_string()).collect::<Vec<_>>().join(",")
        };
        return with_output(a.out.as_deref(), |w| {
            writeln!(w, "{}\t{}\t{}\t{}", p.raw(), r.selectivity, r.match_case, witness)?;
            Ok(())
        });
    }
    let queries = load_workload(&a.queries)?;
    with_output(a.out.as_deref(), |w| {
        writeln!(w, "pattern\tselectivity\tmatch_case")?;
        for q in &queries {
            let r: Estimate = estimate(&q.predicate, &h, &cfg);
            writeln!(w, "{}\t{}\t{}", q.predicate.raw(), r.selectivity, r.match_case)?;
        }
        Ok(())
    })
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let db = load_dataset(&a.dataset)?;
    let h = load_histogram(&a.catalog)?;
    let mut cfg = EvaluationConfig::new(a.estimator.config(&h)?);
    cfg.exclusion_threshold = a.exclusion_threshold;
    let queries = load_workload(&a.queries)?;
    if a.exact {
        let r: EvaluationReport<Rational> = evaluate(&queries, &db, &h, &cfg)?;
        report(&r, &a)
    } else {
        let r: EvaluationReport<f64> = evaluate(&queries, &db, &h, &cfg)?;
        report(&r, &a)
    }
}

fn report<S: Scalar>(r: &EvaluationReport<S>, a: &EvaluateArgs) -> Result<()> {
    if let Some(m) = &r.mean_relative_error {
        info!("mean relative error over positive groups: {m}");
    }
    with_output(a.out.as_deref(), |w| Ok(r.write_tsv(w, a.timing)?))
}

fn cmd_genq(a: GenqArgs) -> Result<()> {
    let db = load_dataset(&a.dataset)?;
    let groups: Vec<QueryGroup> = if a.group.is_empty() {
        QueryGroup::ALL.to_vec()
    } else {
        a.group.iter().map(|g| g.to_string().parse()).collect::<psph_core::Result<_>>()?
    };
    let spec = WorkloadSpec::default().seed(a.seed).count(a.count);
    let mut queries = Vec::new();
    for g in groups {
        let generated = generate(&db, g, &spec)?;
        info!("group {g}: {} queries", generated.len());
        queries.extend(generated.into_iter().map(|p| Query::new(g, p)));
    }
    with_output(a.out.as_deref(), |w| Ok(write_queries(&queries, w)?))
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let mut spec = SynthSpec::new(a.rows, a.alphabet, a.min_length..=a.max_length, a.seed);
    spec.lexicon_size = a.lexicon;
    spec.letter_skew = a.letter_skew;
    spec.word_skew = a.word_skew;
    let db = synth(&spec)?;
    with_output(a.out.as_deref(), |w| {
        for row in db.rows() {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })
}
