//! Command-line front end: reproducible batch runs over corpus files.
//!
//! Every subcommand writes its data files plus a `manifest.json` into the
//! output directory. Outputs are deterministic for fixed inputs and
//! flags, at any `--threads` setting. Exit codes: 0 success, 1 input
//! error, 2 internal error. `NATORIENT_LOG` controls log verbosity.

mod manifest;
mod write;

pub use manifest::{InputDigest, RunManifest};

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::corpus::{CohortSpec, Corpus, CountryCode, Year};
use crate::country_report::{self, ClassificationMode};
use crate::impact;
use crate::indicators::{self, Counting};
use crate::nullmodel::{self, WalkConfig};
use crate::synthgen;
use crate::trends::{self, Grouping, Indicator};

use manifest::ManifestBuilder;

#[derive(Debug)]
pub enum CliError {
    /// Bad inputs or flags; exit code 1.
    Input(String),
    /// Failures outside the user's control (output IO, pool setup); 2.
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

macro_rules! input_error_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Input(e.to_string())
            }
        })*
    };
}

input_error_from!(
    crate::corpus::LoadError,
    crate::corpus::CorpusError,
    crate::indicators::IndicatorError,
    crate::impact::ImpactError,
    crate::trends::TrendError,
    crate::nullmodel::WalkError,
    crate::country_report::CountryReportError
);

impl From<synthgen::ScenarioError> for CliError {
    fn from(e: synthgen::ScenarioError) -> Self {
        match e {
            synthgen::ScenarioError::Write { .. } => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "natorient",
    version,
    about = "Journal national-orientation and citation-impact analytics"
)]
struct Cli {
    /// Worker threads for per-journal computations (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Path to articles.csv.
    #[arg(long)]
    articles: PathBuf,
    /// Path to journals.csv.
    #[arg(long)]
    journals: PathBuf,
    /// Path to citations.csv.
    #[arg(long)]
    citations: PathBuf,
}

impl CorpusArgs {
    fn load(&self) -> Result<Corpus, CliError> {
        Ok(crate::load_corpus(&self.articles, &self.journals, &self.citations)?)
    }

    fn digest_into(&self, manifest: &mut ManifestBuilder) -> Result<(), CliError> {
        manifest.input(&self.articles)?;
        manifest.input(&self.journals)?;
        manifest.input(&self.citations)?;
        Ok(())
    }
}

#[derive(Debug, Args)]
struct CohortArgs {
    /// First admissible entry year.
    #[arg(long, default_value_t = 1997)]
    entry_from: Year,
    /// Last admissible entry year.
    #[arg(long, default_value_t = 2010)]
    entry_to: Year,
    /// Final year of the follow-up period.
    #[arg(long, default_value_t = 2019)]
    end_year: Year,
    /// Minimum average publications per year over the active period.
    #[arg(long, default_value_t = 10.0)]
    min_avg_pubs: f64,
    /// Maximum share (percent) of articles without affiliations.
    #[arg(long, default_value_t = 50.0)]
    max_unaffiliated: f64,
    /// Keep journals with years without publications.
    #[arg(long)]
    allow_gaps: bool,
}

impl CohortArgs {
    fn spec(&self) -> CohortSpec {
        CohortSpec {
            entry_from: self.entry_from,
            entry_to: self.entry_to,
            end_year: self.end_year,
            min_avg_pubs_per_year: self.min_avg_pubs,
            max_unaffiliated_share: self.max_unaffiliated,
            require_uninterrupted: !self.allow_gaps,
        }
    }

    fn record(&self, manifest: &mut ManifestBuilder) {
        manifest.parameter("entry_from", self.entry_from);
        manifest.parameter("entry_to", self.entry_to);
        manifest.parameter("end_year", self.end_year);
        manifest.parameter("min_avg_pubs", self.min_avg_pubs);
        manifest.parameter("max_unaffiliated", self.max_unaffiliated);
        manifest.parameter("allow_gaps", self.allow_gaps);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountingArg {
    Whole,
    Countryship,
}

impl From<CountingArg> for Counting {
    fn from(c: CountingArg) -> Counting {
        match c {
            CountingArg::Whole => Counting::WholeArticle,
            CountingArg::Countryship => Counting::Countryship,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and validate a corpus, reporting record counts.
    Validate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Optional directory for the run manifest.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Per-journal INO variant table for one year.
    Indicators {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        year: Year,
        /// Counting scheme for the ino_c column.
        #[arg(long, value_enum, default_value_t = CountingArg::Whole)]
        counting: CountingArg,
    },
    /// Impact factors per journal-year plus the national ratio series.
    Impact {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out_dir: PathBuf,
        /// First year (default: first corpus year).
        #[arg(long)]
        from: Option<Year>,
        /// Last year (default: last corpus year).
        #[arg(long)]
        to: Option<Year>,
        /// National/non-national INO-P threshold for the ratio series.
        #[arg(long, default_value_t = 50.0)]
        ino_threshold: f64,
    },
    /// Per-journal trend regressions over a cohort.
    Trends {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        cohort: CohortArgs,
        /// Significance level for the slope t-test.
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Cohort trend shares, begin/end medians, and attribute breakdowns.
    Cohort {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        cohort: CohortArgs,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Random-walk null model, optionally compared with a corpus cohort.
    Walk {
        #[arg(long)]
        out_dir: PathBuf,
        /// Number of walk steps (years of follow-up).
        #[arg(long)]
        steps: u32,
        #[arg(long, default_value_t = 10)]
        num_classes: u32,
        /// Start class (default: the top class).
        #[arg(long)]
        start_class: Option<u32>,
        /// Keep journals whose begin-year class is at least this.
        #[arg(long, default_value_t = 10)]
        min_begin_class: u32,
        /// Corpus files: pass all three to compare against the model.
        #[arg(long)]
        articles: Option<PathBuf>,
        #[arg(long)]
        journals: Option<PathBuf>,
        #[arg(long)]
        citations: Option<PathBuf>,
        #[command(flatten)]
        cohort: CohortArgs,
    },
    /// Per-country national-journal reports and domestic/foreign splits.
    Country {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out_dir: PathBuf,
        /// Comma-separated country codes.
        #[arg(long, value_delimiter = ',', required = true)]
        countries: Vec<String>,
        /// Country whose national journals the split also reports.
        #[arg(long)]
        target_country: Option<String>,
        /// Classification year (default: the cohort end year).
        #[arg(long)]
        reference_year: Option<Year>,
        /// First year of the domestic/foreign series (default: first
        /// corpus year).
        #[arg(long)]
        from: Option<Year>,
        #[command(flatten)]
        cohort: CohortArgs,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// National-journal INO-P threshold.
        #[arg(long, default_value_t = 50.0)]
        ino_threshold: f64,
    },
    /// Generate a synthetic corpus from a TOML scenario.
    Generate {
        /// Scenario file.
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Pearson correlations between the six INO variants for one year.
    Correlate {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        year: Year,
    },
}

/// Parses the process arguments, runs the subcommand, and returns the
/// process exit code.
pub fn run() -> i32 {
    let env = env_logger::Env::new().filter_or("NATORIENT_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            match e {
                CliError::Input(m) => eprintln!("error: {m}"),
                CliError::Internal(m) => eprintln!("internal error: {m}"),
            }
            code
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if cli.threads == 0 {
        return dispatch(cli.command);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn prepare_out_dir(out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", out_dir.display())))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { corpus, out_dir } => cmd_validate(corpus, out_dir),
        Command::Indicators {
            corpus,
            out_dir,
            year,
            counting,
        } => cmd_indicators(corpus, out_dir, year, counting),
        Command::Impact {
            corpus,
            out_dir,
            from,
            to,
            ino_threshold,
        } => cmd_impact(corpus, out_dir, from, to, ino_threshold),
        Command::Trends {
            corpus,
            out_dir,
            cohort,
            alpha,
        } => cmd_trends(corpus, out_dir, cohort, alpha),
        Command::Cohort {
            corpus,
            out_dir,
            cohort,
            alpha,
        } => cmd_cohort(corpus, out_dir, cohort, alpha),
        Command::Walk {
            out_dir,
            steps,
            num_classes,
            start_class,
            min_begin_class,
            articles,
            journals,
            citations,
            cohort,
        } => cmd_walk(
            out_dir,
            steps,
            num_classes,
            start_class,
            min_begin_class,
            articles,
            journals,
            citations,
            cohort,
        ),
        Command::Country {
            corpus,
            out_dir,
            countries,
            target_country,
            reference_year,
            from,
            cohort,
            alpha,
            ino_threshold,
        } => cmd_country(
            corpus,
            out_dir,
            countries,
            target_country,
            reference_year,
            from,
            cohort,
            alpha,
            ino_threshold,
        ),
        Command::Generate { scenario, out_dir } => cmd_generate(scenario, out_dir),
        Command::Correlate {
            corpus,
            out_dir,
            year,
        } => cmd_correlate(corpus, out_dir, year),
    }
}

fn cmd_validate(corpus_args: CorpusArgs, out_dir: Option<PathBuf>) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("validate");
    corpus_args.digest_into(&mut manifest)?;
    let corpus = corpus_args.load()?;
    println!("articles: {}", corpus.n_articles());
    println!("citable_articles: {}", corpus.n_citable_articles());
    println!("journals: {}", corpus.n_journals());
    println!("citations: {}", corpus.n_citations());
    match corpus.year_range() {
        Some((lo, hi)) => println!("years: {lo}-{hi}"),
        None => println!("years: none"),
    }
    println!("corpus ok");
    if let Some(out_dir) = out_dir {
        prepare_out_dir(&out_dir)?;
        manifest.write(&out_dir)?;
    }
    Ok(())
}

fn cmd_indicators(
    corpus_args: CorpusArgs,
    out_dir: PathBuf,
    year: Year,
    counting: CountingArg,
) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("indicators");
    corpus_args.digest_into(&mut manifest)?;
    manifest.parameter("year", year);
    manifest.parameter("counting", format!("{counting:?}").to_lowercase());
    let corpus = corpus_args.load()?;
    prepare_out_dir(&out_dir)?;
    let rows = indicators::indicator_table(
        &corpus,
        corpus.journals_active_in(year),
        year,
        counting.into(),
    );
    let path = write::write_indicators(&out_dir, &rows)?;
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}

fn cmd_impact(
    corpus_args: CorpusArgs,
    out_dir: PathBuf,
    from: Option<Year>,
    to: Option<Year>,
    ino_threshold: f64,
) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("impact");
    corpus_args.digest_into(&mut manifest)?;
    let corpus = corpus_args.load()?;
    let (lo, hi) = corpus
        .year_range()
        .ok_or_else(|| CliError::Input("corpus has no articles".to_string()))?;
    let from = from.unwrap_or(lo);
    let to = to.unwrap_or(hi);
    if from > to {
        return Err(CliError::Input(format!("--from {from} is after --to {to}")));
    }
    manifest.parameter("from", from);
    manifest.parameter("to", to);
    manifest.parameter("ino_threshold", ino_threshold);
    prepare_out_dir(&out_dir)?;
    let rows = impact::impact_table(&corpus, from..=to);
    let path = write::write_impact(&out_dir, &rows)?;
    manifest.output(&path);
    let series = impact::national_ratio_series(&corpus, from..=to, ino_threshold);
    let path = write::write_ratio_series(&out_dir, &series)?;
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}

fn cmd_trends(
    corpus_args: CorpusArgs,
    out_dir: PathBuf,
    cohort_args: CohortArgs,
    alpha: f64,
) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("trends");
    corpus_args.digest_into(&mut manifest)?;
    cohort_args.record(&mut manifest);
    manifest.parameter("alpha", alpha);
    let corpus = corpus_args.load()?;
    let cohort = crate::select_cohort(&corpus, &cohort_args.spec())?;
    let journals: Vec<&String> = cohort.iter().collect();
    let rows: Vec<_> = journals
        .par_iter()
        .flat_map_iter(|journal_id| {
            let corpus = &corpus;
            let end_year = cohort_args.end_year;
            Indicator::ALL.into_iter().map(move |indicator| {
                let trend = trends::journal_trend(corpus, journal_id, indicator, alpha, end_year);
                ((*journal_id).clone(), indicator, trend)
            })
        })
        .collect();
    prepare_out_dir(&out_dir)?;
    let path = write::write_trends(&out_dir, &rows)?;
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}

fn cmd_cohort(
    corpus_args: CorpusArgs,
    out_dir: PathBuf,
    cohort_args: CohortArgs,
    alpha: f64,
) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("cohort");
    corpus_args.digest_into(&mut manifest)?;
    cohort_args.record(&mut manifest);
    manifest.parameter("alpha", alpha);
    let corpus = corpus_args.load()?;
    let spec = cohort_args.spec();
    let cohort = crate::select_cohort(&corpus, &spec)?;
    let end_year = spec.end_year;
    let shares = trends::cohort_trend_summary(&corpus, &cohort, &Indicator::ALL, alpha, end_year)?;
    let medians = trends::begin_end_medians(&corpus, &cohort, &Indicator::ALL, end_year)?;
    prepare_out_dir(&out_dir)?;
    let path = write::write_cohort_summary(&out_dir, &shares, &medians)?;
    manifest.output(&path);
    let mut breakdown = Vec::new();
    for grouping in [Grouping::Discipline, Grouping::Language, Grouping::OpenAccess] {
        breakdown.extend(trends::cohort_breakdown(&corpus, &cohort, grouping, alpha, end_year)?);
    }
    let path = write::write_breakdown(&out_dir, &breakdown)?;
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_walk(
    out_dir: PathBuf,
    steps: u32,
    num_classes: u32,
    start_class: Option<u32>,
    min_begin_class: u32,
    articles: Option<PathBuf>,
    journals: Option<PathBuf>,
    citations: Option<PathBuf>,
    cohort_args: CohortArgs,
) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("walk");
    manifest.parameter("steps", steps);
    manifest.parameter("num_classes", num_classes);
    let start = start_class.unwrap_or(num_classes);
    manifest.parameter("start_class", start);
    let config = WalkConfig::new(num_classes, start, steps)?;
    let dist = nullmodel::walk_distribution(&config);
    prepare_out_dir(&out_dir)?;
    let path = write::write_walk(&out_dir, &dist)?;
    manifest.output(&path);

    let corpus_paths = match (articles, journals, citations) {
        (Some(a), Some(j), Some(c)) => Some(CorpusArgs {
            articles: a,
            journals: j,
            citations: c,
        }),
        (None, None, None) => None,
        _ => {
            return Err(CliError::Input(
                "pass --articles, --journals and --citations together".to_string(),
            ))
        }
    };
    if let Some(corpus_args) = corpus_paths {
        corpus_args.digest_into(&mut manifest)?;
        cohort_args.record(&mut manifest);
        manifest.parameter("min_begin_class", min_begin_class);
        let corpus = corpus_args.load()?;
        let cohort = crate::select_cohort(&corpus, &cohort_args.spec())?;
        let empirical = nullmodel::empirical_net_decline(
            &corpus,
            cohort.iter().map(String::as_str),
            min_begin_class,
            cohort_args.end_year,
            num_classes,
        )?;
        let report = nullmodel::compare_distributions(&dist, &empirical);
        let path = write::write_compare(&out_dir, &report)?;
        manifest.output(&path);
        println!("journals: {}", report.n_empirical);
        println!("tv_distance: {}", write::fixed(report.tv_distance, 6));
        match &report.chi_square {
            Some(chi) => println!(
                "chi_square: {} df: {} p_value: {}",
                write::fixed(chi.statistic, 6),
                chi.df,
                write::fixed(chi.p_value, 9)
            ),
            None => println!("chi_square: undefined"),
        }
    }
    manifest.write(&out_dir)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_country(
    corpus_args: CorpusArgs,
    out_dir: PathBuf,
    countries: Vec<String>,
    target_country: Option<String>,
    reference_year: Option<Year>,
    from: Option<Year>,
    cohort_args: CohortArgs,
    alpha: f64,
    ino_threshold: f64,
) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("country");
    corpus_args.digest_into(&mut manifest)?;
    cohort_args.record(&mut manifest);
    manifest.parameter("alpha", alpha);
    manifest.parameter("ino_threshold", ino_threshold);
    manifest.parameter("countries", countries.join(","));
    let countries: Vec<CountryCode> = countries
        .iter()
        .map(|c| CountryCode::new(c))
        .collect::<Result<_, _>>()?;
    let target = target_country
        .as_deref()
        .map(CountryCode::new)
        .transpose()?;
    if let Some(t) = target {
        manifest.parameter("target_country", t);
    }
    let corpus = corpus_args.load()?;
    let spec = cohort_args.spec();
    let reference = reference_year.unwrap_or(spec.end_year);
    manifest.parameter("reference_year", reference);
    let rows =
        country_report::country_cohort_report(&corpus, &countries, &spec, ino_threshold, alpha)?;
    prepare_out_dir(&out_dir)?;
    let path = write::write_country_report(&out_dir, &rows)?;
    manifest.output(&path);

    let series_from = from
        .or(corpus.year_range().map(|(lo, _)| lo))
        .unwrap_or(spec.end_year);
    manifest.parameter("from", series_from);
    let mut split_rows = Vec::new();
    let mut sorted = countries.clone();
    sorted.sort_unstable();
    sorted.dedup();
    for country in sorted {
        match country_report::domestic_foreign_split(
            &corpus,
            country,
            series_from..=spec.end_year,
            ino_threshold,
            ClassificationMode::AtYear(reference),
            target,
        ) {
            Ok(points) => split_rows.push((country, points)),
            Err(country_report::CountryReportError::NoAffiliatedArticles { .. }) => {
                log::warn!("{country}: no affiliated articles; skipped in domestic_foreign.csv");
            }
            Err(e) => return Err(e.into()),
        }
    }
    let path = write::write_domestic_foreign(&out_dir, &split_rows)?;
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}

fn cmd_generate(scenario: PathBuf, out_dir: PathBuf) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("generate");
    manifest.input(&scenario)?;
    let config = synthgen::load_scenario(&scenario)?;
    manifest.parameter("seed", config.seed);
    prepare_out_dir(&out_dir)?;
    let generated = synthgen::generate(&config, &out_dir)?;
    println!("articles: {}", generated.n_articles);
    println!("journals: {}", generated.n_journals);
    println!("citations: {}", generated.n_citations);
    manifest.output(&generated.articles_path);
    manifest.output(&generated.journals_path);
    manifest.output(&generated.citations_path);
    manifest.write(&out_dir)?;
    Ok(())
}

fn cmd_correlate(corpus_args: CorpusArgs, out_dir: PathBuf, year: Year) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::new("correlate");
    corpus_args.digest_into(&mut manifest)?;
    manifest.parameter("year", year);
    let corpus = corpus_args.load()?;
    let rows = indicators::indicator_table(
        &corpus,
        corpus.journals_active_in(year),
        year,
        Counting::WholeArticle,
    );
    let table: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r.variants().to_vec()).collect();
    let matrix = trends::pearson_matrix(&table)?;
    println!("journals_used: {}", matrix.n_used);
    println!("journals_dropped: {}", matrix.n_dropped);
    prepare_out_dir(&out_dir)?;
    let path = write::write_correlations(&out_dir, &matrix)?;
    manifest.output(&path);
    manifest.write(&out_dir)?;
    Ok(())
}
