//! Seeded synthetic-corpus generator.
//!
//! Emits the three corpus CSVs with controllable national-orientation
//! dynamics. Article counts are fully deterministic; randomness (one
//! ChaCha8 stream per scenario) only drives country assignment, walk
//! paths and citation mixes, so a fixed seed reproduces byte-identical
//! files.

mod scenario;

pub use scenario::{
    default_filler_pool, load_scenario, Dynamics, GroupConfig, ScenarioConfig, ScenarioError,
};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corpus::{CountryCode, Year};
use crate::nullmodel::{WalkConfig, WalkSampler};

/// Journal holding the synthesized citing documents (doc_type `other`,
/// so they never enter article counts or impact denominators).
pub const EXTERNAL_JOURNAL_ID: &str = "EXT";

/// Paths and row counts of one generated corpus, plus the ground-truth
/// walk classes per journal for walk-dynamics groups.
#[derive(Debug)]
pub struct GeneratedCorpus {
    pub articles_path: PathBuf,
    pub journals_path: PathBuf,
    pub citations_path: PathBuf,
    pub n_journals: u64,
    pub n_articles: u64,
    pub n_citations: u64,
    pub walk_traces: BTreeMap<String, Vec<u32>>,
}

struct CsvOut {
    writer: csv::Writer<std::io::BufWriter<std::fs::File>>,
    path: PathBuf,
    rows: u64,
}

impl CsvOut {
    fn create(path: PathBuf, seed: u64, header: &[&str]) -> Result<Self, ScenarioError> {
        let io_err = |source| ScenarioError::Write {
            path: path.display().to_string(),
            source,
        };
        let mut file = std::fs::File::create(&path).map_err(io_err)?;
        writeln!(file, "# natorient synthgen rng=chacha8 seed={seed}").map_err(io_err)?;
        let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
        writer.write_record(header).map_err(|e| csv_err(&path, e))?;
        Ok(CsvOut {
            writer,
            path,
            rows: 0,
        })
    }

    fn write<I, S>(&mut self, record: I) -> Result<(), ScenarioError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.rows += 1;
        self.writer
            .write_record(record)
            .map_err(|e| csv_err(&self.path, e))
    }

    fn finish(mut self) -> Result<(PathBuf, u64), ScenarioError> {
        self.writer.flush().map_err(|source| ScenarioError::Write {
            path: self.path.display().to_string(),
            source,
        })?;
        Ok((self.path, self.rows))
    }
}

fn csv_err(path: &Path, source: csv::Error) -> ScenarioError {
    ScenarioError::Write {
        path: path.display().to_string(),
        source: std::io::Error::other(source),
    }
}

/// Generates `articles.csv`, `journals.csv` and `citations.csv` under
/// `out_dir`. Deterministic for a fixed config; the emitted files pass
/// corpus loading and validation.
pub fn generate(config: &ScenarioConfig, out_dir: &Path) -> Result<GeneratedCorpus, ScenarioError> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| ScenarioError::Write {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut articles = CsvOut::create(
        out_dir.join("articles.csv"),
        config.seed,
        &["article_id", "journal_id", "year", "doc_type", "countries"],
    )?;
    let mut citations = CsvOut::create(
        out_dir.join("citations.csv"),
        config.seed,
        &["citing_article_id", "cited_journal_id", "cited_pub_year"],
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut journal_rows: Vec<[String; 5]> = Vec::new();
    let mut walk_traces = BTreeMap::new();
    let mut external_citers = false;

    for group in &config.groups {
        let fillers = group.effective_fillers();
        let (entry_from, entry_to) = group.entry_years(config.first_year);
        let entry_span = (entry_to - entry_from + 1) as u32;
        let sampler = match group.dynamics {
            Dynamics::Walk => {
                let start = group.walk_start_class.unwrap_or(group.walk_classes);
                let max_steps = (config.last_year - entry_from) as u32;
                let walk_config = WalkConfig::new(group.walk_classes, start, max_steps)
                    .map_err(|e| ScenarioError::Infeasible(e.to_string()))?;
                Some(WalkSampler::new(walk_config).map_err(|e| ScenarioError::Infeasible(e.to_string()))?)
            }
            Dynamics::Drift => None,
        };
        for j in 0..group.journals {
            let journal_id = format!("{}-{:05}", group.name, j);
            let entry = entry_from + (j % entry_span) as Year;
            journal_rows.push(journal_row(group, &journal_id, j));
            let jitter_draw: f64 = rng.random();
            let jitter = 1.0 + group.citation_jitter * (2.0 * jitter_draw - 1.0);
            let path = sampler.as_ref().map(|s| {
                let steps = (config.last_year - entry) as u32;
                s.sample_path(steps, &mut rng)
            });
            if let Some(path) = &path {
                walk_traces.insert(journal_id.clone(), path.clone());
            }
            for year in entry..=config.last_year {
                let age = year - entry;
                let n = group.articles_at(age);
                if n > 0 {
                    write_year_articles(
                        &mut articles,
                        &mut rng,
                        group,
                        &fillers,
                        &journal_id,
                        year,
                        age,
                        n,
                        path.as_deref(),
                    )?;
                }
                write_year_citations(
                    &mut articles,
                    &mut citations,
                    &mut rng,
                    group,
                    &fillers,
                    &journal_id,
                    year,
                    entry,
                    jitter,
                    &mut external_citers,
                )?;
            }
        }
    }

    let mut journals = CsvOut::create(
        out_dir.join("journals.csv"),
        config.seed,
        &["journal_id", "languages", "open_access", "field_ids", "discipline"],
    )?;
    for row in &journal_rows {
        journals.write(row.iter().map(String::as_bytes))?;
    }
    if external_citers {
        journals.write([
            EXTERNAL_JOURNAL_ID,
            "english_only",
            "false",
            "XFIELD",
            "other",
        ])?;
    }

    let (articles_path, n_articles) = articles.finish()?;
    let (citations_path, n_citations) = citations.finish()?;
    let (journals_path, n_journals) = journals.finish()?;
    log::info!(
        "generated {n_articles} articles, {n_journals} journals, {n_citations} citations in {}",
        out_dir.display()
    );
    Ok(GeneratedCorpus {
        articles_path,
        journals_path,
        citations_path,
        n_journals,
        n_articles,
        n_citations,
        walk_traces,
    })
}

fn journal_row(group: &GroupConfig, journal_id: &str, index: u32) -> [String; 5] {
    let fields = if group.rotate_fields {
        group.fields[index as usize % group.fields.len()].clone()
    } else {
        group.fields.join(";")
    };
    [
        journal_id.to_string(),
        group.language.as_str().to_string(),
        group.open_access.to_string(),
        fields,
        group.discipline.as_str().to_string(),
    ]
}

#[allow(clippy::too_many_arguments)]
fn write_year_articles(
    articles: &mut CsvOut,
    rng: &mut ChaCha8Rng,
    group: &GroupConfig,
    fillers: &[CountryCode],
    journal_id: &str,
    year: Year,
    age: i32,
    n: u32,
    walk_path: Option<&[u32]>,
) -> Result<(), ScenarioError> {
    let top = group.top_country;
    match walk_path {
        Some(path) => {
            // Class-exact composition: the top country takes
            // floor(n * class / num_classes) single-country articles, the
            // remainder cycles through the fillers, each below the top.
            let class = path[age as usize];
            let top_count = (n as u64 * class as u64 / group.walk_classes as u64) as u32;
            for i in 0..n {
                let code = if i < top_count {
                    top
                } else {
                    fillers[((i - top_count) as usize) % fillers.len()]
                };
                articles.write([
                    format!("{journal_id}.{year}.{i}").as_bytes(),
                    journal_id.as_bytes(),
                    format!("{year}").as_bytes(),
                    b"article",
                    code.as_str().as_bytes(),
                ])?;
            }
        }
        None => {
            let mut share =
                group.initial_top_share + group.top_share_drift * age as f64;
            if group.top_share_noise > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                share += group.top_share_noise * z;
            }
            let share = share.clamp(0.0, 1.0);
            for i in 0..n {
                let mut list = String::new();
                if (share >= 1.0 || rng.random_bool(share)) || fillers.is_empty() {
                    list.push_str(top.as_str());
                } else {
                    list.push_str(fillers[rng.random_range(0..fillers.len())].as_str());
                }
                if group.extra_country_rate > 0.0
                    && !fillers.is_empty()
                    && rng.random_bool(group.extra_country_rate)
                {
                    list.push(';');
                    list.push_str(fillers[rng.random_range(0..fillers.len())].as_str());
                }
                articles.write([
                    format!("{journal_id}.{year}.{i}").as_bytes(),
                    journal_id.as_bytes(),
                    format!("{year}").as_bytes(),
                    b"article",
                    list.as_bytes(),
                ])?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn write_year_citations(
    articles: &mut CsvOut,
    citations: &mut CsvOut,
    rng: &mut ChaCha8Rng,
    group: &GroupConfig,
    fillers: &[CountryCode],
    journal_id: &str,
    year: Year,
    entry: Year,
    jitter: f64,
    external_citers: &mut bool,
) -> Result<(), ScenarioError> {
    let age = year - entry;
    // Citable items of the journal in [year-3, year-1].
    let window: Vec<(Year, u32)> = ((year - 3).max(entry)..=(year - 1))
        .map(|py| (py, group.articles_at(py - entry)))
        .filter(|&(_, n)| n > 0)
        .collect();
    let items: u32 = window.iter().map(|&(_, n)| n).sum();
    if items == 0 {
        return Ok(());
    }
    let intensity = group.citation_intensity_at(age) * jitter;
    let count = (intensity * items as f64).round().max(0.0) as u32;
    for i in 0..count {
        let citing_id = format!("{journal_id}.c{year}.{i}");
        let use_top = group.citing_top_share >= 1.0
            || fillers.is_empty()
            || rng.random_bool(group.citing_top_share);
        let code = if use_top {
            group.top_country
        } else {
            fillers[rng.random_range(0..fillers.len())]
        };
        articles.write([
            citing_id.as_bytes(),
            EXTERNAL_JOURNAL_ID.as_bytes(),
            format!("{year}").as_bytes(),
            b"other",
            code.as_str().as_bytes(),
        ])?;
        let (cited_py, _) = window[i as usize % window.len()];
        citations.write([
            citing_id.as_bytes(),
            journal_id.as_bytes(),
            format!("{cited_py}").as_bytes(),
        ])?;
        *external_citers = true;
    }
    Ok(())
}
