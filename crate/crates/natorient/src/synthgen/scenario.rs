//! Scenario configuration for the synthetic-corpus generator.
//!
//! Scenarios are TOML files: top-level keys set the seed and year range,
//! and each `[[group]]` describes a batch of journals sharing dynamics,
//! citation behaviour and metadata.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::corpus::{CountryCode, Discipline, Language, Year};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("infeasible scenario: {0}")]
    Infeasible(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// How a group's top-country share evolves over a journal's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    /// Linear drift with optional Gaussian noise on the share.
    #[default]
    Drift,
    /// The INO-P class follows the bordered random walk; article
    /// composition is derived deterministically from the class.
    Walk,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub first_year: Year,
    pub last_year: Year,
    #[serde(rename = "group")]
    pub groups: Vec<GroupConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// Journal id prefix; ids are `<name>-NNNNN`.
    pub name: String,
    pub journals: u32,
    pub top_country: CountryCode,
    /// Pool for non-top affiliations; defaults depend on the dynamics.
    #[serde(default)]
    pub filler_countries: Vec<CountryCode>,
    #[serde(default = "default_top_share")]
    pub initial_top_share: f64,
    #[serde(default)]
    pub top_share_drift: f64,
    #[serde(default)]
    pub top_share_noise: f64,
    pub articles_per_year: u32,
    /// Additive change of the annual article count per year of age.
    #[serde(default)]
    pub articles_growth: f64,
    /// Probability of appending one extra filler affiliation.
    #[serde(default)]
    pub extra_country_rate: f64,
    /// Citations received per citable item in the 3-year window.
    #[serde(default)]
    pub citations_per_item: f64,
    /// Additive change of the citation intensity per year of age.
    #[serde(default)]
    pub citations_growth: f64,
    /// Per-journal multiplicative jitter on the citation intensity,
    /// uniform in [1 - j, 1 + j].
    #[serde(default)]
    pub citation_jitter: f64,
    /// Share of citing articles affiliated with the top country.
    #[serde(default = "default_citing_top_share")]
    pub citing_top_share: f64,
    pub fields: Vec<String>,
    /// Assign exactly one of `fields` per journal, round robin, instead
    /// of all of them.
    #[serde(default)]
    pub rotate_fields: bool,
    pub discipline: Discipline,
    pub language: Language,
    #[serde(default)]
    pub open_access: bool,
    /// Entry years cycle over [entry_from, entry_to]; both default to the
    /// scenario's first year.
    #[serde(default)]
    pub entry_from: Option<Year>,
    #[serde(default)]
    pub entry_to: Option<Year>,
    #[serde(default)]
    pub dynamics: Dynamics,
    #[serde(default = "default_walk_classes")]
    pub walk_classes: u32,
    /// Walk start class; defaults to the top class.
    #[serde(default)]
    pub walk_start_class: Option<u32>,
}

fn default_top_share() -> f64 {
    0.9
}

fn default_citing_top_share() -> f64 {
    0.5
}

fn default_walk_classes() -> u32 {
    10
}

impl GroupConfig {
    pub fn entry_years(&self, first_year: Year) -> (Year, Year) {
        let from = self.entry_from.unwrap_or(first_year);
        let to = self.entry_to.unwrap_or(from);
        (from, to)
    }

    /// Article count for a journal aged `age` years.
    pub fn articles_at(&self, age: i32) -> u32 {
        let n = self.articles_per_year as f64 + self.articles_growth * age as f64;
        n.round().max(0.0) as u32
    }

    pub fn citation_intensity_at(&self, age: i32) -> f64 {
        (self.citations_per_item + self.citations_growth * age as f64).max(0.0)
    }

    /// Filler pool, falling back to a generated list that avoids the top
    /// country. Walk dynamics needs enough fillers to keep every filler
    /// below the top count even in the lowest class.
    pub fn effective_fillers(&self) -> Vec<CountryCode> {
        if !self.filler_countries.is_empty() {
            return self.filler_countries.clone();
        }
        let want = match self.dynamics {
            Dynamics::Drift => 5,
            Dynamics::Walk => 12,
        };
        default_filler_pool(self.top_country, want)
    }
}

pub fn default_filler_pool(exclude: CountryCode, count: usize) -> Vec<CountryCode> {
    let mut pool = Vec::with_capacity(count);
    'outer: for a in b'A'..=b'Z' {
        for b in b'A'..=b'Z' {
            let code = CountryCode::new(std::str::from_utf8(&[a, b]).unwrap()).unwrap();
            if code != exclude {
                pool.push(code);
                if pool.len() == count {
                    break 'outer;
                }
            }
        }
    }
    pool
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Infeasible(msg));
        if self.first_year > self.last_year {
            return fail(format!(
                "first_year {} > last_year {}",
                self.first_year, self.last_year
            ));
        }
        if self.groups.is_empty() {
            return fail("scenario has no groups".into());
        }
        let mut names = BTreeSet::new();
        for g in &self.groups {
            if g.name.is_empty()
                || !g
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return fail(format!("group name `{}` must be [A-Za-z0-9_]+", g.name));
            }
            if g.name == super::EXTERNAL_JOURNAL_ID {
                return fail(format!("group name `{}` is reserved", g.name));
            }
            if !names.insert(&g.name) {
                return fail(format!("duplicate group name `{}`", g.name));
            }
            for (label, v) in [
                ("initial_top_share", g.initial_top_share),
                ("extra_country_rate", g.extra_country_rate),
                ("citing_top_share", g.citing_top_share),
                ("citation_jitter", g.citation_jitter),
            ] {
                if !(0.0..=1.0).contains(&v) {
                    return fail(format!("{}: {label} = {v} outside [0, 1]", g.name));
                }
            }
            if g.top_share_noise < 0.0 {
                return fail(format!("{}: top_share_noise must be >= 0", g.name));
            }
            if g.citations_per_item < 0.0 {
                return fail(format!("{}: citations_per_item must be >= 0", g.name));
            }
            if g.fields.is_empty() {
                return fail(format!("{}: fields must be non-empty", g.name));
            }
            let (entry_from, entry_to) = g.entry_years(self.first_year);
            if entry_from > entry_to
                || entry_from < self.first_year
                || entry_to > self.last_year
            {
                return fail(format!(
                    "{}: entry window [{entry_from}, {entry_to}] outside scenario years",
                    g.name
                ));
            }
            let fillers = g.effective_fillers();
            if fillers.contains(&g.top_country) {
                return fail(format!("{}: filler pool contains the top country", g.name));
            }
            if fillers.is_empty() && g.initial_top_share < 1.0 {
                return fail(format!("{}: needs filler countries", g.name));
            }
            if g.dynamics == Dynamics::Walk {
                self.validate_walk_group(g, entry_from, &fillers)?;
            }
        }
        Ok(())
    }

    fn validate_walk_group(
        &self,
        g: &GroupConfig,
        entry_from: Year,
        fillers: &[CountryCode],
    ) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Infeasible(msg));
        if g.walk_classes == 0 {
            return fail(format!("{}: walk_classes must be >= 1", g.name));
        }
        let start = g.walk_start_class.unwrap_or(g.walk_classes);
        if start == 0 || start > g.walk_classes {
            return fail(format!(
                "{}: walk_start_class {start} outside [1, {}]",
                g.name, g.walk_classes
            ));
        }
        if g.top_share_drift != 0.0 || g.top_share_noise != 0.0 || g.extra_country_rate != 0.0 {
            return fail(format!(
                "{}: walk dynamics drives the country mix itself; drift, noise \
                 and extra_country_rate must be 0",
                g.name
            ));
        }
        if (self.last_year - entry_from) < 1 {
            return fail(format!("{}: walk needs at least one step", g.name));
        }
        // Class-exact composition needs class granularity in every year's
        // article count, and enough fillers for the bottom class.
        let max_age = self.last_year - entry_from;
        for age in 0..=max_age {
            let n = g.articles_at(age);
            if n < g.walk_classes {
                return fail(format!(
                    "{}: {n} articles at age {age} cannot resolve {} classes",
                    g.name, g.walk_classes
                ));
            }
            let k_min = n / g.walk_classes; // top count in the lowest class
            let needed = (n - k_min).div_ceil(k_min) as usize;
            if fillers.len() < needed {
                return fail(format!(
                    "{}: needs {needed} filler countries for {n} articles, has {}",
                    g.name,
                    fillers.len()
                ));
            }
        }
        Ok(())
    }
}

/// Reads and validates a TOML scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config: ScenarioConfig = toml::from_str(&text)?;
    config.validate()?;
    Ok(config)
}
