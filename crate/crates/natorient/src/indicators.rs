//! National-orientation indicators.
//!
//! A journal-year's affiliation countries are counted under two schemes:
//! *whole-article* counting (a country is counted once per article it
//! appears in) and *countryship* counting (every occurrence in an
//! affiliation list counts, repetitions included). On top of these sit
//! INO-P and INO-C (top-country share of publishing resp. citing
//! articles), the Activity Index, and the normalized NINO family with
//! weights `w = p^k * AI^m`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::corpus::{Corpus, CountryCode, Year};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counting {
    WholeArticle,
    Countryship,
}

/// Reference set for the Activity Index denominator: the entire database
/// or the union of the journal's subject fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AiScope {
    WholeDatabase,
    SubjectField,
}

/// Whether an INO value derives from publishing or citing authors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Publishing,
    Citing,
}

#[derive(Debug, Error, PartialEq)]
pub enum IndicatorError {
    #[error("journal `{journal_id}` has no affiliated articles in {year}")]
    NoAffiliatedArticles { journal_id: String, year: Year },
    #[error("no affiliated citing articles reference journal `{journal_id}` in {year}")]
    NoCitingArticles { journal_id: String, year: Year },
    #[error("country {country} has no articles in scope in {year}")]
    CountryAbsentFromScope { country: CountryCode, year: Year },
    #[error("NINO exponents must be non-negative (k={k}, m={m})")]
    InvalidNinoParams { k: f64, m: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CountryCount {
    /// Articles in which the country appears at least once.
    pub articles: u32,
    /// Total occurrences across affiliation lists, with multiplicity.
    pub countryships: u32,
}

/// Per-country counts over the affiliated articles of one journal-year
/// (or one set of citing articles), under both counting schemes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountryDistribution {
    counts: BTreeMap<CountryCode, CountryCount>,
    total_affiliated_articles: u32,
    total_countryships: u32,
}

impl CountryDistribution {
    /// Accumulates one affiliation list per article. Returns `None` when
    /// every list is empty (no affiliated articles).
    pub fn from_affiliation_lists<'a, I>(lists: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [CountryCode]>,
    {
        let mut dist = CountryDistribution::default();
        for list in lists {
            if list.is_empty() {
                continue;
            }
            dist.total_affiliated_articles += 1;
            dist.total_countryships += list.len() as u32;
            for &code in list {
                dist.counts.entry(code).or_default().countryships += 1;
            }
            let distinct: BTreeSet<CountryCode> = list.iter().copied().collect();
            for code in distinct {
                dist.counts.entry(code).or_default().articles += 1;
            }
        }
        if dist.total_affiliated_articles == 0 {
            None
        } else {
            Some(dist)
        }
    }

    pub fn total_affiliated_articles(&self) -> u32 {
        self.total_affiliated_articles
    }

    pub fn total_countryships(&self) -> u32 {
        self.total_countryships
    }

    pub fn count(&self, counting: Counting, country: CountryCode) -> u32 {
        self.counts
            .get(&country)
            .map(|c| match counting {
                Counting::WholeArticle => c.articles,
                Counting::Countryship => c.countryships,
            })
            .unwrap_or(0)
    }

    fn denominator(&self, counting: Counting) -> u32 {
        match counting {
            Counting::WholeArticle => self.total_affiliated_articles,
            Counting::Countryship => self.total_countryships,
        }
    }

    /// Percentage share of `country` under the given counting.
    pub fn share_pct(&self, counting: Counting, country: CountryCode) -> f64 {
        100.0 * self.count(counting, country) as f64 / self.denominator(counting) as f64
    }

    pub fn countries(&self) -> impl Iterator<Item = CountryCode> + '_ {
        self.counts.keys().copied()
    }

    pub fn shares(&self, counting: Counting) -> impl Iterator<Item = (CountryCode, f64)> + '_ {
        self.counts
            .keys()
            .map(move |&c| (c, self.share_pct(counting, c)))
    }

    /// Country with the largest count under `counting`; ties broken by
    /// lexicographically smallest code (the share is tie-independent).
    pub fn top(&self, counting: Counting) -> (CountryCode, u32) {
        let mut best: Option<(CountryCode, u32)> = None;
        for &code in self.counts.keys() {
            let n = self.count(counting, code);
            if best.map(|(_, b)| n > b).unwrap_or(true) {
                best = Some((code, n));
            }
        }
        best.expect("distribution is non-empty by construction")
    }
}

/// A top-country share, together with what was counted and how.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InoValue {
    /// Percentage in [0, 100].
    pub value: f64,
    pub top_country: CountryCode,
    pub basis: Basis,
    pub counting: Counting,
}

/// Parameters of the normalized INO: `w_i = p_i^k * AI_i^m` with `p_i`
/// taken under `counting` and `AI_i` against `ai_scope`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NinoParams {
    pub k: f64,
    pub m: f64,
    pub counting: Counting,
    pub ai_scope: AiScope,
}

impl NinoParams {
    fn validate(&self) -> Result<(), IndicatorError> {
        if self.k >= 0.0 && self.m >= 0.0 {
            Ok(())
        } else {
            Err(IndicatorError::InvalidNinoParams { k: self.k, m: self.m })
        }
    }
}

/// Distribution of affiliation countries over a journal-year's affiliated
/// citable articles.
pub fn country_distribution(
    corpus: &Corpus,
    journal_id: &str,
    year: Year,
) -> Result<CountryDistribution, IndicatorError> {
    CountryDistribution::from_affiliation_lists(
        corpus
            .citable_articles(journal_id, year)
            .map(|a| a.countries.as_slice()),
    )
    .ok_or_else(|| IndicatorError::NoAffiliatedArticles {
        journal_id: journal_id.to_string(),
        year,
    })
}

/// INO-P: percentage share of the country contributing most to the
/// journal's articles in `year`.
pub fn ino_p(
    corpus: &Corpus,
    journal_id: &str,
    year: Year,
    counting: Counting,
) -> Result<InoValue, IndicatorError> {
    let dist = country_distribution(corpus, journal_id, year)?;
    Ok(ino_from_distribution(&dist, Basis::Publishing, counting))
}

fn ino_from_distribution(dist: &CountryDistribution, basis: Basis, counting: Counting) -> InoValue {
    let (top_country, count) = dist.top(counting);
    InoValue {
        value: 100.0 * count as f64 / dist.denominator(counting) as f64,
        top_country,
        basis,
        counting,
    }
}

/// Distribution over the distinct affiliated articles citing the journal
/// in `citing_year` (each citing article counts once however many of the
/// journal's papers it references).
pub fn citing_country_distribution(
    corpus: &Corpus,
    journal_id: &str,
    citing_year: Year,
) -> Result<CountryDistribution, IndicatorError> {
    let citing_ids: BTreeSet<&str> = corpus
        .citations_to(journal_id, citing_year)
        .map(|c| c.citing_article_id.as_str())
        .collect();
    CountryDistribution::from_affiliation_lists(citing_ids.iter().map(|id| {
        corpus
            .article_by_id(id)
            .expect("citations resolve by corpus invariant")
            .countries
            .as_slice()
    }))
    .ok_or_else(|| IndicatorError::NoCitingArticles {
        journal_id: journal_id.to_string(),
        year: citing_year,
    })
}

/// INO-C: percentage share of the country most frequently citing the
/// journal in `citing_year`, over all of the journal's prior volumes.
pub fn ino_c(
    corpus: &Corpus,
    journal_id: &str,
    citing_year: Year,
    counting: Counting,
) -> Result<InoValue, IndicatorError> {
    let dist = citing_country_distribution(corpus, journal_id, citing_year)?;
    Ok(ino_from_distribution(&dist, Basis::Citing, counting))
}

/// Whole-count country totals for the AI denominator: either the whole
/// database in `year` or the union of the journal's subject fields.
fn scope_totals(
    corpus: &Corpus,
    journal_id: &str,
    year: Year,
    scope: AiScope,
) -> (BTreeMap<CountryCode, u32>, u32) {
    match scope {
        AiScope::WholeDatabase => corpus
            .country_year_totals(year)
            .map(|t| (t.articles_by_country.clone(), t.total_affiliated_articles))
            .unwrap_or_default(),
        AiScope::SubjectField => {
            let fields = corpus
                .journal(journal_id)
                .map(|j| j.field_ids.clone())
                .unwrap_or_default();
            let mut by_country = BTreeMap::new();
            let mut total = 0u32;
            for journal in corpus.journals() {
                if journal.field_ids.is_disjoint(&fields) {
                    continue;
                }
                for article in corpus.citable_articles(&journal.journal_id, year) {
                    if article.countries.is_empty() {
                        continue;
                    }
                    total += 1;
                    let distinct: BTreeSet<CountryCode> =
                        article.countries.iter().copied().collect();
                    for code in distinct {
                        *by_country.entry(code).or_insert(0) += 1;
                    }
                }
            }
            (by_country, total)
        }
    }
}

fn ai_from_parts(
    journal_dist: &CountryDistribution,
    scope_by_country: &BTreeMap<CountryCode, u32>,
    scope_total: u32,
    country: CountryCode,
    year: Year,
) -> Result<f64, IndicatorError> {
    let scope_count = scope_by_country.get(&country).copied().unwrap_or(0);
    if scope_count == 0 {
        return Err(IndicatorError::CountryAbsentFromScope { country, year });
    }
    let journal_share = journal_dist.count(Counting::WholeArticle, country) as f64
        / journal_dist.total_affiliated_articles() as f64;
    let scope_share = scope_count as f64 / scope_total as f64;
    Ok(journal_share / scope_share)
}

/// Activity Index: the country's share of the journal's articles divided
/// by its share of the scope's articles, both whole-counted in `year`.
/// 1.0 means "as expected from overall output"; 0 when the country does
/// not publish in the journal.
pub fn activity_index(
    corpus: &Corpus,
    country: CountryCode,
    journal_id: &str,
    year: Year,
    scope: AiScope,
) -> Result<f64, IndicatorError> {
    let dist = country_distribution(corpus, journal_id, year)?;
    let (by_country, total) = scope_totals(corpus, journal_id, year, scope);
    ai_from_parts(&dist, &by_country, total, country, year)
}

fn nino_from_parts(
    dist: &CountryDistribution,
    ai: &BTreeMap<CountryCode, f64>,
    k: f64,
    m: f64,
    counting: Counting,
) -> f64 {
    let mut weighted = 0.0;
    let mut weights = 0.0;
    for country in dist.countries() {
        let p = dist.share_pct(counting, country);
        let w = p.powf(k) * ai[&country].powf(m);
        weighted += w * p;
        weights += w;
    }
    weighted / weights
}

/// NINO: weighted mean of all contributing countries' percentage shares,
/// with weights `p^k * AI^m`. A convex combination of the shares, so the
/// value stays within [min share, max share] and in [0, 100].
pub fn nino(
    corpus: &Corpus,
    journal_id: &str,
    year: Year,
    params: &NinoParams,
) -> Result<f64, IndicatorError> {
    params.validate()?;
    let dist = country_distribution(corpus, journal_id, year)?;
    let (by_country, total) = scope_totals(corpus, journal_id, year, params.ai_scope);
    let mut ai = BTreeMap::new();
    for country in dist.countries() {
        ai.insert(
            country,
            ai_from_parts(&dist, &by_country, total, country, year)?,
        );
    }
    Ok(nino_from_parts(&dist, &ai, params.k, params.m, params.counting))
}

/// The (k, m) exponent pairs of the four tabulated NINO variants:
/// weights AI, sqrt(AI), p*AI and p*sqrt(AI).
pub const NINO_VARIANTS: [(f64, f64); 4] = [(0.0, 1.0), (0.0, 0.5), (1.0, 1.0), (1.0, 0.5)];

/// One journal's row of INO variants for a given year. Cells are `None`
/// where the underlying value is undefined for that journal-year.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorRow {
    pub journal_id: String,
    pub year: Year,
    pub ino_p: Option<f64>,
    pub ino_p_countryship: Option<f64>,
    pub nino_ai: Option<f64>,
    pub nino_sqrt_ai: Option<f64>,
    pub nino_p_ai: Option<f64>,
    pub nino_p_sqrt_ai: Option<f64>,
    pub ino_c: Option<f64>,
    pub top_country_p: Option<CountryCode>,
    pub top_country_c: Option<CountryCode>,
}

impl IndicatorRow {
    /// The six INO variant cells in table column order.
    pub fn variants(&self) -> [Option<f64>; 6] {
        [
            self.ino_p,
            self.ino_p_countryship,
            self.nino_ai,
            self.nino_sqrt_ai,
            self.nino_p_ai,
            self.nino_p_sqrt_ai,
        ]
    }
}

/// Computes the six INO variants (plus INO-C and top countries) for each
/// journal. NINO cells use countryship shares against the whole database;
/// `ino_c_counting` selects the counting for the INO-C column. Rows are
/// ordered by journal id; undefined cells are `None`.
pub fn indicator_table<'a, I>(
    corpus: &Corpus,
    journals: I,
    year: Year,
    ino_c_counting: Counting,
) -> Vec<IndicatorRow>
where
    I: IntoIterator<Item = &'a str>,
{
    use rayon::prelude::*;
    let mut ids: Vec<&str> = journals.into_iter().collect();
    ids.sort_unstable();
    ids.dedup();
    ids.par_iter()
        .map(|id| indicator_row(corpus, id, year, ino_c_counting))
        .collect()
}

fn indicator_row(
    corpus: &Corpus,
    journal_id: &str,
    year: Year,
    ino_c_counting: Counting,
) -> IndicatorRow {
    let mut row = IndicatorRow {
        journal_id: journal_id.to_string(),
        year,
        ino_p: None,
        ino_p_countryship: None,
        nino_ai: None,
        nino_sqrt_ai: None,
        nino_p_ai: None,
        nino_p_sqrt_ai: None,
        ino_c: None,
        top_country_p: None,
        top_country_c: None,
    };
    if let Ok(dist) = country_distribution(corpus, journal_id, year) {
        let whole = ino_from_distribution(&dist, Basis::Publishing, Counting::WholeArticle);
        row.ino_p = Some(whole.value);
        row.top_country_p = Some(whole.top_country);
        row.ino_p_countryship =
            Some(ino_from_distribution(&dist, Basis::Publishing, Counting::Countryship).value);
        let (by_country, total) = scope_totals(corpus, journal_id, year, AiScope::WholeDatabase);
        let ai: Result<BTreeMap<CountryCode, f64>, IndicatorError> = dist
            .countries()
            .map(|c| ai_from_parts(&dist, &by_country, total, c, year).map(|v| (c, v)))
            .collect();
        if let Ok(ai) = ai {
            let ninos: Vec<f64> = NINO_VARIANTS
                .iter()
                .map(|&(k, m)| nino_from_parts(&dist, &ai, k, m, Counting::Countryship))
                .collect();
            row.nino_ai = Some(ninos[0]);
            row.nino_sqrt_ai = Some(ninos[1]);
            row.nino_p_ai = Some(ninos[2]);
            row.nino_p_sqrt_ai = Some(ninos[3]);
        }
    }
    if let Ok(citing) = ino_c(corpus, journal_id, year, ino_c_counting) {
        row.ino_c = Some(citing.value);
        row.top_country_c = Some(citing.top_country);
    }
    row
}
