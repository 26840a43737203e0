//! Per-country analyses of national journals: classification at a
//! threshold, the domestic/foreign split of a country's publishing, and
//! country-level trend/level reports against database-wide benchmarks.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{CohortSpec, Corpus, CorpusError, CountryCode, Year};
use crate::indicators::{self, Counting};
use crate::trends::{self, Indicator, Verdict};

#[derive(Debug, Error, PartialEq)]
pub enum CountryReportError {
    #[error("INO-P of journal `{journal_id}` is undefined in {year}")]
    UndefinedInoP { journal_id: String, year: Year },
    #[error("country {country} has no affiliated articles in [{from}, {to}]")]
    NoAffiliatedArticles {
        country: CountryCode,
        from: Year,
        to: Year,
    },
    #[error("country list is empty")]
    EmptyCountryList,
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Outcome of the national-journal test for one journal at one year.
#[derive(Debug, Clone, PartialEq)]
pub struct NationalClassification {
    pub journal_id: String,
    pub reference_year: Year,
    /// Set iff the top country's share strictly exceeds the threshold.
    pub national_toward: Option<CountryCode>,
    pub ino_p_at_reference: f64,
}

/// Classifies a journal as national toward its top country when its
/// whole-count INO-P strictly exceeds `threshold` at `reference_year`.
pub fn classify_national(
    corpus: &Corpus,
    journal_id: &str,
    reference_year: Year,
    threshold: f64,
) -> Result<NationalClassification, CountryReportError> {
    let ino = indicators::ino_p(corpus, journal_id, reference_year, Counting::WholeArticle)
        .map_err(|_| CountryReportError::UndefinedInoP {
            journal_id: journal_id.to_string(),
            year: reference_year,
        })?;
    Ok(NationalClassification {
        journal_id: journal_id.to_string(),
        reference_year,
        national_toward: (ino.value > threshold).then_some(ino.top_country),
        ino_p_at_reference: ino.value,
    })
}

/// When journals are classified for the domestic/foreign split: once at a
/// fixed reference year, or freshly in every reported year.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationMode {
    AtYear(Year),
    PerYear,
}

/// Shares of one country's annual output appearing in national journals.
/// `None` when the country published nothing that year.
#[derive(Debug, Clone, PartialEq)]
pub struct DomesticForeignPoint {
    pub year: Year,
    pub n_articles: u32,
    /// Share (percent) in journals national toward the country itself.
    pub domestic_share: Option<f64>,
    /// Share in journals national toward any other country.
    pub foreign_share: Option<f64>,
    /// Share in journals national toward the requested target country.
    pub target_share: Option<f64>,
}

/// For each year, the share of `country`'s affiliated citable articles
/// published in domestic national journals, in foreign national journals,
/// and in national journals of `target` (when given). An article counts
/// for the country when it appears anywhere in its affiliation list.
pub fn domestic_foreign_split(
    corpus: &Corpus,
    country: CountryCode,
    years: RangeInclusive<Year>,
    threshold: f64,
    mode: ClassificationMode,
    target: Option<CountryCode>,
) -> Result<Vec<DomesticForeignPoint>, CountryReportError> {
    let journal_ids: Vec<&str> = corpus.journals_with_articles().collect();
    let classify_all = |year: Year| -> BTreeMap<&str, CountryCode> {
        journal_ids
            .iter()
            .filter_map(|&id| {
                classify_national(corpus, id, year, threshold)
                    .ok()
                    .and_then(|c| c.national_toward)
                    .map(|toward| (id, toward))
            })
            .collect()
    };
    let fixed = match mode {
        ClassificationMode::AtYear(year) => Some(classify_all(year)),
        ClassificationMode::PerYear => None,
    };
    let mut points = Vec::new();
    for year in years.clone() {
        let per_year;
        let national_toward = match &fixed {
            Some(map) => map,
            None => {
                per_year = classify_all(year);
                &per_year
            }
        };
        let mut n_articles = 0u32;
        let mut domestic = 0u32;
        let mut foreign = 0u32;
        let mut in_target = 0u32;
        for &journal_id in &journal_ids {
            let toward = national_toward.get(journal_id);
            for article in corpus.citable_articles(journal_id, year) {
                if !article.countries.contains(&country) {
                    continue;
                }
                n_articles += 1;
                if let Some(&c) = toward {
                    if c == country {
                        domestic += 1;
                    } else {
                        foreign += 1;
                    }
                    if target == Some(c) {
                        in_target += 1;
                    }
                }
            }
        }
        let share = |k: u32| (n_articles > 0).then(|| 100.0 * k as f64 / n_articles as f64);
        points.push(DomesticForeignPoint {
            year,
            n_articles,
            domestic_share: share(domestic),
            foreign_share: share(foreign),
            target_share: target.and(share(in_target)),
        });
    }
    if points.iter().all(|p| p.n_articles == 0) {
        return Err(CountryReportError::NoAffiliatedArticles {
            country,
            from: *years.start(),
            to: *years.end(),
        });
    }
    Ok(points)
}

/// Begin/end medians of one indicator over a journal set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MedianPair {
    pub begin: Option<f64>,
    pub end: Option<f64>,
}

/// One country's row: its national journals in the cohort, their trend
/// shares and begin/end medians, plus the database-wide benchmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryReportRow {
    pub country: CountryCode,
    pub n_national_journals: usize,
    pub pct_sig_decline_ino_p: Option<f64>,
    pub pct_sig_increase_rjif: Option<f64>,
    pub medians: BTreeMap<Indicator, MedianPair>,
    /// Medians over all national journals in the cohort, country-blind.
    pub benchmark_medians: BTreeMap<Indicator, MedianPair>,
}

/// Builds one row per requested country. A journal belongs to a country's
/// set when it is in the cohort, classified national toward *some*
/// country at the cohort end year, and the country published at least one
/// affiliated article in it during [entry year, end year]. Countries
/// without national journals get a row of nulls.
pub fn country_cohort_report(
    corpus: &Corpus,
    countries: &[CountryCode],
    cohort_spec: &CohortSpec,
    threshold: f64,
    alpha: f64,
) -> Result<Vec<CountryReportRow>, CountryReportError> {
    if countries.is_empty() {
        return Err(CountryReportError::EmptyCountryList);
    }
    let end_year = cohort_spec.end_year;
    let cohort = crate::corpus::select_cohort(corpus, cohort_spec)?;

    // National journals in the cohort, with their publishing countries
    // over the cohort period.
    let national: Vec<(&String, BTreeSet<CountryCode>)> = cohort
        .iter()
        .filter(|id| {
            classify_national(corpus, id, end_year, threshold)
                .map(|c| c.national_toward.is_some())
                .unwrap_or(false)
        })
        .map(|id| {
            let entry = corpus.entry_year(id).expect("cohort journals publish");
            let mut publishing = BTreeSet::new();
            for year in entry..=end_year {
                for article in corpus.citable_articles(id, year) {
                    publishing.extend(article.countries.iter().copied());
                }
            }
            (id, publishing)
        })
        .collect();

    let benchmark_set: BTreeSet<String> = national.iter().map(|(id, _)| (*id).clone()).collect();
    let benchmark_medians = median_pairs(corpus, &benchmark_set, end_year);

    let mut ordered: Vec<CountryCode> = countries.to_vec();
    ordered.sort_unstable();
    ordered.dedup();

    let rows: Vec<CountryReportRow> = ordered
        .par_iter()
        .map(|&country| {
            let set: BTreeSet<String> = national
                .iter()
                .filter(|(_, publishing)| publishing.contains(&country))
                .map(|(id, _)| (*id).clone())
                .collect();
            let mut row = CountryReportRow {
                country,
                n_national_journals: set.len(),
                pct_sig_decline_ino_p: None,
                pct_sig_increase_rjif: None,
                medians: median_pairs(corpus, &set, end_year),
                benchmark_medians: benchmark_medians.clone(),
            };
            let mut ino_p_verdicts = (0usize, 0usize); // (with verdict, declines)
            let mut rjif_verdicts = (0usize, 0usize); // (with verdict, increases)
            for journal_id in &set {
                if let Some(t) =
                    trends::journal_trend(corpus, journal_id, Indicator::InoP, alpha, end_year)
                {
                    ino_p_verdicts.0 += 1;
                    if t.verdict == Verdict::SigDecline {
                        ino_p_verdicts.1 += 1;
                    }
                }
                if let Some(t) =
                    trends::journal_trend(corpus, journal_id, Indicator::Rjif, alpha, end_year)
                {
                    rjif_verdicts.0 += 1;
                    if t.verdict == Verdict::SigIncrease {
                        rjif_verdicts.1 += 1;
                    }
                }
            }
            let pct = |(n, k): (usize, usize)| (n > 0).then(|| 100.0 * k as f64 / n as f64);
            row.pct_sig_decline_ino_p = pct(ino_p_verdicts);
            row.pct_sig_increase_rjif = pct(rjif_verdicts);
            row
        })
        .collect();
    Ok(rows)
}

fn median_pairs(
    corpus: &Corpus,
    journals: &BTreeSet<String>,
    end_year: Year,
) -> BTreeMap<Indicator, MedianPair> {
    if journals.is_empty() {
        return Indicator::ALL
            .iter()
            .map(|&i| (i, MedianPair::default()))
            .collect();
    }
    trends::begin_end_medians(corpus, journals, &Indicator::ALL, end_year)
        .map(|rows| {
            rows.into_iter()
                .map(|r| {
                    (
                        r.indicator,
                        MedianPair {
                            begin: r.median_begin,
                            end: r.median_end,
                        },
                    )
                })
                .collect()
        })
        .unwrap_or_default()
}
