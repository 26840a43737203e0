//! Citation-impact measures: the 3-year journal impact factor, its
//! field-normalized variant, and the national/non-national ratio series.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::corpus::{Corpus, Year};
use crate::indicators::{self, Counting};
use crate::trends::median;

#[derive(Debug, Error, PartialEq)]
pub enum ImpactError {
    #[error("journal `{journal_id}` has no citable items in [{}, {}]", year - 3, year - 1)]
    ZeroCitableItems { journal_id: String, year: Year },
    #[error("no journal with a defined impact factor in the given fields in {year}")]
    NoEligibleJournals { year: Year },
    #[error("field mean impact factor is zero in {year}")]
    ZeroFieldMean { year: Year },
}

/// Impact of one journal-year: citations in `year` to the citable items
/// of the three preceding years, per item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactValue {
    /// Citations per citable item.
    pub jif3: f64,
    /// Field-relative impact; 1.0 is the subject-field average. Unset
    /// until normalized.
    pub rjif: Option<f64>,
    pub citable_items: u32,
    pub citations: u32,
}

/// 3-year impact factor: citations received in `year` to the journal's
/// citable items published in [year-3, year-1], divided by the number of
/// those items. Unaffiliated articles count in the denominator; citing
/// documents of any type count in the numerator.
pub fn jif3(corpus: &Corpus, journal_id: &str, year: Year) -> Result<ImpactValue, ImpactError> {
    let window = (year - 3)..=(year - 1);
    let citable_items: u32 = window
        .clone()
        .map(|y| corpus.citable_count(journal_id, y))
        .sum();
    if citable_items == 0 {
        return Err(ImpactError::ZeroCitableItems {
            journal_id: journal_id.to_string(),
            year,
        });
    }
    let citations = corpus
        .citations_to(journal_id, year)
        .filter(|c| window.contains(&c.cited_pub_year))
        .count() as u32;
    Ok(ImpactValue {
        jif3: citations as f64 / citable_items as f64,
        rjif: None,
        citable_items,
        citations,
    })
}

/// Arithmetic mean of jif3 over the deduplicated union of journals
/// assigned to any of the given fields; journals with an undefined
/// impact factor are left out.
pub fn field_mean_jif(
    corpus: &Corpus,
    field_ids: &BTreeSet<String>,
    year: Year,
) -> Result<f64, ImpactError> {
    let mut sum = 0.0;
    let mut n = 0u32;
    for journal in corpus.journals() {
        if journal.field_ids.is_disjoint(field_ids) {
            continue;
        }
        if let Ok(value) = jif3(corpus, &journal.journal_id, year) {
            sum += value.jif3;
            n += 1;
        }
    }
    if n == 0 {
        return Err(ImpactError::NoEligibleJournals { year });
    }
    Ok(sum / n as f64)
}

/// Field-normalized impact: jif3 divided by the mean jif3 of all journals
/// in the journal's subject fields (the journal itself included).
pub fn rjif(corpus: &Corpus, journal_id: &str, year: Year) -> Result<ImpactValue, ImpactError> {
    let mut value = jif3(corpus, journal_id, year)?;
    let fields = corpus
        .journal(journal_id)
        .map(|j| j.field_ids.clone())
        .unwrap_or_default();
    let mean = field_mean_jif(corpus, &fields, year)?;
    if mean == 0.0 {
        return Err(ImpactError::ZeroFieldMean { year });
    }
    value.rjif = Some(value.jif3 / mean);
    Ok(value)
}

/// Per-(journal, year) impact over a year range: one row for every
/// journal-year with a defined jif3, rjif filled in where the field mean
/// exists and is positive. Field means are computed once per (field set,
/// year). Rows are ordered by journal id, then year.
pub fn impact_table(
    corpus: &Corpus,
    years: RangeInclusive<Year>,
) -> Vec<(String, Year, ImpactValue)> {
    use rayon::prelude::*;
    use std::collections::HashMap;

    let journals: Vec<&str> = corpus.journals_with_articles().collect();
    let mut rows = Vec::new();
    for year in years {
        let jif_by_journal: HashMap<&str, ImpactValue> = journals
            .par_iter()
            .filter_map(|&id| jif3(corpus, id, year).ok().map(|v| (id, v)))
            .collect();
        let mut mean_cache: HashMap<&BTreeSet<String>, Option<f64>> = HashMap::new();
        for &journal_id in &journals {
            let Some(&value) = jif_by_journal.get(journal_id) else {
                continue;
            };
            let mut value = value;
            let fields = corpus
                .journal(journal_id)
                .map(|j| &j.field_ids)
                .expect("journals with articles are registered");
            let mean = *mean_cache.entry(fields).or_insert_with(|| {
                let mut sum = 0.0;
                let mut n = 0u32;
                for journal in corpus.journals() {
                    if journal.field_ids.is_disjoint(fields) {
                        continue;
                    }
                    if let Some(v) = jif_by_journal.get(journal.journal_id.as_str()) {
                        sum += v.jif3;
                        n += 1;
                    }
                }
                (n > 0 && sum > 0.0).then(|| sum / n as f64)
            });
            value.rjif = mean.map(|m| value.jif3 / m);
            rows.push((journal_id.to_string(), year, value));
        }
    }
    rows.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    rows
}

/// One year of the national vs non-national ratio series. A ratio is
/// `None` when its denominator partition is empty or carries no defined
/// impact factors.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeriesPoint {
    pub year: Year,
    pub n_national: u32,
    pub n_non_national: u32,
    pub ratio_journals: Option<f64>,
    pub ratio_articles: Option<f64>,
    pub ratio_median_jif: Option<f64>,
}

/// For each year, partitions the journals active that year (>= 1 citable
/// article) by whole-count INO-P above/at-or-below the threshold and
/// reports national/non-national ratios of journal counts, article counts
/// and median jif3. Journals with undefined INO-P that year are skipped.
pub fn national_ratio_series(
    corpus: &Corpus,
    years: RangeInclusive<Year>,
    ino_threshold: f64,
) -> Vec<RatioSeriesPoint> {
    years
        .map(|year| {
            let mut n = [0u32; 2];
            let mut articles = [0u64; 2];
            let mut jifs: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
            for journal_id in corpus.journals_active_in(year) {
                let Ok(ino) = indicators::ino_p(corpus, journal_id, year, Counting::WholeArticle)
                else {
                    continue;
                };
                let side = usize::from(ino.value > ino_threshold);
                n[side] += 1;
                articles[side] += corpus.citable_count(journal_id, year) as u64;
                if let Ok(value) = jif3(corpus, journal_id, year) {
                    jifs[side].push(value.jif3);
                }
            }
            let ratio = |num: f64, den: f64| if den > 0.0 { Some(num / den) } else { None };
            RatioSeriesPoint {
                year,
                n_national: n[1],
                n_non_national: n[0],
                ratio_journals: ratio(n[1] as f64, n[0] as f64),
                ratio_articles: ratio(articles[1] as f64, articles[0] as f64),
                ratio_median_jif: match (median(&jifs[1]), median(&jifs[0])) {
                    (Some(nat), Some(non)) => ratio(nat, non),
                    _ => None,
                },
            }
        })
        .collect()
}
