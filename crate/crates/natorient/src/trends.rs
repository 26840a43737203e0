//! Per-journal trend regressions with significance testing, cohort
//! summary statistics, and Pearson correlations between indicator
//! variants.

use std::collections::BTreeSet;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::corpus::{Corpus, Year};
use crate::impact;
use crate::indicators::{self, Counting};

#[derive(Debug, Error, PartialEq)]
pub enum TrendError {
    #[error("trend fit needs at least 3 points, got {got}")]
    InsufficientPoints { got: usize },
    #[error("trend fit needs at least 2 distinct years")]
    AllYearsIdentical,
    #[error("cohort is empty")]
    EmptyCohort,
    #[error("correlation needs at least 3 complete rows, got {got}")]
    InsufficientCompleteRows { got: usize },
    #[error("column {column} has zero variance")]
    ZeroVarianceColumn { column: usize },
    #[error("row {row} has {got} columns, expected {expected}")]
    RaggedTable {
        row: usize,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SigIncrease,
    SigDecline,
    NotSignificant,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SigIncrease => "sig_increase",
            Verdict::SigDecline => "sig_decline",
            Verdict::NotSignificant => "not_significant",
        }
    }
}

/// OLS fit of one indicator series against the year.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendResult {
    /// Regression coefficient, in indicator units per year.
    pub slope: f64,
    pub intercept: f64,
    /// Slope divided by the mean annual score; `None` when the mean is 0.
    pub growth_rate: Option<f64>,
    /// Two-sided p-value of the slope (t-test, n-2 degrees of freedom).
    pub p_value: f64,
    pub verdict: Verdict,
    pub n_points: usize,
}

/// Ordinary least squares of value on year with a two-sided t-test on the
/// slope. A constant series has slope 0 and p = 1; an exact non-constant
/// line has p = 0.
pub fn fit_trend(series: &[(Year, f64)], alpha: f64) -> Result<TrendResult, TrendError> {
    let n = series.len();
    if n < 3 {
        return Err(TrendError::InsufficientPoints { got: n });
    }
    let distinct_years: BTreeSet<Year> = series.iter().map(|&(y, _)| y).collect();
    if distinct_years.len() < 2 {
        return Err(TrendError::AllYearsIdentical);
    }
    let nf = n as f64;
    let x_mean = series.iter().map(|&(y, _)| y as f64).sum::<f64>() / nf;
    let y_mean = series.iter().map(|&(_, v)| v).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in series {
        let dx = x as f64 - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse = (syy - slope * sxy).max(0.0);
    let df = (n - 2) as f64;
    let p_value = if syy == 0.0 {
        1.0
    } else if sse == 0.0 {
        0.0
    } else {
        let se = (sse / df / sxx).sqrt();
        let t = slope / se;
        let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    let verdict = if p_value < alpha && slope > 0.0 {
        Verdict::SigIncrease
    } else if p_value < alpha && slope < 0.0 {
        Verdict::SigDecline
    } else {
        Verdict::NotSignificant
    };
    Ok(TrendResult {
        slope,
        intercept,
        growth_rate: (y_mean != 0.0).then(|| slope / y_mean),
        p_value,
        verdict,
        n_points: n,
    })
}

/// Median with the even-count rule: mean of the two central values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in medians"));
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// The five indicators followed over a journal's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Indicator {
    Publications,
    InoP,
    InoC,
    Jif,
    Rjif,
}

impl Indicator {
    pub const ALL: [Indicator; 5] = [
        Indicator::Publications,
        Indicator::InoP,
        Indicator::InoC,
        Indicator::Jif,
        Indicator::Rjif,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Indicator::Publications => "publications",
            Indicator::InoP => "ino_p",
            Indicator::InoC => "ino_c",
            Indicator::Jif => "jif",
            Indicator::Rjif => "rjif",
        }
    }
}

/// Value of one indicator for one journal-year; `None` where undefined.
/// Publication counts are always defined (possibly 0); INO values need
/// affiliated (citing) articles, impact values a non-empty citation
/// window.
pub fn indicator_value(
    corpus: &Corpus,
    journal_id: &str,
    indicator: Indicator,
    year: Year,
) -> Option<f64> {
    match indicator {
        Indicator::Publications => Some(corpus.citable_count(journal_id, year) as f64),
        Indicator::InoP => indicators::ino_p(corpus, journal_id, year, Counting::WholeArticle)
            .ok()
            .map(|v| v.value),
        Indicator::InoC => indicators::ino_c(corpus, journal_id, year, Counting::WholeArticle)
            .ok()
            .map(|v| v.value),
        Indicator::Jif => impact::jif3(corpus, journal_id, year).ok().map(|v| v.jif3),
        Indicator::Rjif => impact::rjif(corpus, journal_id, year)
            .ok()
            .and_then(|v| v.rjif),
    }
}

/// Annual series of one indicator over [from, to], undefined years dropped.
pub fn indicator_series(
    corpus: &Corpus,
    journal_id: &str,
    indicator: Indicator,
    from: Year,
    to: Year,
) -> Vec<(Year, f64)> {
    (from..=to)
        .filter_map(|year| indicator_value(corpus, journal_id, indicator, year).map(|v| (year, v)))
        .collect()
}

/// Trend verdict of one indicator for one journal over its own entry year
/// through `end_year`; `None` when fewer than 3 usable points exist.
pub fn journal_trend(
    corpus: &Corpus,
    journal_id: &str,
    indicator: Indicator,
    alpha: f64,
    end_year: Year,
) -> Option<TrendResult> {
    let entry = corpus.entry_year(journal_id).ok()?;
    let series = indicator_series(corpus, journal_id, indicator, entry, end_year);
    fit_trend(&series, alpha).ok()
}

/// Share of a cohort showing significant trends in one indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendShareSummary {
    pub indicator: Indicator,
    pub n_journals: usize,
    /// Journals with enough points for a verdict; shares are over these.
    pub n_with_verdict: usize,
    pub share_sig_increase: Option<f64>,
    pub share_sig_decline: Option<f64>,
}

/// Per-indicator shares of journals with significant increases/declines
/// between each journal's entry year and `end_year`. Journals with fewer
/// than 3 usable points are counted but excluded from the shares.
pub fn cohort_trend_summary(
    corpus: &Corpus,
    cohort: &BTreeSet<String>,
    indicators: &[Indicator],
    alpha: f64,
    end_year: Year,
) -> Result<Vec<TrendShareSummary>, TrendError> {
    if cohort.is_empty() {
        return Err(TrendError::EmptyCohort);
    }
    let journals: Vec<&String> = cohort.iter().collect();
    let verdicts: Vec<Vec<Option<Verdict>>> = journals
        .par_iter()
        .map(|journal_id| {
            indicators
                .iter()
                .map(|&ind| {
                    journal_trend(corpus, journal_id, ind, alpha, end_year).map(|t| t.verdict)
                })
                .collect()
        })
        .collect();
    Ok(indicators
        .iter()
        .enumerate()
        .map(|(col, &indicator)| {
            let mut n_with_verdict = 0usize;
            let mut increases = 0usize;
            let mut declines = 0usize;
            for row in &verdicts {
                match row[col] {
                    Some(Verdict::SigIncrease) => {
                        n_with_verdict += 1;
                        increases += 1;
                    }
                    Some(Verdict::SigDecline) => {
                        n_with_verdict += 1;
                        declines += 1;
                    }
                    Some(Verdict::NotSignificant) => n_with_verdict += 1,
                    None => {}
                }
            }
            let share = |k: usize| {
                (n_with_verdict > 0).then(|| 100.0 * k as f64 / n_with_verdict as f64)
            };
            TrendShareSummary {
                indicator,
                n_journals: journals.len(),
                n_with_verdict,
                share_sig_increase: share(increases),
                share_sig_decline: share(declines),
            }
        })
        .collect())
}

/// Median indicator levels of a cohort in each journal's own entry year
/// and in the common end year.
#[derive(Debug, Clone, PartialEq)]
pub struct BeginEndMedians {
    pub indicator: Indicator,
    pub median_begin: Option<f64>,
    pub median_end: Option<f64>,
    /// `median_end / median_begin`; `None` when either median is
    /// undefined or the begin median is zero.
    pub ratio_end_begin: Option<f64>,
    pub n_begin: usize,
    pub n_end: usize,
}

pub fn begin_end_medians(
    corpus: &Corpus,
    cohort: &BTreeSet<String>,
    indicators: &[Indicator],
    end_year: Year,
) -> Result<Vec<BeginEndMedians>, TrendError> {
    if cohort.is_empty() {
        return Err(TrendError::EmptyCohort);
    }
    Ok(indicators
        .iter()
        .map(|&indicator| {
            let mut begin = Vec::new();
            let mut end = Vec::new();
            for journal_id in cohort {
                if let Ok(entry) = corpus.entry_year(journal_id) {
                    if let Some(v) = indicator_value(corpus, journal_id, indicator, entry) {
                        begin.push(v);
                    }
                }
                if let Some(v) = indicator_value(corpus, journal_id, indicator, end_year) {
                    end.push(v);
                }
            }
            let median_begin = median(&begin);
            let median_end = median(&end);
            let ratio_end_begin = match (median_begin, median_end) {
                (Some(b), Some(e)) if b != 0.0 => Some(e / b),
                _ => None,
            };
            BeginEndMedians {
                indicator,
                median_begin,
                median_end,
                ratio_end_begin,
                n_begin: begin.len(),
                n_end: end.len(),
            }
        })
        .collect())
}

/// Cohort attribute used for breakdown rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    Discipline,
    Language,
    OpenAccess,
}

impl Grouping {
    pub fn as_str(self) -> &'static str {
        match self {
            Grouping::Discipline => "discipline",
            Grouping::Language => "language",
            Grouping::OpenAccess => "open_access",
        }
    }

    /// Group labels in canonical report order.
    fn labels(self) -> &'static [&'static str] {
        match self {
            Grouping::Discipline => &[
                "social_sci_humanities",
                "clinical_med",
                "biomed_res",
                "natural_sci",
                "engineering",
                "other",
            ],
            Grouping::Language => &["english_only", "english_plus_other", "non_english"],
            Grouping::OpenAccess => &["open_access", "not_open_access"],
        }
    }

    fn label_of(self, journal: &crate::corpus::JournalRecord) -> &'static str {
        match self {
            Grouping::Discipline => journal.discipline.as_str(),
            Grouping::Language => journal.languages.as_str(),
            Grouping::OpenAccess => {
                if journal.open_access {
                    "open_access"
                } else {
                    "not_open_access"
                }
            }
        }
    }
}

/// One group's row of the per-discipline / language / access-status table:
/// trend shares plus median end-year scores for the five indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownRow {
    pub grouping: Grouping,
    pub group: &'static str,
    pub n_journals: usize,
    pub pct_sig_increase_publications: Option<f64>,
    pub pct_sig_increase_jif: Option<f64>,
    pub pct_sig_increase_rjif: Option<f64>,
    pub pct_sig_decline_ino_p: Option<f64>,
    pub pct_sig_decline_ino_c: Option<f64>,
    pub median_end_publications: Option<f64>,
    pub median_end_jif: Option<f64>,
    pub median_end_rjif: Option<f64>,
    pub median_end_ino_p: Option<f64>,
    pub median_end_ino_c: Option<f64>,
}

/// Splits the cohort by `grouping` and summarizes each non-empty group.
/// Group sizes sum to the cohort size (the attribute partitions it).
pub fn cohort_breakdown(
    corpus: &Corpus,
    cohort: &BTreeSet<String>,
    grouping: Grouping,
    alpha: f64,
    end_year: Year,
) -> Result<Vec<BreakdownRow>, TrendError> {
    if cohort.is_empty() {
        return Err(TrendError::EmptyCohort);
    }
    let mut rows = Vec::new();
    for &label in grouping.labels() {
        let members: BTreeSet<String> = cohort
            .iter()
            .filter(|id| {
                corpus
                    .journal(id)
                    .map(|j| grouping.label_of(j) == label)
                    .unwrap_or(false)
            })
            .cloned()
            .collect();
        if members.is_empty() {
            continue;
        }
        let shares = cohort_trend_summary(corpus, &members, &Indicator::ALL, alpha, end_year)?;
        let medians = begin_end_medians(corpus, &members, &Indicator::ALL, end_year)?;
        let share_of = |ind: Indicator| shares.iter().find(|s| s.indicator == ind).cloned();
        let median_of = |ind: Indicator| {
            medians
                .iter()
                .find(|m| m.indicator == ind)
                .and_then(|m| m.median_end)
        };
        rows.push(BreakdownRow {
            grouping,
            group: label,
            n_journals: members.len(),
            pct_sig_increase_publications: share_of(Indicator::Publications)
                .and_then(|s| s.share_sig_increase),
            pct_sig_increase_jif: share_of(Indicator::Jif).and_then(|s| s.share_sig_increase),
            pct_sig_increase_rjif: share_of(Indicator::Rjif).and_then(|s| s.share_sig_increase),
            pct_sig_decline_ino_p: share_of(Indicator::InoP).and_then(|s| s.share_sig_decline),
            pct_sig_decline_ino_c: share_of(Indicator::InoC).and_then(|s| s.share_sig_decline),
            median_end_publications: median_of(Indicator::Publications),
            median_end_jif: median_of(Indicator::Jif),
            median_end_rjif: median_of(Indicator::Rjif),
            median_end_ino_p: median_of(Indicator::InoP),
            median_end_ino_c: median_of(Indicator::InoC),
        });
    }
    Ok(rows)
}

/// Sample Pearson correlation matrix with drop-count bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PearsonMatrix {
    /// Symmetric with a unit diagonal.
    pub matrix: Vec<Vec<f64>>,
    pub n_used: usize,
    pub n_dropped: usize,
}

/// Correlates the columns of a table, dropping every row containing a
/// null. Requires at least 3 complete rows and non-degenerate columns.
pub fn pearson_matrix(rows: &[Vec<Option<f64>>]) -> Result<PearsonMatrix, TrendError> {
    let width = rows.first().map(Vec::len).unwrap_or(0);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(TrendError::RaggedTable {
                row: i,
                got: row.len(),
                expected: width,
            });
        }
    }
    let complete: Vec<Vec<f64>> = rows
        .iter()
        .filter(|row| row.iter().all(Option::is_some))
        .map(|row| row.iter().map(|v| v.unwrap()).collect())
        .collect();
    if complete.len() < 3 {
        return Err(TrendError::InsufficientCompleteRows {
            got: complete.len(),
        });
    }
    let n = complete.len() as f64;
    let means: Vec<f64> = (0..width)
        .map(|c| complete.iter().map(|row| row[c]).sum::<f64>() / n)
        .collect();
    let mut cov = vec![vec![0.0; width]; width];
    for row in &complete {
        for i in 0..width {
            let di = row[i] - means[i];
            for j in i..width {
                cov[i][j] += di * (row[j] - means[j]);
            }
        }
    }
    for (i, cov_row) in cov.iter().enumerate() {
        if cov_row[i] == 0.0 {
            return Err(TrendError::ZeroVarianceColumn { column: i });
        }
    }
    let mut matrix = vec![vec![0.0; width]; width];
    for i in 0..width {
        matrix[i][i] = 1.0;
        for j in (i + 1)..width {
            let r = (cov[i][j] / (cov[i][i] * cov[j][j]).sqrt()).clamp(-1.0, 1.0);
            matrix[i][j] = r;
            matrix[j][i] = r;
        }
    }
    Ok(PearsonMatrix {
        matrix,
        n_used: complete.len(),
        n_dropped: rows.len() - complete.len(),
    })
}
