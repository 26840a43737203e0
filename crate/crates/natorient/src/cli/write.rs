//! CSV output writers with diff-stable formatting: fixed-point decimals,
//! no scientific notation, empty cells for nulls, canonical row orders.
//!
//! Conventions: indicator percentages carry 2 decimals, impact factors 3,
//! probabilities 9, regression coefficients 6; journal-share percentages
//! in cohort reports are rounded to integers.

use std::path::{Path, PathBuf};

use crate::corpus::CountryCode;
use crate::country_report::{CountryReportRow, DomesticForeignPoint};
use crate::impact::{ImpactValue, RatioSeriesPoint};
use crate::indicators::IndicatorRow;
use crate::nullmodel::{ComparisonReport, WalkDistribution};
use crate::trends::{
    BeginEndMedians, BreakdownRow, Indicator, PearsonMatrix, TrendResult, TrendShareSummary,
};
use crate::Year;

use super::CliError;

/// Fixed-point rendering; negative zero normalized, never scientific.
pub fn fixed(value: f64, decimals: usize) -> String {
    let v = if value == 0.0 { 0.0 } else { value };
    format!("{v:.decimals$}")
}

pub fn opt_fixed(value: Option<f64>, decimals: usize) -> String {
    value.map(|v| fixed(v, decimals)).unwrap_or_default()
}

/// Journal-share percentages are reported as integers.
pub fn opt_pct_int(value: Option<f64>) -> String {
    value.map(|v| format!("{:.0}", v)).unwrap_or_default()
}

fn opt_country(c: Option<CountryCode>) -> String {
    c.map(|c| c.as_str().to_string()).unwrap_or_default()
}

pub struct TableWriter {
    writer: csv::Writer<std::fs::File>,
    path: PathBuf,
}

impl TableWriter {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let file = std::fs::File::create(&path)
            .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display())))?;
        let mut writer = csv::Writer::from_writer(file);
        writer
            .write_record(header)
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
        Ok(TableWriter { writer, path })
    }

    pub fn row<I, S>(&mut self, record: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer
            .write_record(record)
            .map_err(|e| CliError::Internal(format!("{}: {e}", self.path.display())))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer
            .flush()
            .map_err(|e| CliError::Internal(format!("{}: {e}", self.path.display())))?;
        Ok(self.path)
    }
}

pub fn write_indicators(dir: &Path, rows: &[IndicatorRow]) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "indicators.csv",
        &[
            "journal_id",
            "year",
            "ino_p",
            "ino_p_countryship",
            "nino_ai",
            "nino_sqrt_ai",
            "nino_p_ai",
            "nino_p_sqrt_ai",
            "ino_c",
            "top_country_p",
            "top_country_c",
        ],
    )?;
    for r in rows {
        w.row([
            r.journal_id.clone(),
            r.year.to_string(),
            opt_fixed(r.ino_p, 2),
            opt_fixed(r.ino_p_countryship, 2),
            opt_fixed(r.nino_ai, 2),
            opt_fixed(r.nino_sqrt_ai, 2),
            opt_fixed(r.nino_p_ai, 2),
            opt_fixed(r.nino_p_sqrt_ai, 2),
            opt_fixed(r.ino_c, 2),
            opt_country(r.top_country_p),
            opt_country(r.top_country_c),
        ])?;
    }
    w.finish()
}

pub fn write_impact(
    dir: &Path,
    rows: &[(String, Year, ImpactValue)],
) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "impact.csv",
        &["journal_id", "year", "citable_items", "citations", "jif3", "rjif"],
    )?;
    for (journal_id, year, v) in rows {
        w.row([
            journal_id.clone(),
            year.to_string(),
            v.citable_items.to_string(),
            v.citations.to_string(),
            fixed(v.jif3, 3),
            opt_fixed(v.rjif, 3),
        ])?;
    }
    w.finish()
}

pub fn write_ratio_series(dir: &Path, points: &[RatioSeriesPoint]) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "ratio_series.csv",
        &["year", "ratio_journals", "ratio_articles", "ratio_median_jif"],
    )?;
    for p in points {
        w.row([
            p.year.to_string(),
            opt_fixed(p.ratio_journals, 3),
            opt_fixed(p.ratio_articles, 3),
            opt_fixed(p.ratio_median_jif, 3),
        ])?;
    }
    w.finish()
}

pub fn write_trends(
    dir: &Path,
    rows: &[(String, Indicator, Option<TrendResult>)],
) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "trends.csv",
        &["journal_id", "indicator", "slope", "growth_rate", "p_value", "verdict", "n_points"],
    )?;
    for (journal_id, indicator, trend) in rows {
        match trend {
            Some(t) => w.row([
                journal_id.clone(),
                indicator.as_str().to_string(),
                fixed(t.slope, 6),
                opt_fixed(t.growth_rate, 6),
                fixed(t.p_value, 9),
                t.verdict.as_str().to_string(),
                t.n_points.to_string(),
            ])?,
            None => w.row([
                journal_id.clone(),
                indicator.as_str().to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])?,
        }
    }
    w.finish()
}

pub fn write_cohort_summary(
    dir: &Path,
    shares: &[TrendShareSummary],
    medians: &[BeginEndMedians],
) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "cohort_summary.csv",
        &[
            "indicator",
            "n_journals",
            "n_with_verdict",
            "share_sig_increase",
            "share_sig_decline",
            "median_begin",
            "median_end",
            "ratio_end_begin",
        ],
    )?;
    for s in shares {
        let m = medians
            .iter()
            .find(|m| m.indicator == s.indicator)
            .expect("medians cover the same indicators");
        w.row([
            s.indicator.as_str().to_string(),
            s.n_journals.to_string(),
            s.n_with_verdict.to_string(),
            opt_pct_int(s.share_sig_increase),
            opt_pct_int(s.share_sig_decline),
            opt_fixed(m.median_begin, 3),
            opt_fixed(m.median_end, 3),
            opt_fixed(m.ratio_end_begin, 3),
        ])?;
    }
    w.finish()
}

pub fn write_breakdown(dir: &Path, rows: &[BreakdownRow]) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "breakdown.csv",
        &[
            "grouping",
            "group",
            "n_journals",
            "pct_sig_increase_publications",
            "pct_sig_increase_jif",
            "pct_sig_increase_rjif",
            "pct_sig_decline_ino_p",
            "pct_sig_decline_ino_c",
            "median_publications",
            "median_jif",
            "median_rjif",
            "median_ino_p",
            "median_ino_c",
        ],
    )?;
    for r in rows {
        w.row([
            r.grouping.as_str().to_string(),
            r.group.to_string(),
            r.n_journals.to_string(),
            opt_pct_int(r.pct_sig_increase_publications),
            opt_pct_int(r.pct_sig_increase_jif),
            opt_pct_int(r.pct_sig_increase_rjif),
            opt_pct_int(r.pct_sig_decline_ino_p),
            opt_pct_int(r.pct_sig_decline_ino_c),
            opt_fixed(r.median_end_publications, 3),
            opt_fixed(r.median_end_jif, 3),
            opt_fixed(r.median_end_rjif, 3),
            opt_fixed(r.median_end_ino_p, 3),
            opt_fixed(r.median_end_ino_c, 3),
        ])?;
    }
    w.finish()
}

pub fn write_walk(dir: &Path, dist: &WalkDistribution) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "walk.csv",
        &["steps", "net_decline", "path_count", "total_paths", "probability"],
    )?;
    for o in &dist.outcomes {
        let p = crate::nullmodel::rational_to_f64(&o.probability);
        w.row([
            dist.config.steps().to_string(),
            o.net_decline.to_string(),
            o.path_count.to_string(),
            dist.total_paths.to_string(),
            fixed(p, 9),
        ])?;
    }
    w.finish()
}

pub fn write_compare(dir: &Path, report: &ComparisonReport) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "compare.csv",
        &["net_decline", "model_pct", "empirical_pct"],
    )?;
    for r in &report.rows {
        w.row([
            r.net_decline.to_string(),
            fixed(r.model_pct, 2),
            fixed(r.empirical_pct, 2),
        ])?;
    }
    w.finish()
}

pub fn write_country_report(dir: &Path, rows: &[CountryReportRow]) -> Result<PathBuf, CliError> {
    let mut header = vec![
        "country".to_string(),
        "has_national_journals".to_string(),
        "n_national_journals".to_string(),
        "pct_sig_decline_ino_p".to_string(),
        "pct_sig_increase_rjif".to_string(),
    ];
    for ind in Indicator::ALL {
        header.push(format!("median_begin_{}", ind.as_str()));
        header.push(format!("median_end_{}", ind.as_str()));
    }
    for ind in Indicator::ALL {
        header.push(format!("benchmark_begin_{}", ind.as_str()));
        header.push(format!("benchmark_end_{}", ind.as_str()));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = TableWriter::create(dir, "country_report.csv", &header_refs)?;
    for r in rows {
        let mut record = vec![
            r.country.as_str().to_string(),
            (r.n_national_journals > 0).to_string(),
            r.n_national_journals.to_string(),
            opt_pct_int(r.pct_sig_decline_ino_p),
            opt_pct_int(r.pct_sig_increase_rjif),
        ];
        for ind in Indicator::ALL {
            let pair = r.medians.get(&ind).copied().unwrap_or_default();
            record.push(opt_fixed(pair.begin, 3));
            record.push(opt_fixed(pair.end, 3));
        }
        for ind in Indicator::ALL {
            let pair = r.benchmark_medians.get(&ind).copied().unwrap_or_default();
            record.push(opt_fixed(pair.begin, 3));
            record.push(opt_fixed(pair.end, 3));
        }
        w.row(record)?;
    }
    w.finish()
}

pub fn write_domestic_foreign(
    dir: &Path,
    rows: &[(CountryCode, Vec<DomesticForeignPoint>)],
) -> Result<PathBuf, CliError> {
    let mut w = TableWriter::create(
        dir,
        "domestic_foreign.csv",
        &[
            "country",
            "year",
            "domestic_share",
            "foreign_share",
            "target_country_share",
        ],
    )?;
    for (country, points) in rows {
        for p in points {
            w.row([
                country.as_str().to_string(),
                p.year.to_string(),
                opt_fixed(p.domestic_share, 2),
                opt_fixed(p.foreign_share, 2),
                opt_fixed(p.target_share, 2),
            ])?;
        }
    }
    w.finish()
}

pub const VARIANT_COLUMNS: [&str; 6] = [
    "ino_p",
    "ino_p_countryship",
    "nino_ai",
    "nino_sqrt_ai",
    "nino_p_ai",
    "nino_p_sqrt_ai",
];

pub fn write_correlations(dir: &Path, matrix: &PearsonMatrix) -> Result<PathBuf, CliError> {
    let mut header = vec!["variant"];
    header.extend(VARIANT_COLUMNS);
    let mut w = TableWriter::create(dir, "correlations.csv", &header)?;
    for (i, name) in VARIANT_COLUMNS.iter().enumerate() {
        let mut record = vec![name.to_string()];
        for j in 0..VARIANT_COLUMNS.len() {
            record.push(fixed(matrix.matrix[i][j], 4));
        }
        w.row(record)?;
    }
    w.finish()
}
