//! Data model for publication/citation corpora: record types, validated
//! in-memory corpus with derived indexes, and cohort selection.

mod load;

pub use load::{load_corpus, LoadError};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Calendar year.
pub type Year = i32;

/// ISO-3166 alpha-2 country code (two ASCII uppercase letters).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode([u8; 2]);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self, CorpusError> {
        let bytes = code.as_bytes();
        if bytes.len() == 2 && bytes.iter().all(|b| b.is_ascii_uppercase()) {
            Ok(CountryCode([bytes[0], bytes[1]]))
        } else {
            Err(CorpusError::InvalidCountryCode(code.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        // Constructor guarantees ASCII uppercase.
        std::str::from_utf8(&self.0).unwrap()
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountryCode({})", self.as_str())
    }
}

impl FromStr for CountryCode {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CountryCode::new(s)
    }
}

impl TryFrom<String> for CountryCode {
    type Error = CorpusError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        CountryCode::new(&s)
    }
}

impl<'de> serde::Deserialize<'de> for CountryCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CountryCode::new(&s).map_err(serde::de::Error::custom)
    }
}

/// Document type as categorized by the source index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocType {
    Article,
    Review,
    ProceedingsPaper,
    ShortSurvey,
    Other,
}

impl DocType {
    /// Citable items are the four document types counted in publication
    /// statistics and impact-factor denominators.
    pub fn is_citable(self) -> bool {
        !matches!(self, DocType::Other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Review => "review",
            DocType::ProceedingsPaper => "proceedings_paper",
            DocType::ShortSurvey => "short_survey",
            DocType::Other => "other",
        }
    }
}

impl FromStr for DocType {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "article" => Ok(DocType::Article),
            "review" => Ok(DocType::Review),
            "proceedings_paper" => Ok(DocType::ProceedingsPaper),
            "short_survey" => Ok(DocType::ShortSurvey),
            "other" => Ok(DocType::Other),
            _ => Err(CorpusError::InvalidEnumValue {
                field: "doc_type",
                value: s.to_string(),
            }),
        }
    }
}

/// Publication-language class of a journal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    EnglishOnly,
    EnglishPlusOther,
    NonEnglish,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::EnglishOnly => "english_only",
            Language::EnglishPlusOther => "english_plus_other",
            Language::NonEnglish => "non_english",
        }
    }
}

impl FromStr for Language {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "english_only" => Ok(Language::EnglishOnly),
            "english_plus_other" => Ok(Language::EnglishPlusOther),
            "non_english" => Ok(Language::NonEnglish),
            _ => Err(CorpusError::InvalidEnumValue {
                field: "languages",
                value: s.to_string(),
            }),
        }
    }
}

/// Main research discipline of a journal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discipline {
    SocialSciHumanities,
    ClinicalMed,
    BiomedRes,
    NaturalSci,
    Engineering,
    Other,
}

impl Discipline {
    pub fn as_str(self) -> &'static str {
        match self {
            Discipline::SocialSciHumanities => "social_sci_humanities",
            Discipline::ClinicalMed => "clinical_med",
            Discipline::BiomedRes => "biomed_res",
            Discipline::NaturalSci => "natural_sci",
            Discipline::Engineering => "engineering",
            Discipline::Other => "other",
        }
    }
}

impl FromStr for Discipline {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "social_sci_humanities" => Ok(Discipline::SocialSciHumanities),
            "clinical_med" => Ok(Discipline::ClinicalMed),
            "biomed_res" => Ok(Discipline::BiomedRes),
            "natural_sci" => Ok(Discipline::NaturalSci),
            "engineering" => Ok(Discipline::Engineering),
            "other" => Ok(Discipline::Other),
            _ => Err(CorpusError::InvalidEnumValue {
                field: "discipline",
                value: s.to_string(),
            }),
        }
    }
}

/// One indexed publication.
///
/// `countries` carries one entry per author affiliation, with repetition:
/// countryship counting needs the multiplicity, whole counting deduplicates
/// per article. An empty list marks an unaffiliated publication.
#[derive(Debug, Clone, PartialEq)]
pub struct ArticleRecord {
    pub article_id: String,
    pub journal_id: String,
    pub year: Year,
    pub doc_type: DocType,
    pub countries: Vec<CountryCode>,
}

impl ArticleRecord {
    pub fn is_unaffiliated(&self) -> bool {
        self.countries.is_empty()
    }
}

/// Journal metadata used for breakdown reports and field normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct JournalRecord {
    pub journal_id: String,
    pub languages: Language,
    pub open_access: bool,
    pub field_ids: BTreeSet<String>,
    pub discipline: Discipline,
}

/// One citing article referencing a (journal, publication-year) target.
///
/// The citing article's own record supplies the citation year and the
/// citing affiliation countries. The cited target does not have to be
/// ingested as an article.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationRecord {
    pub citing_article_id: String,
    pub cited_journal_id: String,
    pub cited_pub_year: Year,
}

/// Per-year whole-count country totals over the affiliated citable
/// articles of the entire corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountryYearTotals {
    pub articles_by_country: BTreeMap<CountryCode, u32>,
    pub total_affiliated_articles: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("invalid country code `{0}` (expected two ASCII uppercase letters)")]
    InvalidCountryCode(String),
    #[error("invalid {field} value `{value}`")]
    InvalidEnumValue { field: &'static str, value: String },
    #[error("duplicate article_id `{0}`")]
    DuplicateArticleId(String),
    #[error("duplicate journal_id `{0}`")]
    DuplicateJournalId(String),
    #[error("article `{article_id}` references unknown journal `{journal_id}`")]
    UnknownJournal {
        article_id: String,
        journal_id: String,
    },
    #[error("citation references citing_article_id `{0}` which is not in the article set")]
    DanglingCitingArticle(String),
    #[error(
        "citation from `{citing_article_id}` (year {citing_year}) targets later year {cited_pub_year}"
    )]
    CitationYearOrder {
        citing_article_id: String,
        citing_year: Year,
        cited_pub_year: Year,
    },
    #[error("journal `{0}` has an empty field_ids set")]
    EmptyFieldIds(String),
    #[error("journal `{0}` has no citable articles in the corpus")]
    NoArticles(String),
    #[error("invalid cohort spec: {0}")]
    InvalidCohortSpec(String),
}

/// Validated, indexed, immutable corpus of articles, journals and citations.
///
/// All derived indexes are built once at construction; every downstream
/// operation treats the corpus as read-only, so it can be shared freely
/// across threads.
#[derive(Debug)]
pub struct Corpus {
    articles: Vec<ArticleRecord>,
    journals: BTreeMap<String, JournalRecord>,
    citations: Vec<CitationRecord>,
    article_index: HashMap<String, u32>,
    /// journal -> year -> citable article indices (doc_type `other` excluded).
    journal_years: BTreeMap<String, BTreeMap<Year, Vec<u32>>>,
    /// (cited journal, citing article's year) -> citation indices.
    citations_by_target: HashMap<(String, Year), Vec<u32>>,
    country_year: BTreeMap<Year, CountryYearTotals>,
    year_range: Option<(Year, Year)>,
}

impl Corpus {
    /// Builds a corpus from typed records, enforcing every cross-record
    /// invariant. `load_corpus` goes through this after CSV parsing.
    pub fn from_records(
        articles: Vec<ArticleRecord>,
        journals: Vec<JournalRecord>,
        citations: Vec<CitationRecord>,
    ) -> Result<Self, CorpusError> {
        let mut journal_map = BTreeMap::new();
        for journal in journals {
            if journal.field_ids.is_empty() {
                return Err(CorpusError::EmptyFieldIds(journal.journal_id));
            }
            let id = journal.journal_id.clone();
            if journal_map.insert(id.clone(), journal).is_some() {
                return Err(CorpusError::DuplicateJournalId(id));
            }
        }

        let mut article_index = HashMap::with_capacity(articles.len());
        let mut journal_years: BTreeMap<String, BTreeMap<Year, Vec<u32>>> = BTreeMap::new();
        let mut country_year: BTreeMap<Year, CountryYearTotals> = BTreeMap::new();
        let mut year_range: Option<(Year, Year)> = None;

        for (idx, article) in articles.iter().enumerate() {
            if !journal_map.contains_key(&article.journal_id) {
                return Err(CorpusError::UnknownJournal {
                    article_id: article.article_id.clone(),
                    journal_id: article.journal_id.clone(),
                });
            }
            if article_index
                .insert(article.article_id.clone(), idx as u32)
                .is_some()
            {
                return Err(CorpusError::DuplicateArticleId(article.article_id.clone()));
            }
            year_range = Some(match year_range {
                None => (article.year, article.year),
                Some((lo, hi)) => (lo.min(article.year), hi.max(article.year)),
            });
            if article.doc_type.is_citable() {
                journal_years
                    .entry(article.journal_id.clone())
                    .or_default()
                    .entry(article.year)
                    .or_default()
                    .push(idx as u32);
                if !article.countries.is_empty() {
                    let totals = country_year.entry(article.year).or_default();
                    totals.total_affiliated_articles += 1;
                    let distinct: BTreeSet<CountryCode> =
                        article.countries.iter().copied().collect();
                    for country in distinct {
                        *totals.articles_by_country.entry(country).or_insert(0) += 1;
                    }
                }
            }
        }

        let mut citations_by_target: HashMap<(String, Year), Vec<u32>> = HashMap::new();
        for (idx, citation) in citations.iter().enumerate() {
            let citing = match article_index.get(&citation.citing_article_id) {
                Some(&i) => &articles[i as usize],
                None => {
                    return Err(CorpusError::DanglingCitingArticle(
                        citation.citing_article_id.clone(),
                    ))
                }
            };
            if citation.cited_pub_year > citing.year {
                return Err(CorpusError::CitationYearOrder {
                    citing_article_id: citation.citing_article_id.clone(),
                    citing_year: citing.year,
                    cited_pub_year: citation.cited_pub_year,
                });
            }
            citations_by_target
                .entry((citation.cited_journal_id.clone(), citing.year))
                .or_default()
                .push(idx as u32);
        }

        Ok(Corpus {
            articles,
            journals: journal_map,
            citations,
            article_index,
            journal_years,
            citations_by_target,
            country_year,
            year_range,
        })
    }

    pub fn articles(&self) -> &[ArticleRecord] {
        &self.articles
    }

    pub fn citations(&self) -> &[CitationRecord] {
        &self.citations
    }

    pub fn journals(&self) -> impl Iterator<Item = &JournalRecord> {
        self.journals.values()
    }

    pub fn journal(&self, journal_id: &str) -> Option<&JournalRecord> {
        self.journals.get(journal_id)
    }

    pub fn article_by_id(&self, article_id: &str) -> Option<&ArticleRecord> {
        self.article_index
            .get(article_id)
            .map(|&i| &self.articles[i as usize])
    }

    pub fn n_articles(&self) -> usize {
        self.articles.len()
    }

    pub fn n_citable_articles(&self) -> usize {
        self.articles
            .iter()
            .filter(|a| a.doc_type.is_citable())
            .count()
    }

    pub fn n_journals(&self) -> usize {
        self.journals.len()
    }

    pub fn n_citations(&self) -> usize {
        self.citations.len()
    }

    /// Min/max publication year over all ingested articles.
    pub fn year_range(&self) -> Option<(Year, Year)> {
        self.year_range
    }

    /// Journal ids with at least one citable article, ascending.
    pub fn journals_with_articles(&self) -> impl Iterator<Item = &str> {
        self.journal_years.keys().map(String::as_str)
    }

    /// Journal ids with at least one citable article in `year`, ascending.
    pub fn journals_active_in(&self, year: Year) -> Vec<&str> {
        self.journal_years
            .iter()
            .filter(|(_, years)| years.contains_key(&year))
            .map(|(id, _)| id.as_str())
            .collect()
    }

    /// Year -> citable articles map for one journal.
    pub fn journal_year_articles(&self, journal_id: &str) -> Option<&BTreeMap<Year, Vec<u32>>> {
        self.journal_years.get(journal_id)
    }

    /// Citable articles of a journal in a year (empty if none).
    pub fn citable_articles(
        &self,
        journal_id: &str,
        year: Year,
    ) -> impl Iterator<Item = &ArticleRecord> {
        self.journal_years
            .get(journal_id)
            .and_then(|years| years.get(&year))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&i| &self.articles[i as usize])
    }

    pub fn citable_count(&self, journal_id: &str, year: Year) -> u32 {
        self.journal_years
            .get(journal_id)
            .and_then(|years| years.get(&year))
            .map(|v| v.len() as u32)
            .unwrap_or(0)
    }

    /// Citations targeting `journal_id` whose citing article was published
    /// in `citing_year`.
    pub fn citations_to(
        &self,
        journal_id: &str,
        citing_year: Year,
    ) -> impl Iterator<Item = &CitationRecord> {
        self.citations_by_target
            .get(&(journal_id.to_string(), citing_year))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(|&i| &self.citations[i as usize])
    }

    pub fn country_year_totals(&self, year: Year) -> Option<&CountryYearTotals> {
        self.country_year.get(&year)
    }

    /// First year with a citable publication; the journal's entry year.
    pub fn entry_year(&self, journal_id: &str) -> Result<Year, CorpusError> {
        self.journal_years
            .get(journal_id)
            .and_then(|years| years.keys().next().copied())
            .ok_or_else(|| CorpusError::NoArticles(journal_id.to_string()))
    }
}

/// Cohort selection rules: entry window, activity and affiliation filters.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortSpec {
    pub entry_from: Year,
    pub entry_to: Year,
    pub end_year: Year,
    pub min_avg_pubs_per_year: f64,
    /// Maximum tolerated share (percent) of articles without affiliations.
    pub max_unaffiliated_share: f64,
    pub require_uninterrupted: bool,
}

impl CohortSpec {
    /// The defaults used throughout the reports: entry window 1997-2010,
    /// followed through 2019, at least 10 publications/year on average,
    /// at most 50% unaffiliated articles, no publication gaps.
    pub fn defaults() -> Self {
        CohortSpec {
            entry_from: 1997,
            entry_to: 2010,
            end_year: 2019,
            min_avg_pubs_per_year: 10.0,
            max_unaffiliated_share: 50.0,
            require_uninterrupted: true,
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.entry_from > self.entry_to {
            return Err(CorpusError::InvalidCohortSpec(format!(
                "entry_from {} > entry_to {}",
                self.entry_from, self.entry_to
            )));
        }
        if self.entry_to >= self.end_year {
            return Err(CorpusError::InvalidCohortSpec(format!(
                "entry_to {} must precede end_year {}",
                self.entry_to, self.end_year
            )));
        }
        if !self.min_avg_pubs_per_year.is_finite() || self.min_avg_pubs_per_year < 0.0 {
            return Err(CorpusError::InvalidCohortSpec(
                "min_avg_pubs_per_year must be non-negative".to_string(),
            ));
        }
        if !(0.0..=100.0).contains(&self.max_unaffiliated_share) {
            return Err(CorpusError::InvalidCohortSpec(
                "max_unaffiliated_share must be within [0, 100]".to_string(),
            ));
        }
        Ok(())
    }
}

/// Selects the journals satisfying every clause of `spec`: entry year
/// inside the window, uninterrupted publication through `end_year` when
/// required, minimum average annual output, and a bounded share of
/// unaffiliated articles. Result is ordered by journal id.
pub fn select_cohort(corpus: &Corpus, spec: &CohortSpec) -> Result<BTreeSet<String>, CorpusError> {
    spec.validate()?;
    let mut cohort = BTreeSet::new();
    for (journal_id, years) in &corpus.journal_years {
        let entry = *years.keys().next().expect("non-empty by construction");
        if entry < spec.entry_from || entry > spec.entry_to {
            continue;
        }
        if spec.require_uninterrupted && (entry..=spec.end_year).any(|y| !years.contains_key(&y)) {
            continue;
        }
        let mut total: u64 = 0;
        let mut unaffiliated: u64 = 0;
        for (_, indices) in years.range(entry..=spec.end_year) {
            total += indices.len() as u64;
            unaffiliated += indices
                .iter()
                .filter(|&&i| corpus.articles[i as usize].is_unaffiliated())
                .count() as u64;
        }
        let n_years = (spec.end_year - entry + 1) as f64;
        if (total as f64) / n_years < spec.min_avg_pubs_per_year {
            continue;
        }
        // Entry year has >= 1 article, so total > 0.
        if 100.0 * (unaffiliated as f64) / (total as f64) > spec.max_unaffiliated_share {
            continue;
        }
        cohort.insert(journal_id.clone());
    }
    Ok(cohort)
}
