//! CSV ingestion for the three corpus files.
//!
//! All files are UTF-8, RFC-4180 quoted, with a header row. Lines starting
//! with `#` are treated as comments (the synthetic generator stamps its
//! RNG identifier that way).

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{
    ArticleRecord, CitationRecord, Corpus, CorpusError, CountryCode, DocType, JournalRecord, Year,
};

const ARTICLE_HEADER: [&str; 5] = ["article_id", "journal_id", "year", "doc_type", "countries"];
const JOURNAL_HEADER: [&str; 5] = [
    "journal_id",
    "languages",
    "open_access",
    "field_ids",
    "discipline",
];
const CITATION_HEADER: [&str; 3] = ["citing_article_id", "cited_journal_id", "cited_pub_year"];

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path} line {line}: {message}")]
    Row {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

struct FileReader {
    path: PathBuf,
    reader: csv::Reader<std::fs::File>,
}

impl FileReader {
    fn open(path: &Path, expected_header: &[&str]) -> Result<Self, LoadError> {
        let file = std::fs::File::open(path).map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(file);
        let headers = reader.headers().map_err(|source| LoadError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let found: Vec<&str> = headers.iter().collect();
        if found != expected_header {
            return Err(LoadError::Header {
                path: path.to_path_buf(),
                expected: expected_header.join(","),
                found: found.join(","),
            });
        }
        Ok(FileReader {
            path: path.to_path_buf(),
            reader,
        })
    }

    fn row_error(&self, line: u64, message: impl Into<String>) -> LoadError {
        LoadError::Row {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }
}

fn parse_year(field: &str) -> Result<Year, String> {
    field
        .parse::<Year>()
        .map_err(|_| format!("invalid year `{field}`"))
}

fn read_articles(path: &Path) -> Result<Vec<ArticleRecord>, LoadError> {
    let mut fr = FileReader::open(path, &ARTICLE_HEADER)?;
    let mut articles = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match fr.reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(source) => {
                return Err(LoadError::Csv {
                    path: fr.path.clone(),
                    source,
                })
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != ARTICLE_HEADER.len() {
            return Err(fr.row_error(line, format!("expected 5 fields, found {}", record.len())));
        }
        let article_id = record[0].to_string();
        if article_id.is_empty() {
            return Err(fr.row_error(line, "empty article_id"));
        }
        let journal_id = record[1].to_string();
        let year = parse_year(&record[2]).map_err(|m| fr.row_error(line, m))?;
        let doc_type: DocType = record[3]
            .parse()
            .map_err(|e: CorpusError| fr.row_error(line, e.to_string()))?;
        let countries = if record[4].is_empty() {
            Vec::new()
        } else {
            record[4]
                .split(';')
                .map(CountryCode::new)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| fr.row_error(line, e.to_string()))?
        };
        articles.push(ArticleRecord {
            article_id,
            journal_id,
            year,
            doc_type,
            countries,
        });
    }
    Ok(articles)
}

fn read_journals(path: &Path) -> Result<Vec<JournalRecord>, LoadError> {
    let mut fr = FileReader::open(path, &JOURNAL_HEADER)?;
    let mut journals = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match fr.reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(source) => {
                return Err(LoadError::Csv {
                    path: fr.path.clone(),
                    source,
                })
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != JOURNAL_HEADER.len() {
            return Err(fr.row_error(line, format!("expected 5 fields, found {}", record.len())));
        }
        let journal_id = record[0].to_string();
        if journal_id.is_empty() {
            return Err(fr.row_error(line, "empty journal_id"));
        }
        let languages = record[1]
            .parse()
            .map_err(|e: CorpusError| fr.row_error(line, e.to_string()))?;
        let open_access = match &record[2] {
            "true" => true,
            "false" => false,
            other => {
                return Err(fr.row_error(line, format!("invalid open_access value `{other}`")))
            }
        };
        let field_ids = record[3]
            .split(';')
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        let discipline = record[4]
            .parse()
            .map_err(|e: CorpusError| fr.row_error(line, e.to_string()))?;
        journals.push(JournalRecord {
            journal_id,
            languages,
            open_access,
            field_ids,
            discipline,
        });
    }
    Ok(journals)
}

fn read_citations(
    path: &Path,
    article_years: &HashMap<String, Year>,
) -> Result<Vec<CitationRecord>, LoadError> {
    let mut fr = FileReader::open(path, &CITATION_HEADER)?;
    let mut citations = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match fr.reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(source) => {
                return Err(LoadError::Csv {
                    path: fr.path.clone(),
                    source,
                })
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != CITATION_HEADER.len() {
            return Err(fr.row_error(line, format!("expected 3 fields, found {}", record.len())));
        }
        let citing_article_id = record[0].to_string();
        let cited_journal_id = record[1].to_string();
        let cited_pub_year = parse_year(&record[2]).map_err(|m| fr.row_error(line, m))?;
        // Resolve here so the error can carry the offending line.
        let citing_year = match article_years.get(&citing_article_id) {
            Some(&y) => y,
            None => {
                return Err(fr.row_error(
                    line,
                    format!("citing_article_id `{citing_article_id}` not found in articles"),
                ))
            }
        };
        if cited_pub_year > citing_year {
            return Err(fr.row_error(
                line,
                format!(
                    "cited_pub_year {cited_pub_year} is later than citing article year {citing_year}"
                ),
            ));
        }
        citations.push(CitationRecord {
            citing_article_id,
            cited_journal_id,
            cited_pub_year,
        });
    }
    Ok(citations)
}

/// Loads and validates the three corpus files, returning an indexed,
/// immutable corpus. Row-level problems report the file and line number.
pub fn load_corpus(
    article_path: &Path,
    journal_path: &Path,
    citation_path: &Path,
) -> Result<Corpus, LoadError> {
    let articles = read_articles(article_path)?;
    let journals = read_journals(journal_path)?;
    let article_years: HashMap<String, Year> = articles
        .iter()
        .map(|a| (a.article_id.clone(), a.year))
        .collect();
    let citations = read_citations(citation_path, &article_years)?;
    let corpus = Corpus::from_records(articles, journals, citations)?;
    log::info!(
        "loaded corpus: {} articles ({} citable), {} journals, {} citations",
        corpus.n_articles(),
        corpus.n_citable_articles(),
        corpus.n_journals(),
        corpus.n_citations()
    );
    Ok(corpus)
}
