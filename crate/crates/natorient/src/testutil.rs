//! Builders shared by the unit tests of several modules.

use std::collections::BTreeSet;

use crate::corpus::{
    ArticleRecord, CitationRecord, Corpus, CountryCode, Discipline, DocType, JournalRecord,
    Language, Year,
};

pub fn cc(code: &str) -> CountryCode {
    CountryCode::new(code).unwrap()
}

pub fn countries(codes: &[&str]) -> Vec<CountryCode> {
    codes.iter().map(|c| cc(c)).collect()
}

pub fn journal(id: &str) -> JournalRecord {
    journal_in_fields(id, &["F1"])
}

pub fn journal_in_fields(id: &str, fields: &[&str]) -> JournalRecord {
    JournalRecord {
        journal_id: id.to_string(),
        languages: Language::EnglishOnly,
        open_access: false,
        field_ids: fields.iter().map(|f| f.to_string()).collect::<BTreeSet<_>>(),
        discipline: Discipline::Other,
    }
}

pub fn article(id: &str, journal_id: &str, year: Year, codes: &[&str]) -> ArticleRecord {
    ArticleRecord {
        article_id: id.to_string(),
        journal_id: journal_id.to_string(),
        year,
        doc_type: DocType::Article,
        countries: countries(codes),
    }
}

pub fn article_typed(
    id: &str,
    journal_id: &str,
    year: Year,
    doc_type: DocType,
    codes: &[&str],
) -> ArticleRecord {
    ArticleRecord {
        article_id: id.to_string(),
        journal_id: journal_id.to_string(),
        year,
        doc_type,
        countries: countries(codes),
    }
}

pub fn citation(citing: &str, cited_journal: &str, pub_year: Year) -> CitationRecord {
    CitationRecord {
        citing_article_id: citing.to_string(),
        cited_journal_id: cited_journal.to_string(),
        cited_pub_year: pub_year,
    }
}

pub fn corpus(
    articles: Vec<ArticleRecord>,
    journals: Vec<JournalRecord>,
    citations: Vec<CitationRecord>,
) -> Corpus {
    Corpus::from_records(articles, journals, citations).unwrap()
}
