//! Analytics over publication/citation corpora: journal national-orientation
//! indicators, citation-impact measures, cohort trend analyses with
//! significance testing, a bordered random-walk null model for regression
//! toward the mean, and per-country reports — plus a seeded synthetic-corpus
//! generator and a batch CLI.

pub mod cli;
pub mod corpus;
pub mod country_report;
pub mod impact;
pub mod indicators;
pub mod nullmodel;
pub mod synthgen;
pub mod trends;

#[cfg(test)]
pub(crate) mod testutil;

pub use corpus::{load_corpus, select_cohort, CohortSpec, Corpus, CountryCode, Year};
