//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Expected values come from independent oracles implemented in
//! `mod oracle` below: brute-force scans over raw records, a raw-moment
//! OLS with its own incomplete-beta t-test, direct-formula Pearson
//! correlations, and exhaustive walk-path enumeration. The oracles never
//! call the library code they check.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use natorient::corpus::{
    ArticleRecord, CitationRecord, Corpus, CountryCode, Discipline, DocType, JournalRecord,
    Language,
};
use natorient::indicators::{self, AiScope, Counting, NinoParams};
use natorient::nullmodel::{self, WalkConfig};
use natorient::trends;
use natorient::{CohortSpec, Year};

fn pass(name: &str) {
    println!("acceptance {name}: PASS");
}

fn rational(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

// --- criterion 1: null-model exactness -----------------------------------

#[test]
fn c01_null_model_exactness() {
    let one_step = nullmodel::walk_distribution(&WalkConfig::from_top(1).unwrap());
    assert_eq!(one_step.probability(1), Some(&rational(1, 2)));
    assert_eq!(one_step.probability(0), Some(&rational(1, 2)));

    let two_steps = nullmodel::walk_distribution(&WalkConfig::from_top(2).unwrap());
    assert_eq!(two_steps.probability(0), Some(&rational(2, 5)));
    assert_eq!(two_steps.probability(1), Some(&rational(2, 5)));
    assert_eq!(two_steps.probability(2), Some(&rational(1, 5)));

    let config = WalkConfig::from_top(3).unwrap();
    let three_steps = nullmodel::walk_distribution(&config);
    for (d, expected) in [(0, (4, 13)), (1, (5, 13)), (2, (3, 13)), (3, (1, 13))] {
        assert_eq!(three_steps.probability(d), Some(&rational(expected.0, expected.1)));
    }
    let enumerated = oracle::enumerate_walk(10, 10, 3);
    assert_eq!(enumerated.values().sum::<u64>(), 13);
    for o in &three_steps.outcomes {
        assert_eq!(
            format!("{}", o.path_count),
            format!("{}", enumerated[&o.net_decline])
        );
    }
    pass("01 null-model exactness");
}

// --- criteria 2 and 3: indicator oracles and NINO convexity --------------

/// A random corpus of at most 50 articles over at most 6 countries, with
/// citing articles for INO-C.
fn random_corpus(rng: &mut ChaCha8Rng) -> Corpus {
    const POOL: [&str; 6] = ["AA", "BB", "CC", "DD", "EE", "FF"];
    let n_countries = rng.random_range(1..=POOL.len());
    let n_journals = rng.random_range(1..=3u32);
    let n_articles = rng.random_range(1..=50u32);
    let mut articles = Vec::new();
    for i in 0..n_articles {
        let n_affil = rng.random_range(0..=3usize);
        let countries: Vec<CountryCode> = (0..n_affil)
            .map(|_| CountryCode::new(POOL[rng.random_range(0..n_countries)]).unwrap())
            .collect();
        articles.push(ArticleRecord {
            article_id: format!("A{i}"),
            journal_id: format!("J{}", rng.random_range(0..n_journals)),
            year: 2000,
            doc_type: DocType::Article,
            countries,
        });
    }
    let mut citations = Vec::new();
    for i in 0..rng.random_range(0..15u32) {
        let n_affil = rng.random_range(0..=3usize);
        let countries: Vec<CountryCode> = (0..n_affil)
            .map(|_| CountryCode::new(POOL[rng.random_range(0..n_countries)]).unwrap())
            .collect();
        articles.push(ArticleRecord {
            article_id: format!("C{i}"),
            journal_id: "ZC".to_string(),
            year: 2001,
            doc_type: DocType::Article,
            countries,
        });
        for _ in 0..rng.random_range(1..=2u32) {
            citations.push(CitationRecord {
                citing_article_id: format!("C{i}"),
                cited_journal_id: format!("J{}", rng.random_range(0..n_journals)),
                cited_pub_year: 2000,
            });
        }
    }
    let mut journals: Vec<JournalRecord> = (0..n_journals)
        .map(|j| JournalRecord {
            journal_id: format!("J{j}"),
            languages: Language::EnglishOnly,
            open_access: false,
            field_ids: ["F1".to_string()].into(),
            discipline: Discipline::Other,
        })
        .collect();
    journals.push(JournalRecord {
        journal_id: "ZC".to_string(),
        languages: Language::EnglishOnly,
        open_access: false,
        field_ids: ["FZ".to_string()].into(),
        discipline: Discipline::Other,
    });
    Corpus::from_records(articles, journals, citations).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn c02_indicator_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_02);
    for _ in 0..1000 {
        let corpus = random_corpus(&mut rng);
        for j in 0..3 {
            let journal = format!("J{j}");
            for counting in [Counting::WholeArticle, Counting::Countryship] {
                let got = indicators::ino_p(&corpus, &journal, 2000, counting).ok();
                let want = oracle::ino_p(corpus.articles(), &journal, 2000, counting);
                match (got, want) {
                    (None, None) => {}
                    (Some(g), Some((top, value))) => {
                        assert!(close(g.value, value), "INO-P {} vs {}", g.value, value);
                        assert_eq!(g.top_country.as_str(), top);
                    }
                    (g, w) => panic!("defined-ness mismatch: {g:?} vs {w:?}"),
                }

                let got = indicators::ino_c(&corpus, &journal, 2001, counting).ok();
                let want =
                    oracle::ino_c(corpus.articles(), corpus.citations(), &journal, 2001, counting);
                match (got, want) {
                    (None, None) => {}
                    (Some(g), Some((top, value))) => {
                        assert!(close(g.value, value), "INO-C {} vs {}", g.value, value);
                        assert_eq!(g.top_country.as_str(), top);
                    }
                    (g, w) => panic!("defined-ness mismatch: {g:?} vs {w:?}"),
                }
            }
            for code in ["AA", "BB", "CC", "DD", "EE", "FF"] {
                let country = CountryCode::new(code).unwrap();
                let got =
                    indicators::activity_index(&corpus, country, &journal, 2000, AiScope::WholeDatabase)
                        .ok();
                let want = oracle::activity_index(corpus.articles(), code, &journal, 2000);
                match (got, want) {
                    (None, None) => {}
                    (Some(g), Some(w)) => assert!(close(g, w), "AI {g} vs {w}"),
                    (g, w) => panic!("AI defined-ness mismatch: {g:?} vs {w:?}"),
                }
            }
        }
    }
    pass("02 indicator oracle equivalence (1000 corpora)");
}

#[test]
fn c03_nino_convexity_and_single_country() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_03);
    let mut checked = 0u32;
    for _ in 0..1000 {
        let corpus = random_corpus(&mut rng);
        let pairs: Vec<(f64, f64)> = (0..20)
            .map(|_| (rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0))
            .collect();
        for j in 0..3 {
            let journal = format!("J{j}");
            let Ok(dist) = indicators::country_distribution(&corpus, &journal, 2000) else {
                continue;
            };
            for counting in [Counting::WholeArticle, Counting::Countryship] {
                let shares: Vec<f64> = dist.shares(counting).map(|(_, s)| s).collect();
                let lo = shares.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = shares.iter().cloned().fold(0.0f64, f64::max);
                for &(k, m) in &pairs {
                    let params = NinoParams {
                        k,
                        m,
                        counting,
                        ai_scope: AiScope::WholeDatabase,
                    };
                    let value = indicators::nino(&corpus, &journal, 2000, &params).unwrap();
                    assert!(
                        value >= lo - 1e-9 && value <= hi + 1e-9,
                        "NINO {value} outside [{lo}, {hi}] at k={k}, m={m}"
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 10_000, "too few convexity checks ran: {checked}");

    // Single-country journals: every variant is exactly 100.
    let articles = vec![
        ArticleRecord {
            article_id: "A1".into(),
            journal_id: "J1".into(),
            year: 2000,
            doc_type: DocType::Article,
            countries: vec![CountryCode::new("XX").unwrap(); 3],
        },
        ArticleRecord {
            article_id: "A2".into(),
            journal_id: "J1".into(),
            year: 2000,
            doc_type: DocType::Article,
            countries: vec![CountryCode::new("XX").unwrap()],
        },
    ];
    let journals = vec![JournalRecord {
        journal_id: "J1".into(),
        languages: Language::EnglishOnly,
        open_access: false,
        field_ids: ["F1".to_string()].into(),
        discipline: Discipline::Other,
    }];
    let corpus = Corpus::from_records(articles, journals, vec![]).unwrap();
    let rows = indicators::indicator_table(&corpus, ["J1"], 2000, Counting::WholeArticle);
    assert_eq!(rows[0].variants(), [Some(100.0); 6]);
    pass("03 NINO convexity and single-country identity");
}

// --- criterion 4: RJIF normalization --------------------------------------

#[test]
fn c04_rjif_field_normalization() {
    let group = |name: &str, field: &str, journals: u32| natorient::synthgen::GroupConfig {
        name: name.to_string(),
        journals,
        top_country: CountryCode::new("RU").unwrap(),
        filler_countries: vec![],
        initial_top_share: 0.8,
        top_share_drift: 0.0,
        top_share_noise: 0.0,
        articles_per_year: 15,
        articles_growth: 0.0,
        extra_country_rate: 0.0,
        citations_per_item: 0.4,
        citations_growth: 0.0,
        citation_jitter: 0.9,
        citing_top_share: 0.5,
        fields: vec![field.to_string()],
        rotate_fields: false,
        discipline: Discipline::NaturalSci,
        language: Language::EnglishOnly,
        open_access: false,
        entry_from: None,
        entry_to: None,
        dynamics: natorient::synthgen::Dynamics::Drift,
        walk_classes: 10,
        walk_start_class: None,
    };
    let config = natorient::synthgen::ScenarioConfig {
        seed: 404,
        first_year: 2000,
        last_year: 2006,
        groups: vec![
            group("fa", "FA", 5),
            group("fb", "FB", 4),
            group("fc", "FC", 3),
        ],
    };
    let dir = tempfile::tempdir().unwrap();
    let out = natorient::synthgen::generate(&config, dir.path()).unwrap();
    let corpus =
        natorient::load_corpus(&out.articles_path, &out.journals_path, &out.citations_path).unwrap();
    for year in 2004..=2006 {
        for field in ["FA", "FB", "FC"] {
            let mut rjifs = Vec::new();
            for journal in corpus.journals() {
                if journal.field_ids.contains(field) {
                    let v = natorient::impact::rjif(&corpus, &journal.journal_id, year).unwrap();
                    rjifs.push(v.rjif.unwrap());
                }
            }
            assert!(!rjifs.is_empty());
            let mean = rjifs.iter().sum::<f64>() / rjifs.len() as f64;
            assert!(
                (mean - 1.0).abs() <= 1e-9,
                "field {field} year {year}: mean RJIF = {mean}"
            );
        }
    }
    pass("04 RJIF normalizes to a unit field mean");
}

// --- criterion 5: significance calibration --------------------------------

#[test]
fn c05_significance_calibration() {
    // Calibration under the null: i.i.d. series, lengths 10-23.
    let mut rng = ChaCha8Rng::seed_from_u64(20_05);
    let runs = 10_000;
    let mut significant = 0u32;
    let mut increases = 0u32;
    let mut declines = 0u32;
    for _ in 0..runs {
        let len = rng.random_range(10..=23usize);
        let series: Vec<(Year, f64)> = (0..len)
            .map(|i| (2000 + i as Year, rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let fit = trends::fit_trend(&series, 0.01).unwrap();
        if fit.p_value < 0.01 {
            significant += 1;
        }
        match fit.verdict {
            trends::Verdict::SigIncrease => increases += 1,
            trends::Verdict::SigDecline => declines += 1,
            trends::Verdict::NotSignificant => {}
        }
    }
    let fraction = significant as f64 / runs as f64;
    assert!(
        (0.006..=0.014).contains(&fraction),
        "null rejection rate {fraction}"
    );
    // Symmetry: each direction picks up about half of the false positives.
    for (label, n) in [("increase", increases), ("decline", declines)] {
        let share = n as f64 / runs as f64;
        assert!(
            (0.002..=0.009).contains(&share),
            "null {label} share {share}"
        );
    }

    // Slope and p-value against the independent OLS + t-test oracle.
    for _ in 0..100 {
        let len = rng.random_range(4..=30usize);
        let series: Vec<(Year, f64)> = (0..len)
            .map(|i| {
                let trend = rng.random::<f64>() * 0.4 - 0.2;
                let value = trend * i as f64 + 10.0 * rng.random::<f64>();
                (1990 + i as Year, value)
            })
            .collect();
        let fit = trends::fit_trend(&series, 0.01).unwrap();
        let (slope, p) = oracle::ols_slope_p(&series);
        assert!(
            (fit.slope - slope).abs() <= 1e-9 * slope.abs().max(1.0),
            "slope {} vs oracle {slope}",
            fit.slope
        );
        assert!(
            (fit.p_value - p).abs() <= 1e-9,
            "p {} vs oracle {p}",
            fit.p_value
        );
    }
    pass("05 significance calibration and OLS oracle match");
}

// --- criterion 6: Pearson matrix ------------------------------------------

#[test]
fn c06_pearson_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_06);
    for _ in 0..50 {
        let n = rng.random_range(5..=60usize);
        let table: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..6).map(|_| rng.random::<f64>() * 200.0 - 100.0).collect())
            .collect();
        let rows: Vec<Vec<Option<f64>>> = table
            .iter()
            .map(|r| r.iter().map(|&v| Some(v)).collect())
            .collect();
        let m = trends::pearson_matrix(&rows).unwrap();
        for i in 0..6 {
            assert_eq!(m.matrix[i][i], 1.0);
            for j in 0..6 {
                assert!((-1.0..=1.0).contains(&m.matrix[i][j]));
                assert_eq!(m.matrix[i][j], m.matrix[j][i]);
                if i != j {
                    let xs: Vec<f64> = table.iter().map(|r| r[i]).collect();
                    let ys: Vec<f64> = table.iter().map(|r| r[j]).collect();
                    let want = oracle::pearson(&xs, &ys);
                    assert!(
                        (m.matrix[i][j] - want).abs() <= 1e-9,
                        "r[{i}][{j}] {} vs {want}",
                        m.matrix[i][j]
                    );
                }
            }
        }
    }
    // A column against its own affine positive transform correlates to 1.
    let rows: Vec<Vec<Option<f64>>> = (0..25)
        .map(|i| {
            let x = i as f64 * 1.7 - 3.0;
            vec![Some(x), Some(2.5 * x + 11.0)]
        })
        .collect();
    let m = trends::pearson_matrix(&rows).unwrap();
    assert!((m.matrix[0][1] - 1.0).abs() <= 1e-9);
    pass("06 Pearson matrix properties and oracle match");
}

// --- criterion 7: end-to-end regression toward the mean -------------------

#[test]
fn c07_walk_scenario_matches_exact_distribution() {
    let steps = 17u32;
    let config = natorient::synthgen::ScenarioConfig {
        seed: 777,
        first_year: 2002,
        last_year: 2002 + steps as Year,
        groups: vec![natorient::synthgen::GroupConfig {
            name: "walk".to_string(),
            journals: 10_000,
            top_country: CountryCode::new("RU").unwrap(),
            filler_countries: vec![],
            initial_top_share: 1.0,
            top_share_drift: 0.0,
            top_share_noise: 0.0,
            articles_per_year: 10,
            articles_growth: 0.0,
            extra_country_rate: 0.0,
            citations_per_item: 0.0,
            citations_growth: 0.0,
            citation_jitter: 0.0,
            citing_top_share: 0.5,
            fields: vec!["F1".to_string()],
            rotate_fields: false,
            discipline: Discipline::Other,
            language: Language::NonEnglish,
            open_access: false,
            entry_from: None,
            entry_to: None,
            dynamics: natorient::synthgen::Dynamics::Walk,
            walk_classes: 10,
            walk_start_class: None,
        }],
    };
    let dir = tempfile::tempdir().unwrap();
    let out = natorient::synthgen::generate(&config, dir.path()).unwrap();
    let corpus =
        natorient::load_corpus(&out.articles_path, &out.journals_path, &out.citations_path).unwrap();
    assert_eq!(out.n_journals, 10_000);
    let cohort: Vec<&str> = corpus.journals_with_articles().collect();
    let empirical =
        nullmodel::empirical_net_decline(&corpus, cohort, 10, 2002 + steps as Year, 10).unwrap();
    assert_eq!(empirical.n, 10_000);
    let model = nullmodel::walk_distribution(&WalkConfig::from_top(steps).unwrap());
    let report = nullmodel::compare_distributions(&model, &empirical);
    assert!(
        report.tv_distance < 0.03,
        "TV distance {} exceeds 0.03",
        report.tv_distance
    );
    pass("07 end-to-end walk scenario within TV 0.03");
}

// --- criterion 8: cohort selection rules -----------------------------------

#[test]
fn c08_cohort_rules_fixture() {
    fn journal(id: &str) -> JournalRecord {
        JournalRecord {
            journal_id: id.to_string(),
            languages: Language::EnglishOnly,
            open_access: false,
            field_ids: ["F1".to_string()].into(),
            discipline: Discipline::Other,
        }
    }
    fn publish(
        articles: &mut Vec<ArticleRecord>,
        id: &str,
        from: Year,
        to: Year,
        per_year: u32,
        gap: Option<Year>,
        unaffiliated_per_year: u32,
    ) {
        for year in from..=to {
            if gap == Some(year) {
                continue;
            }
            for i in 0..per_year {
                let countries = if i < unaffiliated_per_year {
                    vec![]
                } else {
                    vec![CountryCode::new("RU").unwrap()]
                };
                articles.push(ArticleRecord {
                    article_id: format!("{id}-{year}-{i}"),
                    journal_id: id.to_string(),
                    year,
                    doc_type: DocType::Article,
                    countries,
                });
            }
        }
    }

    let mut articles = Vec::new();
    // Included.
    publish(&mut articles, "IN_BASE", 2000, 2019, 12, None, 0);
    publish(&mut articles, "IN_EDGE_FROM", 1997, 2019, 12, None, 0);
    publish(&mut articles, "IN_EDGE_TO", 2010, 2019, 12, None, 0);
    publish(&mut articles, "IN_AVG_EXACT", 2000, 2019, 10, None, 0);
    publish(&mut articles, "IN_UNAFF_EXACT", 2000, 2019, 12, None, 6);
    // Excluded, one clause each.
    publish(&mut articles, "OUT_GAP", 2000, 2019, 12, Some(2005), 0);
    publish(&mut articles, "OUT_LOW_AVG", 2000, 2019, 9, None, 0);
    publish(&mut articles, "OUT_UNAFF", 2000, 2019, 10, None, 6);
    publish(&mut articles, "OUT_LATE_ENTRY", 2011, 2019, 12, None, 0);
    publish(&mut articles, "OUT_EARLY_ENTRY", 1996, 2019, 12, None, 0);
    publish(&mut articles, "OUT_STOPS_EARLY", 2000, 2015, 12, None, 0);
    // OUT_NO_ARTICLES exists only as journal metadata.
    let ids = [
        "IN_BASE",
        "IN_EDGE_FROM",
        "IN_EDGE_TO",
        "IN_AVG_EXACT",
        "IN_UNAFF_EXACT",
        "OUT_GAP",
        "OUT_LOW_AVG",
        "OUT_UNAFF",
        "OUT_LATE_ENTRY",
        "OUT_EARLY_ENTRY",
        "OUT_STOPS_EARLY",
        "OUT_NO_ARTICLES",
    ];
    assert_eq!(ids.len(), 12);
    let journals = ids.iter().map(|id| journal(id)).collect();
    let corpus = Corpus::from_records(articles, journals, vec![]).unwrap();
    let cohort = natorient::select_cohort(&corpus, &CohortSpec::defaults()).unwrap();
    let expected: BTreeSet<String> = [
        "IN_BASE",
        "IN_EDGE_FROM",
        "IN_EDGE_TO",
        "IN_AVG_EXACT",
        "IN_UNAFF_EXACT",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(cohort, expected);
    pass("08 cohort selection fixture partitions exactly");
}

// --- criteria 9 and 10: CLI determinism and report shape -------------------

fn natorient_bin() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_natorient"))
}

fn run_ok(args: &[String]) -> String {
    let out = natorient_bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// All files in a directory except the run manifest, keyed by name.
fn data_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name == "manifest.json" {
            continue;
        }
        files.insert(name, std::fs::read(entry.path()).unwrap());
    }
    files
}

const DETERMINISM_SCENARIO: &str = r#"
seed = 1234
first_year = 2000
last_year = 2012

[[group]]
name = "nat"
journals = 15
top_country = "RU"
initial_top_share = 0.9
top_share_noise = 0.03
articles_per_year = 14
extra_country_rate = 0.15
citations_per_item = 0.3
citations_growth = 0.02
citation_jitter = 0.4
citing_top_share = 0.7
fields = ["FA", "FB"]
rotate_fields = true
discipline = "natural_sci"
language = "non_english"
entry_from = 2000
entry_to = 2004

[[group]]
name = "intl"
journals = 15
top_country = "US"
initial_top_share = 0.55
top_share_noise = 0.03
articles_per_year = 18
extra_country_rate = 0.3
citations_per_item = 0.6
citation_jitter = 0.4
citing_top_share = 0.3
fields = ["FB"]
discipline = "clinical_med"
language = "english_only"
open_access = true
"#;

fn corpus_flags(dir: &Path) -> Vec<String> {
    vec![
        "--articles".into(),
        dir.join("articles.csv").display().to_string(),
        "--journals".into(),
        dir.join("journals.csv").display().to_string(),
        "--citations".into(),
        dir.join("citations.csv").display().to_string(),
    ]
}

#[test]
fn c09_pipeline_determinism_across_threads() {
    let base = tempfile::tempdir().unwrap();
    let scenario_path = base.path().join("scenario.toml");
    std::fs::write(&scenario_path, DETERMINISM_SCENARIO).unwrap();

    // Generating twice yields byte-identical corpora.
    let corpus_a = base.path().join("corpus_a");
    let corpus_b = base.path().join("corpus_b");
    for dir in [&corpus_a, &corpus_b] {
        run_ok(&[
            "generate".into(),
            "--scenario".into(),
            scenario_path.display().to_string(),
            "--out-dir".into(),
            dir.display().to_string(),
        ]);
    }
    assert_eq!(data_files(&corpus_a), data_files(&corpus_b));

    let cohort_flags = |v: &mut Vec<String>| {
        v.extend([
            "--entry-from".into(),
            "1997".into(),
            "--entry-to".into(),
            "2005".into(),
            "--end-year".into(),
            "2012".into(),
        ]);
    };
    let subcommands: Vec<(&str, Vec<String>)> = vec![
        ("indicators", {
            let mut v = vec!["indicators".to_string()];
            v.extend(corpus_flags(&corpus_a));
            v.extend(["--year".into(), "2012".into()]);
            v
        }),
        ("impact", {
            let mut v = vec!["impact".to_string()];
            v.extend(corpus_flags(&corpus_a));
            v
        }),
        ("trends", {
            let mut v = vec!["trends".to_string()];
            v.extend(corpus_flags(&corpus_a));
            cohort_flags(&mut v);
            v
        }),
        ("cohort", {
            let mut v = vec!["cohort".to_string()];
            v.extend(corpus_flags(&corpus_a));
            cohort_flags(&mut v);
            v
        }),
        ("walk", {
            let mut v = vec!["walk".to_string(), "--steps".into(), "12".into()];
            v.extend(corpus_flags(&corpus_a));
            cohort_flags(&mut v);
            v.extend(["--min-begin-class".into(), "1".into()]);
            v
        }),
        ("country", {
            let mut v = vec!["country".to_string()];
            v.extend(corpus_flags(&corpus_a));
            v.extend([
                "--countries".into(),
                "RU,US".into(),
                "--target-country".into(),
                "RU".into(),
            ]);
            cohort_flags(&mut v);
            v
        }),
        ("correlate", {
            let mut v = vec!["correlate".to_string()];
            v.extend(corpus_flags(&corpus_a));
            v.extend(["--year".into(), "2012".into()]);
            v
        }),
    ];

    for (name, args) in subcommands {
        let mut reference: Option<BTreeMap<String, Vec<u8>>> = None;
        for threads in ["1", "8"] {
            for round in 0..2 {
                let out_dir = base.path().join(format!("{name}-t{threads}-r{round}"));
                let mut full = args.clone();
                full.extend([
                    "--threads".into(),
                    threads.into(),
                    "--out-dir".into(),
                    out_dir.display().to_string(),
                ]);
                run_ok(&full);
                assert!(out_dir.join("manifest.json").exists(), "{name}: manifest missing");
                let files = data_files(&out_dir);
                assert!(!files.is_empty(), "{name}: no data files");
                match &reference {
                    None => reference = Some(files),
                    Some(expected) => assert_eq!(
                        expected, &files,
                        "{name}: outputs differ at --threads {threads} round {round}"
                    ),
                }
            }
        }
    }
    pass("09 byte-identical outputs across reruns and thread counts");
}

const GROUND_TRUTH_SCENARIO: &str = r#"
seed = 2718
first_year = 2000
last_year = 2012

[[group]]
name = "dec"
journals = 20
top_country = "AA"
initial_top_share = 0.92
top_share_drift = -0.02
top_share_noise = 0.01
articles_per_year = 100
citations_per_item = 0.2
citations_growth = 0.05
fields = ["FA"]
discipline = "natural_sci"
language = "non_english"

[[group]]
name = "flat"
journals = 20
top_country = "AA"
initial_top_share = 0.92
top_share_noise = 0.01
articles_per_year = 100
citations_per_item = 0.2
fields = ["FA"]
discipline = "clinical_med"
language = "english_only"
open_access = true
"#;

fn parse_csv(path: &Path) -> (Vec<String>, Vec<BTreeMap<String, String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            header
                .iter()
                .cloned()
                .zip(r.iter().map(str::to_string))
                .collect()
        })
        .collect();
    (header, rows)
}

#[test]
fn c10_report_shape_and_ground_truth_recovery() {
    let base = tempfile::tempdir().unwrap();
    let scenario_path = base.path().join("scenario.toml");
    std::fs::write(&scenario_path, GROUND_TRUTH_SCENARIO).unwrap();
    let corpus_dir = base.path().join("corpus");
    run_ok(&[
        "generate".into(),
        "--scenario".into(),
        scenario_path.display().to_string(),
        "--out-dir".into(),
        corpus_dir.display().to_string(),
    ]);

    let mut cohort_args = vec!["cohort".to_string()];
    cohort_args.extend(corpus_flags(&corpus_dir));
    cohort_args.extend([
        "--entry-from".into(),
        "1997".into(),
        "--entry-to".into(),
        "2005".into(),
        "--end-year".into(),
        "2012".into(),
        "--out-dir".into(),
        base.path().join("cohort").display().to_string(),
    ]);
    run_ok(&cohort_args);

    let (header, rows) = parse_csv(&base.path().join("cohort").join("cohort_summary.csv"));
    assert_eq!(
        header,
        [
            "indicator",
            "n_journals",
            "n_with_verdict",
            "share_sig_increase",
            "share_sig_decline",
            "median_begin",
            "median_end",
            "ratio_end_begin"
        ]
    );
    let indicators_seen: Vec<&str> = rows.iter().map(|r| r["indicator"].as_str()).collect();
    assert_eq!(indicators_seen, ["publications", "ino_p", "ino_c", "jif", "rjif"]);
    for row in &rows {
        assert_eq!(row["n_journals"], "40");
    }
    let by_indicator: BTreeMap<&str, &BTreeMap<String, String>> =
        rows.iter().map(|r| (r["indicator"].as_str(), r)).collect();
    // Half the cohort declines in INO-P by construction; flat journals may
    // add at most a couple of false positives at alpha = 0.01.
    let ino_decline: i64 = by_indicator["ino_p"]["share_sig_decline"].parse().unwrap();
    assert!((50..=55).contains(&ino_decline), "INO-P decline share {ino_decline}");
    // The rising-citation group alone increases JIF and RJIF.
    let jif_increase: i64 = by_indicator["jif"]["share_sig_increase"].parse().unwrap();
    assert_eq!(jif_increase, 50, "JIF increase share");
    let rjif_increase: i64 = by_indicator["rjif"]["share_sig_increase"].parse().unwrap();
    assert_eq!(rjif_increase, 50, "RJIF increase share");
    // Flat publication counts: nothing significant.
    let publ_increase: i64 = by_indicator["publications"]["share_sig_increase"].parse().unwrap();
    assert!(publ_increase <= 5, "publications increase share {publ_increase}");

    let (header, rows) = parse_csv(&base.path().join("cohort").join("breakdown.csv"));
    assert_eq!(
        header,
        [
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
            "median_ino_c"
        ]
    );
    for grouping in ["discipline", "language", "open_access"] {
        let total: usize = rows
            .iter()
            .filter(|r| r["grouping"] == grouping)
            .map(|r| r["n_journals"].parse::<usize>().unwrap())
            .sum();
        assert_eq!(total, 40, "{grouping} rows must partition the cohort");
    }
    // The declining group is the natural_sci / non_english / closed half.
    let dec_row = rows
        .iter()
        .find(|r| r["grouping"] == "discipline" && r["group"] == "natural_sci")
        .unwrap();
    assert_eq!(dec_row["n_journals"], "20");
    let dec_share: i64 = dec_row["pct_sig_decline_ino_p"].parse().unwrap();
    assert!((95..=100).contains(&dec_share), "decline share {dec_share}");

    // Country report: AA holds every national journal, BB none.
    let mut country_args = vec!["country".to_string()];
    country_args.extend(corpus_flags(&corpus_dir));
    country_args.extend([
        "--countries".into(),
        "AA,BB".into(),
        "--entry-from".into(),
        "1997".into(),
        "--entry-to".into(),
        "2005".into(),
        "--end-year".into(),
        "2012".into(),
        "--out-dir".into(),
        base.path().join("country").display().to_string(),
    ]);
    run_ok(&country_args);
    let (header, rows) = parse_csv(&base.path().join("country").join("country_report.csv"));
    assert_eq!(
        &header[..5],
        [
            "country",
            "has_national_journals",
            "n_national_journals",
            "pct_sig_decline_ino_p",
            "pct_sig_increase_rjif"
        ]
    );
    for ind in ["publications", "ino_p", "ino_c", "jif", "rjif"] {
        assert!(header.contains(&format!("median_begin_{ind}")));
        assert!(header.contains(&format!("median_end_{ind}")));
        assert!(header.contains(&format!("benchmark_begin_{ind}")));
        assert!(header.contains(&format!("benchmark_end_{ind}")));
    }
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["country"], "AA");
    assert_eq!(rows[0]["has_national_journals"], "true");
    assert_eq!(rows[0]["n_national_journals"], "40");
    let aa_decline: i64 = rows[0]["pct_sig_decline_ino_p"].parse().unwrap();
    assert!((50..=55).contains(&aa_decline), "AA decline share {aa_decline}");
    let aa_rjif: i64 = rows[0]["pct_sig_increase_rjif"].parse().unwrap();
    assert_eq!(aa_rjif, 50, "AA RJIF increase share");
    assert_eq!(rows[1]["country"], "BB");
    assert_eq!(rows[1]["has_national_journals"], "false");
    assert_eq!(rows[1]["n_national_journals"], "0");
    assert_eq!(rows[1]["pct_sig_decline_ino_p"], "");
    // Benchmarks equal AA's own medians: AA's set is the whole benchmark.
    for ind in ["publications", "ino_p", "jif"] {
        assert_eq!(
            rows[0][&format!("median_begin_{ind}")],
            rows[0][&format!("benchmark_begin_{ind}")]
        );
    }
    pass("10 report shapes and configured shares recovered");
}

// --- independent oracles ----------------------------------------------------

mod oracle {
    use std::collections::{BTreeMap, BTreeSet};

    use natorient::corpus::{ArticleRecord, CitationRecord, Year};
    use natorient::indicators::Counting;

    /// Counts per country over one journal-year, scanning raw records.
    fn country_counts(
        articles: &[ArticleRecord],
        journal_id: &str,
        year: Year,
        counting: Counting,
    ) -> (BTreeMap<String, u64>, u64) {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut denominator = 0u64;
        for a in articles {
            if a.journal_id != journal_id
                || a.year != year
                || !a.doc_type.is_citable()
                || a.countries.is_empty()
            {
                continue;
            }
            match counting {
                Counting::WholeArticle => {
                    denominator += 1;
                    let distinct: BTreeSet<&str> =
                        a.countries.iter().map(|c| c.as_str()).collect();
                    for c in distinct {
                        *counts.entry(c.to_string()).or_insert(0) += 1;
                    }
                }
                Counting::Countryship => {
                    denominator += a.countries.len() as u64;
                    for c in &a.countries {
                        *counts.entry(c.as_str().to_string()).or_insert(0) += 1;
                    }
                }
            }
        }
        (counts, denominator)
    }

    fn top_share(counts: &BTreeMap<String, u64>, denominator: u64) -> Option<(String, f64)> {
        if denominator == 0 {
            return None;
        }
        let mut best: Option<(&str, u64)> = None;
        for (c, &n) in counts {
            if best.map(|(_, b)| n > b).unwrap_or(true) {
                best = Some((c, n));
            }
        }
        best.map(|(c, n)| (c.to_string(), 100.0 * n as f64 / denominator as f64))
    }

    pub fn ino_p(
        articles: &[ArticleRecord],
        journal_id: &str,
        year: Year,
        counting: Counting,
    ) -> Option<(String, f64)> {
        let (counts, denominator) = country_counts(articles, journal_id, year, counting);
        top_share(&counts, denominator)
    }

    pub fn ino_c(
        articles: &[ArticleRecord],
        citations: &[CitationRecord],
        journal_id: &str,
        citing_year: Year,
        counting: Counting,
    ) -> Option<(String, f64)> {
        let by_id: BTreeMap<&str, &ArticleRecord> = articles
            .iter()
            .map(|a| (a.article_id.as_str(), a))
            .collect();
        let citing_ids: BTreeSet<&str> = citations
            .iter()
            .filter(|c| c.cited_journal_id == journal_id)
            .map(|c| c.citing_article_id.as_str())
            .filter(|id| by_id[id].year == citing_year)
            .collect();
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut denominator = 0u64;
        for id in citing_ids {
            let a = by_id[id];
            if a.countries.is_empty() {
                continue;
            }
            match counting {
                Counting::WholeArticle => {
                    denominator += 1;
                    let distinct: BTreeSet<&str> =
                        a.countries.iter().map(|c| c.as_str()).collect();
                    for c in distinct {
                        *counts.entry(c.to_string()).or_insert(0) += 1;
                    }
                }
                Counting::Countryship => {
                    denominator += a.countries.len() as u64;
                    for c in &a.countries {
                        *counts.entry(c.as_str().to_string()).or_insert(0) += 1;
                    }
                }
            }
        }
        top_share(&counts, denominator)
    }

    /// Whole-database Activity Index from raw scans; `None` where the
    /// library reports an error (no affiliated articles, country absent
    /// from the database year).
    pub fn activity_index(
        articles: &[ArticleRecord],
        country: &str,
        journal_id: &str,
        year: Year,
    ) -> Option<f64> {
        let (journal_counts, journal_total) =
            country_counts(articles, journal_id, year, Counting::WholeArticle);
        if journal_total == 0 {
            return None;
        }
        let mut db_count = 0u64;
        let mut db_total = 0u64;
        for a in articles {
            if a.year != year || !a.doc_type.is_citable() || a.countries.is_empty() {
                continue;
            }
            db_total += 1;
            if a.countries.iter().any(|c| c.as_str() == country) {
                db_count += 1;
            }
        }
        if db_count == 0 {
            return None;
        }
        let journal_share =
            journal_counts.get(country).copied().unwrap_or(0) as f64 / journal_total as f64;
        let db_share = db_count as f64 / db_total as f64;
        Some(journal_share / db_share)
    }

    /// Exhaustive enumeration of bordered-walk paths by net decline.
    pub fn enumerate_walk(num_classes: u32, start: u32, steps: u32) -> BTreeMap<i64, u64> {
        fn rec(num_classes: u32, start: u32, class: u32, left: u32, out: &mut BTreeMap<i64, u64>) {
            if left == 0 {
                *out.entry(start as i64 - class as i64).or_insert(0) += 1;
                return;
            }
            let lo = if class > 1 { class - 1 } else { class };
            let hi = if class < num_classes { class + 1 } else { class };
            for next in lo..=hi {
                rec(num_classes, start, next, left - 1, out);
            }
        }
        let mut out = BTreeMap::new();
        rec(num_classes, start, start, steps, &mut out);
        out
    }

    /// OLS slope via raw moments and a two-sided slope t-test whose
    /// p-value comes from this module's own incomplete-beta evaluation.
    pub fn ols_slope_p(series: &[(Year, f64)]) -> (f64, f64) {
        let n = series.len() as f64;
        let sx: f64 = series.iter().map(|&(x, _)| x as f64).sum();
        let sy: f64 = series.iter().map(|&(_, y)| y).sum();
        let sxx: f64 = series.iter().map(|&(x, _)| (x as f64) * (x as f64)).sum();
        let syy: f64 = series.iter().map(|&(_, y)| y * y).sum();
        let sxy: f64 = series.iter().map(|&(x, y)| (x as f64) * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        // t from the correlation coefficient.
        let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
        let df = n - 2.0;
        let t2 = r * r * df / (1.0 - r * r);
        let p = incomplete_beta(df / 2.0, 0.5, df / (df + t2));
        (slope, p.clamp(0.0, 1.0))
    }

    pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let syy: f64 = ys.iter().map(|y| y * y).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
    }

    fn ln_gamma(x: f64) -> f64 {
        // Lanczos approximation, g = 5, n = 6.
        const COEFFS: [f64; 6] = [
            76.180_091_729_471_46,
            -86.505_320_329_416_77,
            24.014_098_240_830_91,
            -1.231_739_572_450_155,
            0.120_865_097_386_617_7e-2,
            -0.539_523_938_495_3e-5,
        ];
        let mut y = x;
        let tmp = x + 5.5;
        let tmp = tmp - (x + 0.5) * tmp.ln();
        let mut ser = 1.000_000_000_190_015;
        for c in COEFFS {
            y += 1.0;
            ser += c / y;
        }
        -tmp + (2.506_628_274_631_000_5 * ser / x).ln()
    }

    /// Regularized incomplete beta I_x(a, b) via the standard continued
    /// fraction.
    fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let ln_front =
            ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
        let front = ln_front.exp();
        if x < (a + 1.0) / (a + b + 2.0) {
            front * beta_cf(a, b, x) / a
        } else {
            1.0 - front * beta_cf(b, a, 1.0 - x) / b
        }
    }

    fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
        const MAX_ITER: usize = 300;
        const EPS: f64 = 3e-16;
        const FPMIN: f64 = 1e-300;
        let qab = a + b;
        let qap = a + 1.0;
        let qam = a - 1.0;
        let mut c = 1.0;
        let mut d = 1.0 - qab * x / qap;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        d = 1.0 / d;
        let mut h = d;
        for m in 1..=MAX_ITER {
            let m = m as f64;
            let m2 = 2.0 * m;
            let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
            d = 1.0 + aa * d;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = 1.0 + aa / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            h *= d * c;
            let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = 1.0 + aa / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        h
    }
}
