//! Acceptance criteria, one status line per criterion on stderr.
//!
//! Run with `cargo test -p conrel-core --test acceptance -- --nocapture`.

mod common;

use std::io::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use conrel_core::config::{Prepared, RunConfig};
use conrel_core::filter::{filter_constraints, SignalLexicon, DEFAULT_NEGATORS, DEFAULT_SIGNALS};
use conrel_core::grouping::{
    group_by_keywords, group_by_structure, group_by_term_frequency, reduction_report, KeywordGroup, KeywordGroups,
    Partition, Selection, UNDEFINED,
};
use conrel_core::ingest::load_document;
use conrel_core::normalize::{Stopwords, TokenizedSentence};
use conrel_core::pipeline::run_documents;
use conrel_core::relations::{RelationKind, Scope, Thresholds};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};

enum Outcome {
    Pass(String),
    Fail(String),
    Blocked(String),
    Info(String),
}

fn report(name: &str, outcome: &Outcome) {
    let (tag, detail) = match outcome {
        Outcome::Pass(d) => ("PASS", d),
        Outcome::Fail(d) => ("FAIL", d),
        Outcome::Blocked(d) => ("BLOCKED", d),
        Outcome::Info(d) => ("INFO", d),
    };
    // straight to stderr so the lines survive output capture
    let _ = writeln!(std::io::stderr().lock(), "[{tag}] {name}: {detail}");
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| match e {
        TestError::Fail(why, input) => format!("{why} (input: {input:?})"),
        TestError::Abort(why) => why.to_string(),
    })
}

fn reduction_arithmetic() -> Outcome {
    let (rows, elapsed) = timed(|| {
        let p = Partition::from_sizes(&[
            ("member state", 162),
            ("natural person", 55),
            ("data subject", 152),
            ("personal data", 87),
            ("controller", 72),
            (UNDEFINED, 299),
        ]);
        let sels = [
            Selection::new("citizens", ["natural person", "data subject", "personal data"]),
            Selection::new("controller", ["controller"]),
            Selection::new("natural person", ["natural person"]),
        ];
        reduction_report(&p, &sels, false).map(|r| (r.total, r.rows))
    });
    let (total, rows) = match rows {
        Ok(x) => x,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let got: Vec<(usize, usize, u32, u32)> = rows
        .iter()
        .map(|r| (r.relevant, r.read_with_undefined, r.reduction_excl_pct, r.reduction_incl_pct))
        .collect();
    let ok = total == 827
        && got[0].0 == 294
        && got[0].1 == 593
        && got[0].3 == 28
        && (got[1].2, got[1].3) == (91, 55)
        && (got[2].2, got[2].3) == (93, 57)
        && elapsed < Duration::from_secs(1);
    check(
        ok,
        format!(
            "total {total}; citizens relevant {} read {} incl {}%; controller {}%/{}%; natural person {}%/{}%; {elapsed:?}",
            got[0].0, got[0].1, got[0].3, got[1].2, got[1].3, got[2].2, got[2].3
        ),
    )
}

fn redundant_pair() -> Outcome {
    let (result, elapsed) = timed(|| {
        let text = format!("{DIRECT_MARKETING_A} {DIRECT_MARKETING_B}");
        let doc = load_document("recitals", text.as_bytes(), "recitals", false)?;
        run_documents(&Prepared::default(), &[doc])
    });
    let r = match result {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let detail = format!(
        "{} sentences, {} constraints, relations {:?}, {elapsed:?}",
        r.sentences.len(),
        r.constraints.len(),
        r.relations.iter().map(|x| (x.kind, x.similarity)).collect::<Vec<_>>()
    );
    let ok = r.sentences.len() == 2
        && r.constraints.len() == 2
        && r.relations.len() == 1
        && r.relations[0].kind == RelationKind::Redundant
        && (r.relations[0].similarity - DIRECT_MARKETING_COSINE).abs() <= 1e-9
        && elapsed < Duration::from_secs(1);
    check(ok, detail)
}

fn gdpr_text() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("CONREL_GDPR_TEXT") {
        return Some(PathBuf::from(p));
    }
    let bundled = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/gdpr.txt");
    bundled.exists().then_some(bundled)
}

/// Returns the hard outcome and the informational count outcome.
fn gdpr_scale() -> (Outcome, Outcome) {
    let Some(path) = gdpr_text() else {
        let why = "GDPR plain text not available offline; set CONREL_GDPR_TEXT or add tests/data/gdpr.txt".to_string();
        return (Outcome::Blocked(why.clone()), Outcome::Blocked(why));
    };
    let (result, elapsed) = timed(|| {
        let cfg = RunConfig::bundled("gdpr")?;
        let prepared = cfg.prepare()?;
        let bytes = std::fs::read(&path).map_err(|e| conrel_core::Error::Io {
            path: path.clone(),
            source: e,
        })?;
        let doc = load_document("gdpr", &bytes, "gdpr", false)?;
        run_documents(&prepared, &[doc])
    });
    let r = match result {
        Ok(r) => r,
        Err(e) => return (Outcome::Fail(e.to_string()), Outcome::Fail("run failed".into())),
    };
    let total = r.constraints.len();
    let sum: usize = r.partition.groups().map(|(_, ids)| ids.len()).sum();
    let undefined = r.partition.size(UNDEFINED).unwrap_or(0);
    let sizes: Vec<String> = r.partition.groups().map(|(n, ids)| format!("{n}={}", ids.len())).collect();
    let hard = check(
        elapsed < Duration::from_secs(10) && undefined > 0 && sum == total,
        format!("total {total}, sum {sum}, undefined {undefined}, {elapsed:?}; {}", sizes.join(" ")),
    );
    let lo = (827.0 * 0.85_f64).ceil() as usize;
    let hi = (827.0 * 1.15_f64).floor() as usize;
    let count = check((lo..=hi).contains(&total), format!("{total} constraints, expected {lo}..={hi}"));
    (hard, count)
}

fn oracle_equivalence() -> Outcome {
    let strategy = (corpus_strategy(20), any::<bool>());
    let res = run_cases(200, strategy, |(corpus, cross)| {
        let cs = constraints_of(&corpus);
        let scope = if cross { Scope::CrossDocumentOnly } else { Scope::AllPairs };
        check_against_oracle(&cs, &Thresholds::default(), scope)?;
        check_similarity_matches_naive(&cs)
    });
    match res {
        Ok(()) => Outcome::Pass("200 corpora of <= 20 sentences agree pair-for-pair".into()),
        Err(e) => Outcome::Fail(e),
    }
}

fn property_suites() -> Vec<(&'static str, Result<(), String>)> {
    let keyword_groups = || {
        KeywordGroups::new(&[
            KeywordGroup::new("state", ["member state"]),
            KeywordGroup::new("subject", ["data subject", "consent"]),
            KeywordGroup::new("controller", ["controller", "records"]),
        ])
        .unwrap()
    };
    vec![
        (
            "partition cover, all methods",
            run_cases(128, (corpus_strategy(20), 0..8usize), |(corpus, k)| {
                let cs = constraints_of(&corpus);
                check_partition_cover(&cs, &group_by_keywords(&cs, &keyword_groups()))?;
                check_partition_cover(&cs, &group_by_term_frequency(&cs, k))?;
                check_partition_cover(&cs, &group_by_structure(&cs))
            }),
        ),
        (
            "filter monotone under lexicon growth",
            run_cases(128, (corpus_strategy(20), 1..DEFAULT_SIGNALS.len()), |(corpus, n)| {
                let stop = Stopwords::default();
                let ts: Vec<TokenizedSentence> = corpus
                    .iter()
                    .enumerate()
                    .map(|(i, s)| TokenizedSentence::new(&format!("d:0:{i}"), "d", &s.text, &stop))
                    .collect();
                let lex = |m: usize| {
                    SignalLexicon::new(DEFAULT_SIGNALS[..m].iter().copied(), DEFAULT_NEGATORS.iter().copied(), 3)
                        .unwrap()
                };
                let fewer = filter_constraints(ts.clone(), &lex(n)).len();
                let more = filter_constraints(ts, &lex(n + 1)).len();
                prop_assert!(fewer <= more);
                Ok(())
            }),
        ),
        (
            "similarity symmetry, range, self-similarity",
            run_cases(128, corpus_strategy(20), |corpus| check_similarity_properties(&constraints_of(&corpus))),
        ),
        (
            "relation precedence determinism, threshold monotonicity",
            run_cases(128, (corpus_strategy(14), 0.8f64..=1.0), |(corpus, raised)| {
                check_classification_properties(&constraints_of(&corpus), raised)
            }),
        ),
        (
            "scope soundness",
            run_cases(128, corpus_strategy(20), |corpus| check_scope_soundness(&constraints_of(&corpus))),
        ),
        (
            "reduction monotonicity",
            run_cases(128, prop::collection::vec(0..400usize, 2..7), |sizes| {
                let mut named: Vec<(String, usize)> =
                    sizes.iter().enumerate().map(|(i, n)| (format!("g{i}"), *n)).collect();
                named.push((UNDEFINED.to_string(), sizes[0]));
                let p = Partition::from_sizes(&named);
                if p.total() == 0 {
                    return Ok(());
                }
                let row = |n: usize| {
                    let sel = Selection::new("s", (0..n).map(|i| format!("g{i}")));
                    reduction_report(&p, &[sel], false).unwrap().rows.remove(0)
                };
                for n in 1..sizes.len() {
                    let (a, b) = (row(n), row(n + 1));
                    prop_assert!(b.reduction_excl_pct <= a.reduction_excl_pct);
                    prop_assert!(b.reduction_incl_pct <= a.reduction_incl_pct);
                    prop_assert!(a.reduction_incl_pct <= a.reduction_excl_pct);
                }
                Ok(())
            }),
        ),
        (
            "end-to-end byte determinism",
            run_cases(64, corpus_strategy(20), |corpus| {
                let prepared = Prepared::default();
                let dirs = [tempfile_dir(), tempfile_dir()];
                for d in &dirs {
                    run_corpus(&corpus, &prepared).write_artifacts(d.path()).unwrap();
                }
                for name in conrel_core::pipeline::artifact_names() {
                    let a = std::fs::read(dirs[0].path().join(name)).unwrap();
                    let b = std::fs::read(dirs[1].path().join(name)).unwrap();
                    prop_assert!(a == b, "{} differs", name);
                }
                Ok(())
            }),
        ),
    ]
}

fn tempfile_dir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

fn export_integrity() -> Outcome {
    let res = run_cases(128, corpus_strategy(20), |corpus| {
        check_export_integrity(&run_corpus(&corpus, &Prepared::default()))
    });
    match res {
        Ok(()) => Outcome::Pass("node/edge counts, color mapping and JSON round trip hold on 128 runs".into()),
        Err(e) => Outcome::Fail(e),
    }
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    let mut record = |name: &str, outcome: Outcome| {
        report(name, &outcome);
        if let Outcome::Fail(_) = outcome {
            failed.push(name.to_string());
        }
    };

    record("reduction arithmetic", reduction_arithmetic());
    record("redundant-pair fixture", redundant_pair());
    let (hard, count) = gdpr_scale();
    record("GDPR-scale run (time, undefined, sum = total)", hard);
    match count {
        // the count tolerance is informational, it never fails the suite
        Outcome::Fail(d) => report("GDPR-scale constraint count (informational)", &Outcome::Info(format!("outside band: {d}"))),
        other => report("GDPR-scale constraint count (informational)", &other),
    }
    record("oracle equivalence", oracle_equivalence());
    for (name, res) in property_suites() {
        let outcome = match res {
            Ok(()) => Outcome::Pass("ok".into()),
            Err(e) => Outcome::Fail(e),
        };
        record(&format!("property: {name}"), outcome);
    }
    record("export integrity", export_integrity());

    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
