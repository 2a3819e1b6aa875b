//! Shared generators, the brute-force relation oracle and property checks
//! used by both the property suite and the acceptance suite.
#![allow(dead_code)]

use std::collections::HashSet;

use conrel_core::config::Prepared;
use conrel_core::filter::{filter_constraints, ConstraintSentence, SignalLexicon};
use conrel_core::graph::ConstraintGraph;
use conrel_core::grouping::{Partition, UNDEFINED};
use conrel_core::ingest::load_document;
use conrel_core::normalize::{Stopwords, TokenizedSentence};
use conrel_core::pipeline::{run_documents, RunResult};
use conrel_core::relations::{Relation, RelationKind, Scope, Thresholds};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const DIRECT_MARKETING_A: &str = "Where personal data are processed for the purposes of direct marketing, the data subject should have the right to object to such processing, including profiling to the extent that it is related to such direct marketing, whether with regard to initial or further processing, at any time and free of charge.";
pub const DIRECT_MARKETING_B: &str = "Where personal data are processed for direct marketing purposes, the data subject shall have the right to object at any time to processing of personal data concerning him or her for such marketing, which includes profiling to the extent that it is related to such direct marketing.";

/// Cosine of the two sentences above in a two-sentence corpus, computed by an
/// independent script (`data/cosine_oracle.py`: regex tokenizer, NLTK Porter,
/// dense TF-IDF).
pub const DIRECT_MARKETING_COSINE: f64 = 0.8265525706978776;

const SUBJECTS: &[&str] = &["controller", "processor", "member state", "data subject", "authority"];
const WORDS: &[&str] = &[
    "records", "consent", "data", "notify", "breach", "erase", "transfer", "keep", "inform",
    "delay", "appoint", "officer",
];
const SIGNALS: &[&str] = &["shall", "must", "may", "should"];

/// One synthetic constraint-like sentence.
#[derive(Debug, Clone)]
pub struct SynthSentence {
    pub doc: usize,
    pub text: String,
}

fn sentence_strategy() -> impl Strategy<Value = SynthSentence> {
    (
        0..2usize,
        0..SUBJECTS.len(),
        0..SIGNALS.len(),
        any::<bool>(),
        prop::collection::vec(0..WORDS.len(), 0..6),
    )
        .prop_map(|(doc, subj, sig, neg, words)| {
            let mut text = format!("The {} {}", SUBJECTS[subj], SIGNALS[sig]);
            if neg {
                text.push_str(" not");
            }
            for w in words {
                text.push(' ');
                text.push_str(WORDS[w]);
            }
            text.push('.');
            SynthSentence { doc, text }
        })
}

/// Corpora of 1..=max sentences where later sentences often copy, negate or
/// extend earlier ones, so every relation kind shows up regularly.
pub fn corpus_strategy(max: usize) -> impl Strategy<Value = Vec<SynthSentence>> {
    (
        prop::collection::vec(sentence_strategy(), 1..=max),
        prop::collection::vec((0..4u8, any::<prop::sample::Index>(), 0..WORDS.len()), 0..=max),
    )
        .prop_map(move |(mut base, edits)| {
            for (op, idx, w) in edits {
                if base.len() >= max {
                    break;
                }
                let src = base[idx.index(base.len())].clone();
                let text = match op {
                    0 => src.text.clone(),
                    1 if !src.text.contains(" not") => src.text.replacen(" shall", " shall not", 1)
                        .replacen(" must", " must not", 1),
                    2 => format!("{} {}.", src.text.trim_end_matches('.'), WORDS[w]),
                    _ => format!("{} and {} {}.", src.text.trim_end_matches('.'), WORDS[w], WORDS[(w + 3) % WORDS.len()]),
                };
                base.push(SynthSentence {
                    doc: 1 - src.doc,
                    text,
                });
            }
            base
        })
}

pub fn constraints_of(corpus: &[SynthSentence]) -> Vec<ConstraintSentence> {
    let stop = Stopwords::default();
    let ts = corpus.iter().enumerate().map(|(i, s)| {
        let doc = format!("doc{}", s.doc);
        TokenizedSentence::new(&format!("{doc}:0:{i:02}"), &doc, &s.text, &stop)
    });
    filter_constraints(ts, &SignalLexicon::default())
}

/// Runs the full pipeline over the corpus as one or two documents.
pub fn run_corpus(corpus: &[SynthSentence], prepared: &Prepared) -> RunResult {
    let docs: Vec<_> = (0..2)
        .filter_map(|d| {
            let text: Vec<&str> = corpus.iter().filter(|s| s.doc == d).map(|s| s.text.as_str()).collect();
            if text.is_empty() {
                return None;
            }
            let id = format!("doc{d}");
            Some(load_document(&id, text.join("\n").as_bytes(), &id, false).unwrap())
        })
        .collect();
    run_documents(prepared, &docs).expect("pipeline run")
}

// ---------------------------------------------------------------------------
// Brute-force oracle: dense vectors, direct double loop, no shared code with
// the relation miner beyond the sentences' term lists.

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRelation {
    pub kind: &'static str,
    pub a: String,
    pub b: String,
    pub similarity: f64,
    pub direction: Option<&'static str>,
}

pub fn oracle_vectors(cs: &[ConstraintSentence]) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut vocab: Vec<String> = cs.iter().flat_map(|c| c.terms().iter().cloned()).collect();
    vocab.sort();
    vocab.dedup();
    let n = cs.len() as f64;
    let vectors = cs
        .iter()
        .map(|c| {
            vocab
                .iter()
                .map(|term| {
                    let tf = c.terms().iter().filter(|t| *t == term).count() as f64;
                    let df = cs.iter().filter(|o| o.terms().contains(term)).count() as f64;
                    tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
                })
                .collect()
        })
        .collect();
    (vocab, vectors)
}

pub fn naive_cosine(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for i in 0..u.len() {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu.sqrt() * nv.sqrt())
    }
}

fn unique_terms(c: &ConstraintSentence) -> Vec<&String> {
    let mut t: Vec<&String> = c.terms().iter().collect();
    t.sort();
    t.dedup();
    t
}

pub fn brute_force_relations(cs: &[ConstraintSentence], th: &Thresholds, cross_only: bool) -> Vec<OracleRelation> {
    let (_, vectors) = oracle_vectors(cs);
    let mut out = Vec::new();
    for i in 0..cs.len() {
        for j in 0..cs.len() {
            if i >= j || (cross_only && cs[i].doc_id() == cs[j].doc_id()) {
                continue;
            }
            let sim = naive_cosine(&vectors[i], &vectors[j]);
            let (x, y) = (&cs[i], &cs[j]);
            let mut direction = None;
            let kind = if sim >= th.theta_conflict && x.polarity != y.polarity {
                "conflicting"
            } else if sim >= th.theta_redundant {
                "redundant"
            } else if sim >= th.theta_subsumed {
                let (tx, ty) = (unique_terms(x), unique_terms(y));
                let x_small = (tx.len(), x.terms().len(), x.sentence_id()) <= (ty.len(), y.terms().len(), y.sentence_id());
                let (small, large) = if x_small { (&tx, &ty) } else { (&ty, &tx) };
                let shared = small.iter().filter(|t| large.contains(t)).count();
                if small.is_empty() || (shared as f64 / small.len() as f64) < th.containment_min {
                    continue;
                }
                // direction in terms of (x, y), flipped below if y sorts first
                direction = Some(x_small);
                "subsumed"
            } else {
                continue;
            };
            let (a, b, x_is_a) = if x.sentence_id() <= y.sentence_id() {
                (x.sentence_id(), y.sentence_id(), true)
            } else {
                (y.sentence_id(), x.sentence_id(), false)
            };
            let direction = direction.map(|x_small| {
                if x_small == x_is_a {
                    "a_subsumed_by_b"
                } else {
                    "b_subsumed_by_a"
                }
            });
            out.push(OracleRelation {
                kind,
                a: a.to_string(),
                b: b.to_string(),
                similarity: sim,
                direction,
            });
        }
    }
    let rank = |k: &str| ["redundant", "subsumed", "conflicting"].iter().position(|x| *x == k).unwrap();
    out.sort_by(|p, q| (rank(p.kind), &p.a, &p.b).cmp(&(rank(q.kind), &q.a, &q.b)));
    out
}

pub fn check_against_oracle(cs: &[ConstraintSentence], th: &Thresholds, scope: Scope) -> Result<(), TestCaseError> {
    let got = conrel_core::relations::mine_relations(cs, th, scope);
    let want = brute_force_relations(cs, th, scope == Scope::CrossDocumentOnly);
    prop_assert_eq!(got.len(), want.len(), "relation count differs: {:?} vs {:?}", got, want);
    for (g, w) in got.iter().zip(&want) {
        prop_assert_eq!(g.kind.as_str(), w.kind);
        prop_assert_eq!(&g.a, &w.a);
        prop_assert_eq!(&g.b, &w.b);
        prop_assert_eq!(g.direction.map(|d| d.as_str()), w.direction);
        prop_assert!((g.similarity - w.similarity).abs() <= 1e-9);
    }
    Ok(())
}

pub fn check_similarity_matches_naive(cs: &[ConstraintSentence]) -> Result<(), TestCaseError> {
    use conrel_core::relations::{similarity, vectorize};
    let vs = vectorize(cs);
    let (_, dense) = oracle_vectors(cs);
    for i in 0..cs.len() {
        for j in 0..cs.len() {
            let s = similarity(&vs[i], &vs[j]);
            prop_assert!((s - naive_cosine(&dense[i], &dense[j])).abs() <= 1e-9);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Property checks.

pub fn check_partition_cover(cs: &[ConstraintSentence], p: &Partition) -> Result<(), TestCaseError> {
    let mut seen = HashSet::new();
    for (_, ids) in p.groups() {
        for id in ids {
            prop_assert!(seen.insert(id.clone()), "{} assigned twice", id);
        }
    }
    let expected: HashSet<String> = cs.iter().map(|c| c.sentence_id().to_string()).collect();
    prop_assert_eq!(&seen, &expected);
    prop_assert_eq!(p.total(), cs.len());
    prop_assert_eq!(p.group_names().last(), Some(UNDEFINED));
    Ok(())
}

pub fn check_similarity_properties(cs: &[ConstraintSentence]) -> Result<(), TestCaseError> {
    use conrel_core::relations::{similarity, vectorize};
    let vs = vectorize(cs);
    for u in &vs {
        prop_assert!(u.weights.values().all(|w| *w >= 0.0));
        prop_assert_eq!(u.norm == 0.0, u.weights.is_empty());
        if u.norm > 0.0 {
            prop_assert!((similarity(u, u) - 1.0).abs() < 1e-12);
        }
        for v in &vs {
            let s = similarity(u, v);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s, similarity(v, u));
        }
    }
    Ok(())
}

pub fn check_classification_properties(cs: &[ConstraintSentence], raised: f64) -> Result<(), TestCaseError> {
    use conrel_core::relations::{classify_pair, similarity, vectorize};
    let th = Thresholds::default();
    let higher = Thresholds {
        theta_redundant: th.theta_redundant.max(raised),
        ..th
    };
    let vs = vectorize(cs);
    for i in 0..cs.len() {
        for j in 0..cs.len() {
            if i == j {
                continue;
            }
            let sim = similarity(&vs[i], &vs[j]);
            let r1 = classify_pair(&cs[i], &cs[j], sim, &th);
            let r2 = classify_pair(&cs[i], &cs[j], sim, &th);
            prop_assert_eq!(&r1, &r2);
            // argument order only changes nothing but canonical storage
            let r3 = classify_pair(&cs[j], &cs[i], sim, &th);
            prop_assert_eq!(&r1, &r3);
            if let Some(r) = &r1 {
                prop_assert!(r.a < r.b);
                let expected = if sim >= th.theta_conflict && cs[i].polarity != cs[j].polarity {
                    RelationKind::Conflicting
                } else if sim >= th.theta_redundant {
                    RelationKind::Redundant
                } else {
                    RelationKind::Subsumed
                };
                prop_assert_eq!(r.kind, expected);
                prop_assert_eq!(r.direction.is_some(), r.kind == RelationKind::Subsumed);
            }
            if r1.is_none() {
                prop_assert!(classify_pair(&cs[i], &cs[j], sim, &higher).is_none());
            }
        }
    }
    Ok(())
}

pub fn check_scope_soundness(cs: &[ConstraintSentence]) -> Result<(), TestCaseError> {
    use conrel_core::relations::mine_relations;
    let th = Thresholds::default();
    let all = mine_relations(cs, &th, Scope::AllPairs);
    let cross = mine_relations(cs, &th, Scope::CrossDocumentOnly);
    for r in &cross {
        prop_assert!(all.contains(r));
    }
    Ok(())
}

/// Parses emitted DOT and checks node / edge counts and the edge styling.
pub fn check_export_integrity(result: &RunResult) -> Result<(), TestCaseError> {
    let dot = result.graph.to_dot();
    let node_lines = dot
        .lines()
        .filter(|l| l.starts_with("    \"") && l.contains(" [label="))
        .count();
    let edge_lines: Vec<&str> = dot.lines().filter(|l| l.contains(" -> ")).collect();
    prop_assert_eq!(node_lines, result.constraints.len());
    prop_assert_eq!(edge_lines.len(), result.relations.len());
    prop_assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    for (line, rel) in edge_lines.iter().zip(&result.relations) {
        let (color, label) = match rel.kind {
            RelationKind::Redundant => ("green", "r"),
            RelationKind::Subsumed => ("orange", "s"),
            RelationKind::Conflicting => ("red", "c"),
        };
        let color_attr = format!("color=\"{color}\"");
        let label_attr = format!("label=\"{label}\"");
        prop_assert!(line.contains(&color_attr), "{}", line);
        prop_assert!(line.contains(&label_attr), "{}", line);
        if let Some((small, large)) = rel.subsumption() {
            let arrow = format!("\"{small}\" -> \"{large}\"");
            prop_assert!(line.contains(&arrow), "{}", line);
        }
    }
    let json = result.graph.to_json().unwrap();
    let back = ConstraintGraph::from_json(&json).unwrap();
    prop_assert_eq!(&back, &result.graph);
    prop_assert_eq!(back.to_json().unwrap(), json);
    Ok(())
}

pub fn kinds(relations: &[Relation]) -> HashSet<RelationKind> {
    relations.iter().map(|r| r.kind).collect()
}
