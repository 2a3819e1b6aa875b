//! TF-IDF similarity between constraint sentences and the redundant /
//! subsumed / conflicting classification of sentence pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::ConstraintSentence;
use crate::grouping::{csv_err, finish_csv};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub theta_redundant: f64,
    pub theta_subsumed: f64,
    pub theta_conflict: f64,
    pub containment_min: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            theta_redundant: 0.80,
            theta_subsumed: 0.55,
            theta_conflict: 0.70,
            containment_min: 0.90,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let Thresholds {
            theta_redundant: r,
            theta_subsumed: s,
            theta_conflict: c,
            containment_min: m,
        } = *self;
        if !(0.0 < s && s <= c && c <= 1.0) {
            return Err(Error::config(format!(
                "thresholds must satisfy 0 < theta_subsumed ({s}) <= theta_conflict ({c}) <= 1"
            )));
        }
        if !(s <= r && r <= 1.0) {
            return Err(Error::config(format!(
                "thresholds must satisfy theta_subsumed ({s}) <= theta_redundant ({r}) <= 1"
            )));
        }
        if !(0.0 < m && m <= 1.0) {
            return Err(Error::config(format!("containment_min ({m}) must be in (0, 1]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    #[default]
    AllPairs,
    CrossDocumentOnly,
}

/// Sparse TF-IDF vector of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVector {
    pub sentence_id: String,
    pub weights: BTreeMap<String, f64>,
    pub norm: f64,
}

/// TF-IDF vectors over sentence terms with smoothed idf
/// `ln((1 + N) / (1 + df)) + 1`.
pub fn vectorize(constraints: &[ConstraintSentence]) -> Vec<SentenceVector> {
    let n = constraints.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for c in constraints {
        let unique: BTreeSet<&str> = c.terms().iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    constraints
        .iter()
        .map(|c| {
            let mut tf: BTreeMap<String, f64> = BTreeMap::new();
            for t in c.terms() {
                *tf.entry(t.clone()).or_insert(0.0) += 1.0;
            }
            let weights: BTreeMap<String, f64> = tf
                .into_iter()
                .map(|(t, count)| {
                    let idf = ((1.0 + n) / (1.0 + df[t.as_str()] as f64)).ln() + 1.0;
                    (t, count * idf)
                })
                .collect();
            let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
            SentenceVector {
                sentence_id: c.sentence_id().to_string(),
                weights,
                norm,
            }
        })
        .collect()
}

/// Cosine similarity, or 0 when either vector is empty.
pub fn similarity(u: &SentenceVector, v: &SentenceVector) -> f64 {
    if u.norm == 0.0 || v.norm == 0.0 {
        return 0.0;
    }
    let (small, large) = if u.weights.len() <= v.weights.len() {
        (&u.weights, &v.weights)
    } else {
        (&v.weights, &u.weights)
    };
    let dot: f64 = small
        .iter()
        .filter_map(|(t, w)| large.get(t).map(|x| w * x))
        .sum();
    (dot / (u.norm * v.norm)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Redundant,
    Subsumed,
    Conflicting,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Redundant => "redundant",
            RelationKind::Subsumed => "subsumed",
            RelationKind::Conflicting => "conflicting",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ASubsumedByB,
    BSubsumedByA,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::ASubsumedByB => "a_subsumed_by_b",
            Direction::BSubsumedByA => "b_subsumed_by_a",
        }
    }

    fn flipped(self) -> Self {
        match self {
            Direction::ASubsumedByB => Direction::BSubsumedByA,
            Direction::BSubsumedByA => Direction::ASubsumedByB,
        }
    }
}

/// A classified sentence pair, stored with `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relation {
    pub kind: RelationKind,
    pub a: String,
    pub b: String,
    pub similarity: f64,
    pub direction: Option<Direction>,
}

impl Relation {
    /// For subsumed relations, `(subsumed, subsuming)`.
    pub fn subsumption(&self) -> Option<(&str, &str)> {
        match self.direction? {
            Direction::ASubsumedByB => Some((&self.a, &self.b)),
            Direction::BSubsumedByA => Some((&self.b, &self.a)),
        }
    }
}

/// `|X ∩ Y| / |X|`; 0 for empty `X`.
pub fn containment(x: &BTreeSet<&str>, y: &BTreeSet<&str>) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.intersection(y).count() as f64 / x.len() as f64
}

/// Classifies a pair with precedence conflicting > redundant > subsumed.
///
/// Subsumption compares term sets: the smaller set is the subsumed side and
/// must be contained in the other at `containment_min` or better. Equal set
/// sizes fall back to total term count, then sentence id.
pub fn classify_pair(
    a: &ConstraintSentence,
    b: &ConstraintSentence,
    sim: f64,
    thresholds: &Thresholds,
) -> Option<Relation> {
    let (kind, direction) = if sim >= thresholds.theta_conflict && a.polarity != b.polarity {
        (RelationKind::Conflicting, None)
    } else if sim >= thresholds.theta_redundant {
        (RelationKind::Redundant, None)
    } else if sim >= thresholds.theta_subsumed {
        let sa: BTreeSet<&str> = a.terms().iter().map(String::as_str).collect();
        let sb: BTreeSet<&str> = b.terms().iter().map(String::as_str).collect();
        let a_smaller = (sa.len(), a.terms().len(), a.sentence_id()) <= (sb.len(), b.terms().len(), b.sentence_id());
        let (c, dir) = if a_smaller {
            (containment(&sa, &sb), Direction::ASubsumedByB)
        } else {
            (containment(&sb, &sa), Direction::BSubsumedByA)
        };
        if c < thresholds.containment_min {
            return None;
        }
        (RelationKind::Subsumed, Some(dir))
    } else {
        return None;
    };

    let (first, second, direction) = if a.sentence_id() <= b.sentence_id() {
        (a, b, direction)
    } else {
        (b, a, direction.map(Direction::flipped))
    };
    Some(Relation {
        kind,
        a: first.sentence_id().to_string(),
        b: second.sentence_id().to_string(),
        similarity: sim,
        direction,
    })
}

/// Classifies every unordered pair in scope, sorted by `(kind, a, b)`.
pub fn mine_relations(constraints: &[ConstraintSentence], thresholds: &Thresholds, scope: Scope) -> Vec<Relation> {
    let vectors = vectorize(constraints);
    let mut out = Vec::new();
    for i in 0..constraints.len() {
        for j in i + 1..constraints.len() {
            let (a, b) = (&constraints[i], &constraints[j]);
            if scope == Scope::CrossDocumentOnly && a.doc_id() == b.doc_id() {
                continue;
            }
            if a.sentence_id() == b.sentence_id() {
                continue;
            }
            let sim = similarity(&vectors[i], &vectors[j]);
            if let Some(r) = classify_pair(a, b, sim, thresholds) {
                out.push(r);
            }
        }
    }
    out.sort_by(|x, y| (x.kind, &x.a, &x.b).cmp(&(y.kind, &y.a, &y.b)));
    out
}

/// `kind,a,b,similarity,direction` with similarity to 4 decimals.
pub fn relations_to_csv(relations: &[Relation]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["kind", "a", "b", "similarity", "direction"])
        .map_err(csv_err)?;
    for r in relations {
        w.write_record([
            r.kind.as_str(),
            &r.a,
            &r.b,
            &format!("{:.4}", r.similarity),
            r.direction.map_or("", Direction::as_str),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

pub fn count_by_kind(relations: &[Relation]) -> BTreeMap<RelationKind, usize> {
    let mut counts = BTreeMap::new();
    for r in relations {
        *counts.entry(r.kind).or_insert(0) += 1;
    }
    counts
}
