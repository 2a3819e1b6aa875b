//! Partitioning constraint sentences into topic groups, and the reading
//! reduction report computed from a partition.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::ConstraintSentence;
use crate::normalize::{contains_sequence, normalize_phrase};

/// Reserved name of the group that collects unmatched sentences.
pub const UNDEFINED: &str = "undefined";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeywordGroup {
    pub name: String,
    pub phrases: Vec<String>,
}

impl KeywordGroup {
    pub fn new<S: Into<String>>(name: &str, phrases: impl IntoIterator<Item = S>) -> Self {
        KeywordGroup {
            name: name.to_string(),
            phrases: phrases.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingMethod {
    Keyword,
    TermFrequency,
    Structure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupSpec {
    pub method: GroupingMethod,
    pub keyword_groups: Vec<KeywordGroup>,
    pub k: Option<usize>,
}

pub const DEFAULT_SEED_COUNT: usize = 5;

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec {
            method: GroupingMethod::TermFrequency,
            keyword_groups: Vec::new(),
            k: Some(DEFAULT_SEED_COUNT),
        }
    }
}

impl GroupSpec {
    pub fn keywords(groups: Vec<KeywordGroup>) -> Self {
        GroupSpec {
            method: GroupingMethod::Keyword,
            keyword_groups: groups,
            k: None,
        }
    }

    pub fn term_frequency(k: usize) -> Self {
        GroupSpec {
            method: GroupingMethod::TermFrequency,
            keyword_groups: Vec::new(),
            k: Some(k),
        }
    }

    pub fn structure() -> Self {
        GroupSpec {
            method: GroupingMethod::Structure,
            keyword_groups: Vec::new(),
            k: None,
        }
    }

    /// Validates the spec and normalizes keyword phrases.
    pub fn compile(&self) -> Result<Grouper> {
        match self.method {
            GroupingMethod::Keyword => Ok(Grouper::Keyword(KeywordGroups::new(&self.keyword_groups)?)),
            GroupingMethod::TermFrequency => match self.k {
                Some(k) if k >= 1 => Ok(Grouper::TermFrequency(k)),
                Some(_) => Err(Error::config("term_frequency grouping needs k >= 1")),
                None => Err(Error::config("term_frequency grouping needs k")),
            },
            GroupingMethod::Structure => Ok(Grouper::Structure),
        }
    }
}

/// Keyword groups with phrases reduced to stem sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordGroups(Vec<(String, Vec<Vec<String>>)>);

impl KeywordGroups {
    pub fn new(groups: &[KeywordGroup]) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::config("keyword grouping needs at least one group"));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(groups.len());
        for g in groups {
            if g.name == UNDEFINED {
                return Err(Error::config(format!("group name `{UNDEFINED}` is reserved")));
            }
            if g.name.trim().is_empty() {
                return Err(Error::config("group names must be non-empty"));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::config(format!("duplicate group name `{}`", g.name)));
            }
            if g.phrases.is_empty() {
                return Err(Error::config(format!("group `{}` has no phrases", g.name)));
            }
            let phrases = g
                .phrases
                .iter()
                .map(|p| normalize_phrase(p))
                .collect::<Result<_>>()?;
            out.push((g.name.clone(), phrases));
        }
        Ok(KeywordGroups(out))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Grouper {
    Keyword(KeywordGroups),
    TermFrequency(usize),
    Structure,
}

impl Grouper {
    pub fn group(&self, constraints: &[ConstraintSentence]) -> Partition {
        match self {
            Grouper::Keyword(groups) => group_by_keywords(constraints, groups),
            Grouper::TermFrequency(k) => group_by_term_frequency(constraints, *k),
            Grouper::Structure => group_by_structure(constraints),
        }
    }
}

/// An ordered assignment of sentence ids to named groups.
///
/// Group order is significant; the reserved [`UNDEFINED`] group is always
/// present and always last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    groups: Vec<(String, Vec<String>)>,
}

impl Partition {
    /// Builds a partition from named groups (in order) and per-sentence
    /// assignments. Names absent from `names` are appended in first-seen
    /// order.
    fn build<'a>(names: impl IntoIterator<Item = String>, assignments: impl IntoIterator<Item = (&'a str, String)>) -> Self {
        let mut groups: Vec<(String, Vec<String>)> = names
            .into_iter()
            .filter(|n| n != UNDEFINED)
            .map(|n| (n, Vec::new()))
            .collect();
        let mut index: HashMap<String, usize> =
            groups.iter().enumerate().map(|(i, (n, _))| (n.clone(), i)).collect();
        let mut undefined = Vec::new();
        for (id, group) in assignments {
            if group == UNDEFINED {
                undefined.push(id.to_string());
                continue;
            }
            let i = *index.entry(group.clone()).or_insert_with(|| {
                groups.push((group, Vec::new()));
                groups.len() - 1
            });
            groups[i].1.push(id.to_string());
        }
        groups.push((UNDEFINED.to_string(), undefined));
        Partition { groups }
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.groups.iter().map(|(n, ids)| (n.as_str(), ids.as_slice()))
    }

    pub fn group_names(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[String]> {
        self.groups
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, ids)| ids.as_slice())
    }

    pub fn size(&self, name: &str) -> Option<usize> {
        self.get(name).map(<[String]>::len)
    }

    pub fn total(&self) -> usize {
        self.groups.iter().map(|(_, ids)| ids.len()).sum()
    }

    /// Sentence id to group name.
    pub fn assignments(&self) -> HashMap<&str, &str> {
        self.groups
            .iter()
            .flat_map(|(n, ids)| ids.iter().map(move |id| (id.as_str(), n.as_str())))
            .collect()
    }

    /// Rows of `sentence_id,group` in group order.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sentence_id", "group"]).map_err(csv_err)?;
        for (name, ids) in &self.groups {
            for id in ids {
                w.write_record([id.as_str(), name.as_str()]).map_err(csv_err)?;
            }
        }
        finish_csv(w)
    }

    /// Parses the CSV written by [`Partition::to_csv`]. Group order follows
    /// first appearance, with `undefined` moved last.
    pub fn from_csv<R: Read>(reader: R, source: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header_ok = r
            .headers()
            .map(|h| h.iter().collect::<Vec<_>>() == ["sentence_id", "group"])
            .unwrap_or(false);
        if !header_ok {
            return Err(Error::MalformedCsv {
                path: source.to_string(),
                line: 1,
                message: "expected header `sentence_id,group`".into(),
            });
        }
        let mut rows: Vec<(String, String)> = Vec::new();
        let mut seen = HashSet::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::MalformedCsv {
                path: source.to_string(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |message: String| Error::MalformedCsv {
                path: source.to_string(),
                line,
                message,
            };
            if rec.len() != 2 {
                return Err(bad(format!("expected 2 fields, found {}", rec.len())));
            }
            let (id, group) = (rec[0].trim(), rec[1].trim());
            if id.is_empty() || group.is_empty() {
                return Err(bad("empty field".into()));
            }
            if !seen.insert(id.to_string()) {
                return Err(bad(format!("sentence `{id}` assigned twice")));
            }
            rows.push((id.to_string(), group.to_string()));
        }
        let names: Vec<String> = {
            let mut seen = HashSet::new();
            rows.iter()
                .filter(|(_, g)| seen.insert(g.clone()))
                .map(|(_, g)| g.clone())
                .collect()
        };
        Ok(Partition::build(
            names,
            rows.iter().map(|(id, g)| (id.as_str(), g.clone())),
        ))
    }

    /// A partition with the given group sizes and synthetic sentence ids,
    /// for recomputing reductions from published counts.
    pub fn from_sizes<S: AsRef<str>>(sizes: &[(S, usize)]) -> Self {
        let names: Vec<String> = sizes.iter().map(|(n, _)| n.as_ref().to_string()).collect();
        let ids: Vec<(String, String)> = sizes
            .iter()
            .flat_map(|(n, count)| {
                let n = n.as_ref().to_string();
                (0..*count).map(move |i| (format!("{n}#{i}"), n.clone()))
            })
            .collect();
        Partition::build(names, ids.iter().map(|(id, g)| (id.as_str(), g.clone())))
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::config(format!("csv write failed: {e}"))
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::config(format!("csv write failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Assigns each sentence to the first group (in configuration order) with a
/// phrase occurring as a contiguous stem run; otherwise to `undefined`.
pub fn group_by_keywords(constraints: &[ConstraintSentence], groups: &KeywordGroups) -> Partition {
    let assignments = constraints.iter().map(|c| {
        let stems = &c.tokenized.stems;
        let group = groups
            .0
            .iter()
            .find(|(_, phrases)| phrases.iter().any(|p| contains_sequence(stems, p)))
            .map_or_else(|| UNDEFINED.to_string(), |(n, _)| n.clone());
        (c.sentence_id(), group)
    });
    Partition::build(groups.names().map(str::to_string), assignments)
}

/// Seeds are the `k` terms with highest sentence frequency (ties broken
/// lexicographically). Each sentence joins the seed it contains with the
/// largest TF-IDF weight, where `idf = ln(N / df)`; ties go to the better
/// ranked seed.
pub fn group_by_term_frequency(constraints: &[ConstraintSentence], k: usize) -> Partition {
    let n = constraints.len();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for c in constraints {
        let unique: HashSet<&str> = c.terms().iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = df.iter().map(|(t, d)| (*t, *d)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.truncate(k);

    let assignments = constraints.iter().map(|c| {
        let mut best: Option<(&str, f64)> = None;
        for &(seed, seed_df) in &ranked {
            let tf = c.terms().iter().filter(|t| *t == seed).count();
            if tf == 0 {
                continue;
            }
            let weight = tf as f64 * (n as f64 / seed_df as f64).ln();
            if best.is_none_or(|(_, w)| weight > w) {
                best = Some((seed, weight));
            }
        }
        let group = best.map_or_else(|| UNDEFINED.to_string(), |(s, _)| s.to_string());
        (c.sentence_id(), group)
    });
    Partition::build(ranked.iter().map(|(s, _)| s.to_string()), assignments)
}

/// Number of content stems before the first signal that form the group key.
pub const STRUCTURE_KEY_LEN: usize = 3;

/// Groups by the addressee: the last few content stems strictly before the
/// first signal word, joined by `_`.
pub fn group_by_structure(constraints: &[ConstraintSentence]) -> Partition {
    let assignments = constraints.iter().map(|c| {
        let first = c.first_signal_position();
        let ts = &c.tokenized;
        let before: Vec<&str> = ts.stems[..first]
            .iter()
            .zip(&ts.content[..first])
            .filter(|(_, keep)| **keep)
            .map(|(s, _)| s.as_str())
            .collect();
        let key = &before[before.len().saturating_sub(STRUCTURE_KEY_LEN)..];
        let group = if key.is_empty() {
            UNDEFINED.to_string()
        } else {
            key.join("_")
        };
        (c.sentence_id(), group)
    });
    Partition::build(Vec::new(), assignments)
}

/// A named set of groups whose readers are counted together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    pub name: String,
    pub groups: Vec<String>,
}

impl Selection {
    pub fn new<S: Into<String>>(name: &str, groups: impl IntoIterator<Item = S>) -> Self {
        Selection {
            name: name.to_string(),
            groups: groups.into_iter().map(Into::into).collect(),
        }
    }

    /// Parses `name=group one,group two`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, groups) = spec
            .split_once('=')
            .ok_or_else(|| Error::config(format!("selection `{spec}` must look like name=g1,g2")))?;
        let groups: Vec<String> = groups
            .split(',')
            .map(|g| g.trim().to_string())
            .filter(|g| !g.is_empty())
            .collect();
        if name.trim().is_empty() || groups.is_empty() {
            return Err(Error::config(format!("selection `{spec}` needs a name and groups")));
        }
        Ok(Selection::new(name.trim(), groups))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionRow {
    pub selection: String,
    pub groups: Vec<String>,
    pub relevant: usize,
    pub read_with_undefined: usize,
    pub reduction_excl_pct: u32,
    pub reduction_incl_pct: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub rows: Vec<ReductionRow>,
    pub total: usize,
}

/// `round(100 * (1 - read / total))` with halves rounded up, in exact
/// integer arithmetic. Zero when there is nothing to read.
pub fn reduction_percent(read: usize, total: usize) -> u32 {
    if total == 0 || read >= total {
        return 0;
    }
    let skipped = (total - read) as u128;
    let total = total as u128;
    ((200 * skipped + total) / (2 * total)) as u32
}

/// Computes reading reductions for each selection.
///
/// With no selections, every non-`undefined` group becomes its own
/// selection. `include_undefined_row` appends a row for the `undefined`
/// group on its own.
pub fn reduction_report(
    partition: &Partition,
    selections: &[Selection],
    include_undefined_row: bool,
) -> Result<ReductionReport> {
    let mut selections: Vec<Selection> = if selections.is_empty() {
        partition
            .group_names()
            .filter(|n| *n != UNDEFINED)
            .map(|n| Selection::new(n, [n]))
            .collect()
    } else {
        selections.to_vec()
    };
    if include_undefined_row {
        selections.push(Selection::new(UNDEFINED, [UNDEFINED]));
    }

    let total = partition.total();
    let undefined = partition.size(UNDEFINED).unwrap_or(0);
    let mut rows = Vec::with_capacity(selections.len());
    for sel in selections {
        let mut unique: Vec<&str> = Vec::new();
        for g in &sel.groups {
            if partition.get(g).is_none() {
                return Err(Error::config(format!(
                    "selection `{}` names unknown group `{g}`",
                    sel.name
                )));
            }
            if !unique.contains(&g.as_str()) {
                unique.push(g);
            }
        }
        let relevant: usize = unique.iter().map(|g| partition.size(g).unwrap_or(0)).sum();
        let read_with_undefined = if unique.contains(&UNDEFINED) {
            relevant
        } else {
            relevant + undefined
        };
        rows.push(ReductionRow {
            reduction_excl_pct: reduction_percent(relevant, total),
            reduction_incl_pct: reduction_percent(read_with_undefined, total),
            selection: sel.name,
            groups: sel.groups,
            relevant,
            read_with_undefined,
        });
    }
    Ok(ReductionReport { rows, total })
}

impl ReductionReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "selection",
            "relevant",
            "read_with_undefined",
            "reduction_excl_pct",
            "reduction_incl_pct",
            "total",
        ])
        .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.selection.clone(),
                r.relevant.to_string(),
                r.read_with_undefined.to_string(),
                r.reduction_excl_pct.to_string(),
                r.reduction_incl_pct.to_string(),
                self.total.to_string(),
            ])
            .map_err(csv_err)?;
        }
        finish_csv(w)
    }

    /// Plain-text table for terminals.
    pub fn to_table(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.selection.chars().count())
            .chain([9])
            .max()
            .unwrap_or(9);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>10}  {:>7}  {:>7}",
            "selection", "relevant", "read+undef", "excl %", "incl %"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}  {:>10}  {:>6}%  {:>6}%",
                r.selection, r.relevant, r.read_with_undefined, r.reduction_excl_pct, r.reduction_incl_pct
            );
        }
        let _ = writeln!(out, "total: {}", self.total);
        out
    }
}
