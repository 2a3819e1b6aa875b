//! End-to-end orchestration: ingest, normalize, filter, group, mine, export.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{Prepared, RunConfig};
use crate::error::{Error, Result};
use crate::filter::{filter_constraints, ConstraintSentence};
use crate::graph::{build_graph, ConstraintGraph};
use crate::grouping::{csv_err, finish_csv, reduction_report, Partition, ReductionReport};
use crate::ingest::{load_document, segment_sentences, Document, Sentence};
use crate::normalize::TokenizedSentence;
use crate::relations::{count_by_kind, mine_relations, relations_to_csv, Relation, RelationKind};

pub const SENTENCES_CSV: &str = "sentences.csv";
pub const PARTITION_CSV: &str = "partition.csv";
pub const RELATIONS_CSV: &str = "relations.csv";
pub const REDUCTION_CSV: &str = "reduction.csv";
pub const GRAPH_DOT: &str = "graph.dot";
pub const GRAPH_JSON: &str = "graph.json";

/// File names of everything [`RunResult::write_artifacts`] produces.
pub fn artifact_names() -> [&'static str; 6] {
    [SENTENCES_CSV, PARTITION_CSV, RELATIONS_CSV, REDUCTION_CSV, GRAPH_DOT, GRAPH_JSON]
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub sentences: Vec<Sentence>,
    pub constraints: Vec<ConstraintSentence>,
    pub partition: Partition,
    pub relations: Vec<Relation>,
    pub graph: ConstraintGraph,
    pub report: ReductionReport,
}

/// Reads every configured input file.
pub fn load_inputs(config: &RunConfig) -> Result<Vec<Document>> {
    config
        .inputs
        .iter()
        .map(|input| {
            let bytes = std::fs::read(&input.path).map_err(|e| Error::io(&input.path, e))?;
            load_document(
                &input.path.display().to_string(),
                &bytes,
                &input.resolved_doc_id(),
                config.lossy_utf8,
            )
        })
        .collect()
}

pub fn segment(prepared: &Prepared, docs: &[Document]) -> Vec<Sentence> {
    docs.iter()
        .flat_map(|d| prepared.fragmenter.fragment(d))
        .flat_map(|f| segment_sentences(&f, &prepared.abbreviations))
        .collect()
}

pub fn extract_constraints(prepared: &Prepared, sentences: &[Sentence]) -> Vec<ConstraintSentence> {
    let tokenized = sentences
        .iter()
        .map(|s| TokenizedSentence::from_sentence(s, &prepared.stopwords));
    filter_constraints(tokenized, &prepared.lexicon)
}

/// Runs all stages over already loaded documents.
pub fn run_documents(prepared: &Prepared, docs: &[Document]) -> Result<RunResult> {
    let sentences = segment(prepared, docs);
    let constraints = extract_constraints(prepared, &sentences);
    let partition = prepared.grouper.group(&constraints);
    let relations = mine_relations(&constraints, &prepared.thresholds, prepared.scope);
    let graph = build_graph(&partition, &relations, &constraints)?;
    let report = reduction_report(&partition, &prepared.selections, prepared.include_undefined_row)?;
    Ok(RunResult {
        sentences,
        constraints,
        partition,
        relations,
        graph,
        report,
    })
}

/// Validates the config, reads the inputs and runs every stage.
pub fn run_pipeline(config: &RunConfig) -> Result<RunResult> {
    let prepared = config.prepare()?;
    if config.inputs.is_empty() {
        return Err(Error::config("no input documents"));
    }
    let docs = load_inputs(config)?;
    run_documents(&prepared, &docs)
}

impl RunResult {
    /// `sentence_id,doc,fragment,group,polarity,text` for every segmented
    /// sentence; group and polarity are empty for non-constraints.
    pub fn sentences_csv(&self) -> Result<String> {
        let groups = self.partition.assignments();
        let polarity: std::collections::HashMap<&str, String> = self
            .constraints
            .iter()
            .map(|c| (c.sentence_id(), c.polarity.to_string()))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sentence_id", "doc", "fragment", "group", "polarity", "text"])
            .map_err(csv_err)?;
        for s in &self.sentences {
            let id = s.sentence_id.as_str();
            w.write_record([
                id,
                &s.doc_id,
                &s.fragment_index.to_string(),
                groups.get(id).copied().unwrap_or(""),
                polarity.get(id).map_or("", String::as_str),
                &s.text,
            ])
            .map_err(csv_err)?;
        }
        finish_csv(w)
    }

    /// All six artifacts as `(file name, contents)`.
    pub fn artifacts(&self) -> Result<Vec<(&'static str, String)>> {
        Ok(vec![
            (SENTENCES_CSV, self.sentences_csv()?),
            (PARTITION_CSV, self.partition.to_csv()?),
            (RELATIONS_CSV, relations_to_csv(&self.relations)?),
            (REDUCTION_CSV, self.report.to_csv()?),
            (GRAPH_DOT, self.graph.to_dot()),
            (GRAPH_JSON, self.graph.to_json()?),
        ])
    }

    pub fn write_artifacts(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        write_atomically(dir, &self.artifacts()?)
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "sentences: {}  constraints: {}",
            self.sentences.len(),
            self.constraints.len()
        );
        let _ = writeln!(out, "groups:");
        for (name, ids) in self.partition.groups() {
            let _ = writeln!(out, "  {name}: {}", ids.len());
        }
        let counts = count_by_kind(&self.relations);
        let _ = writeln!(out, "relations:");
        for kind in [RelationKind::Redundant, RelationKind::Subsumed, RelationKind::Conflicting] {
            let _ = writeln!(out, "  {kind}: {}", counts.get(&kind).copied().unwrap_or(0));
        }
        out
    }
}

/// Writes all files into a staging directory inside `dir`, then renames
/// them into place, so a failure part-way leaves no half-written artifact.
pub fn write_atomically(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".conrel-staging")
        .tempdir_in(dir)
        .map_err(|e| Error::io(dir, e))?;
    for (name, contents) in files {
        let p = staging.path().join(name);
        std::fs::write(&p, contents).map_err(|e| Error::io(&p, e))?;
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, _) in files {
        let target = dir.join(name);
        std::fs::rename(staging.path().join(name), &target).map_err(|e| Error::io(&target, e))?;
        written.push(target);
    }
    Ok(written)
}
