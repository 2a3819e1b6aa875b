//! The clustered constraint graph and its DOT / JSON serializations.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::ConstraintSentence;
use crate::grouping::{Partition, UNDEFINED};
use crate::relations::{Relation, RelationKind};

/// Maximum excerpt length (in characters) used for DOT node labels.
pub const EXCERPT_CHARS: usize = 120;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphNode {
    pub id: String,
    /// Full sentence text; DOT output truncates it.
    pub text: String,
    pub group: String,
    pub doc: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Relation>,
    pub groups: Vec<String>,
}

/// One node per constraint sentence, in input order; groups follow the
/// partition, with `undefined` last and dropped when empty.
pub fn build_graph(
    partition: &Partition,
    relations: &[Relation],
    constraints: &[ConstraintSentence],
) -> Result<ConstraintGraph> {
    let assignments = partition.assignments();
    let mut nodes = Vec::with_capacity(constraints.len());
    for c in constraints {
        let group = assignments
            .get(c.sentence_id())
            .ok_or_else(|| Error::DanglingEdge(c.sentence_id().to_string()))?;
        nodes.push(GraphNode {
            id: c.sentence_id().to_string(),
            text: c.tokenized.text.clone(),
            group: group.to_string(),
            doc: c.doc_id().to_string(),
        });
    }
    let groups = partition
        .groups()
        .filter(|(n, ids)| *n != UNDEFINED || !ids.is_empty())
        .map(|(n, _)| n.to_string())
        .collect();
    let graph = ConstraintGraph {
        nodes,
        edges: relations.to_vec(),
        groups,
    };
    graph.validate()?;
    Ok(graph)
}

impl ConstraintGraph {
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(Error::Graph(format!("duplicate node `{}`", n.id)));
            }
        }
        let groups: HashSet<&str> = self.groups.iter().map(String::as_str).collect();
        if let Some(n) = self.nodes.iter().find(|n| !groups.contains(n.group.as_str())) {
            return Err(Error::Graph(format!(
                "node `{}` has unknown group `{}`",
                n.id, n.group
            )));
        }
        for e in &self.edges {
            for end in [&e.a, &e.b] {
                if !ids.contains(end.as_str()) {
                    return Err(Error::DanglingEdge(end.clone()));
                }
            }
        }
        Ok(())
    }

    /// Compact JSON with fixed key order.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let graph: ConstraintGraph = serde_json::from_str(text)?;
        graph.validate()?;
        Ok(graph)
    }

    pub fn to_dot(&self) -> String {
        to_dot(self)
    }
}

pub fn excerpt(text: &str) -> String {
    if text.chars().count() <= EXCERPT_CHARS {
        return text.to_string();
    }
    let mut s: String = text.chars().take(EXCERPT_CHARS - 1).collect();
    s.push('\u{2026}');
    s
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn edge_style(kind: RelationKind) -> (&'static str, &'static str) {
    match kind {
        RelationKind::Redundant => ("green", "r"),
        RelationKind::Subsumed => ("orange", "s"),
        RelationKind::Conflicting => ("red", "c"),
    }
}

/// Renders the graph as a DOT digraph with one cluster per group.
///
/// Subsumed edges point from the subsumed sentence to the subsuming one;
/// redundant and conflicting edges are drawn without arrowheads.
pub fn to_dot(graph: &ConstraintGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph constraints {\n");
    out.push_str("  compound=true;\n");
    out.push_str("  node [shape=box, fontsize=10];\n");
    for (i, group) in graph.groups.iter().enumerate() {
        let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{i}")));
        let _ = writeln!(out, "    label={};", quote(group));
        for n in graph.nodes.iter().filter(|n| &n.group == group) {
            let label = format!("{}\n{}", n.id, excerpt(&n.text));
            let _ = writeln!(out, "    {} [label={}];", quote(&n.id), quote(&label));
        }
        out.push_str("  }\n");
    }
    for e in &graph.edges {
        let (color, label) = edge_style(e.kind);
        let (from, to, dir) = match e.subsumption() {
            Some((small, large)) if e.kind == RelationKind::Subsumed => (small, large, ""),
            _ => (e.a.as_str(), e.b.as_str(), ", dir=none"),
        };
        let _ = writeln!(
            out,
            "  {} -> {} [color={}, label={}{}];",
            quote(from),
            quote(to),
            quote(color),
            quote(label),
            dir
        );
    }
    out.push_str("}\n");
    out
}
