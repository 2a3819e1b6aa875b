//! Run configuration: JSON schema, defaults, bundled profiles and validation.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{SignalLexicon, DEFAULT_NEGATORS, DEFAULT_SIGNALS, DEFAULT_WINDOW};
use crate::grouping::{GroupSpec, Grouper, Selection};
use crate::ingest::{validate_doc_id, Abbreviations, FragmentationRules, Fragmenter, DEFAULT_ABBREVIATIONS};
use crate::normalize::Stopwords;
use crate::relations::{Scope, Thresholds};

const GDPR_PROFILE: &str = include_str!("../profiles/gdpr.json");

/// Names of the profiles compiled into the library.
pub const BUNDLED_PROFILES: &[&str] = &["gdpr"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub path: PathBuf,
    /// Defaults to the file stem.
    #[serde(default)]
    pub doc_id: Option<String>,
}

impl InputSpec {
    /// Parses `path` or `path=doc_id`.
    pub fn parse(spec: &str) -> Self {
        match spec.rsplit_once('=') {
            Some((path, id)) if !path.is_empty() && !id.is_empty() => InputSpec {
                path: path.into(),
                doc_id: Some(id.to_string()),
            },
            _ => InputSpec {
                path: spec.into(),
                doc_id: None,
            },
        }
    }

    pub fn resolved_doc_id(&self) -> String {
        self.doc_id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().replace([':', ' '], "_"))
                .unwrap_or_default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconConfig {
    pub signals: Vec<String>,
    pub negators: Vec<String>,
    pub window: usize,
}

impl Default for LexiconConfig {
    fn default() -> Self {
        LexiconConfig {
            signals: DEFAULT_SIGNALS.iter().map(|s| s.to_string()).collect(),
            negators: DEFAULT_NEGATORS.iter().map(|s| s.to_string()).collect(),
            window: DEFAULT_WINDOW,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Vec<InputSpec>,
    pub lossy_utf8: bool,
    pub fragmentation: FragmentationRules,
    pub abbreviations: Vec<String>,
    /// `None` selects the built-in English list.
    pub stopwords_path: Option<PathBuf>,
    pub lexicon: LexiconConfig,
    pub grouping: GroupSpec,
    /// Empty means one selection per group.
    pub selections: Vec<Selection>,
    pub include_undefined_row: bool,
    pub thresholds: Thresholds,
    pub scope: Scope,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            lossy_utf8: false,
            fragmentation: FragmentationRules::default(),
            abbreviations: DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()).collect(),
            stopwords_path: None,
            lexicon: LexiconConfig::default(),
            grouping: GroupSpec::default(),
            selections: Vec::new(),
            include_undefined_row: false,
            thresholds: Thresholds::default(),
            scope: Scope::default(),
            output_dir: PathBuf::from("conrel-out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Loads a config file. Relative paths inside it are resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.inputs.iter_mut().for_each(|i| rebase(&mut i.path));
        if let Some(p) = cfg.stopwords_path.as_mut() {
            rebase(p);
        }
        Ok(cfg)
    }

    pub fn bundled(name: &str) -> Result<Self> {
        match name {
            "gdpr" => Self::from_json(GDPR_PROFILE),
            other => Err(Error::config(format!(
                "unknown profile `{other}` (available: {})",
                BUNDLED_PROFILES.join(", ")
            ))),
        }
    }

    /// Checks everything that can be checked without reading the inputs'
    /// contents, and compiles the processing stages.
    pub fn prepare(&self) -> Result<Prepared> {
        let fragmenter = self.fragmentation.compile()?;
        let abbreviations = Abbreviations::new(&self.abbreviations)?;
        let stopwords = match &self.stopwords_path {
            Some(p) => Stopwords::load(p)?,
            None => Stopwords::default(),
        };
        let lexicon = SignalLexicon::new(&self.lexicon.signals, &self.lexicon.negators, self.lexicon.window)?;
        lexicon.check_disjoint(&stopwords)?;
        self.thresholds.validate()?;
        let grouper = self.grouping.compile()?;
        if let Grouper::Keyword(groups) = &grouper {
            let known: HashSet<&str> = groups.names().chain([crate::grouping::UNDEFINED]).collect();
            for sel in &self.selections {
                if let Some(g) = sel.groups.iter().find(|g| !known.contains(g.as_str())) {
                    return Err(Error::config(format!(
                        "selection `{}` names unknown group `{g}`",
                        sel.name
                    )));
                }
            }
        }
        let mut ids = HashSet::new();
        for input in &self.inputs {
            let id = input.resolved_doc_id();
            validate_doc_id(&id)?;
            if !ids.insert(id.clone()) {
                return Err(Error::config(format!("duplicate doc_id `{id}`")));
            }
            if !input.path.is_file() {
                return Err(Error::config(format!(
                    "input file {} does not exist",
                    input.path.display()
                )));
            }
        }
        Ok(Prepared {
            fragmenter,
            abbreviations,
            stopwords,
            lexicon,
            grouper,
            selections: self.selections.clone(),
            include_undefined_row: self.include_undefined_row,
            thresholds: self.thresholds,
            scope: self.scope,
        })
    }
}

/// A validated configuration with every stage compiled.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub fragmenter: Fragmenter,
    pub abbreviations: Abbreviations,
    pub stopwords: Stopwords,
    pub lexicon: SignalLexicon,
    pub grouper: Grouper,
    pub selections: Vec<Selection>,
    pub include_undefined_row: bool,
    pub thresholds: Thresholds,
    pub scope: Scope,
}

impl Default for Prepared {
    fn default() -> Self {
        RunConfig::default().prepare().expect("default config is valid")
    }
}
