//! Constraint mining for regulatory documents.
//!
//! The pipeline splits documents into fragments and sentences, keeps the
//! sentences that carry a deontic signal word ("shall", "must", ...), groups
//! them into topics, mines redundant / subsumed / conflicting pairs, and
//! exports a clustered graph plus a reading-reduction report.
//!
//! ```
//! use conrel_core::{ingest::load_document, pipeline::run_documents, config::Prepared};
//!
//! let doc = load_document("memo", b"The controller shall keep records. It is sunny.", "memo", false).unwrap();
//! let result = run_documents(&Prepared::default(), &[doc]).unwrap();
//! assert_eq!(result.constraints.len(), 1);
//! ```

pub mod config;
pub mod error;
pub mod filter;
pub mod graph;
pub mod grouping;
pub mod ingest;
pub mod normalize;
pub mod pipeline;
pub mod porter;
pub mod relations;

pub use config::{InputSpec, Prepared, RunConfig};
pub use error::{Error, Result};
pub use filter::{ConstraintSentence, Polarity, SignalLexicon};
pub use graph::ConstraintGraph;
pub use grouping::{GroupSpec, Partition, ReductionReport, Selection, UNDEFINED};
pub use ingest::{Document, Fragment, FragmentationRules, Sentence};
pub use normalize::{Stopwords, TokenizedSentence};
pub use pipeline::{run_pipeline, RunResult};
pub use relations::{Relation, RelationKind, Scope, Thresholds};
