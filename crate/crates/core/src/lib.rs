//! Conditional entropy of the nominal slot in English participial compounds
//! (`tear-stained`, `tear stained`) versus their phrasal paraphrases
//! (`was stained with tears`, `pillow stained with tears`).
//!
//! The pipeline reads dependency-annotated CoNLL-U, finds the four
//! constructions with surface queries, validates them against the parse,
//! samples a fixed number of slot fillers per participle and construction,
//! measures entropy in bits, and compares constructions with a
//! random-intercept mixed model.

pub mod config;
pub mod conllu;
pub mod cql;
pub mod entropy;
pub mod extract;
pub mod figures;
pub mod lexicon;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod tags;

pub use config::PipelineConfig;
pub use conllu::{ConlluReader, Sentence, Token};
pub use cql::{compile, parse_query, CompiledQuery, MatchSpan, QueryAst};
pub use entropy::{EntropyRecord, SlotSample};
pub use extract::{ConstructionKind, ConstructionMatch, Extractor};
pub use pipeline::{run_pipeline, PipelineError};
pub use synth::{generate_synthetic_corpus, SynthSpec};
