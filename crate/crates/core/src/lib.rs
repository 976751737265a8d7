//! Evaluation harness for deductive reasoning over steamroller problems.
//!
//! The crate covers the whole pipeline:
//!
//! - [`forge`] generates PRONTOQA-style chain problems with configurable
//!   hops, ontology mode and distractors, and renders them to controlled
//!   natural language.
//! - [`oracle`] is a symbolic reasoner that decides each query under
//!   default negation and emits golden proof traces for the bottom-up,
//!   top-down and magic-set strategies.
//! - [`prompt`] renders the six prompt conditions from pinned templates.
//! - [`provider`] talks to chat-completion APIs and ships deterministic
//!   scripted providers for offline runs.
//! - [`extract`] parses free-text model responses back into semantic
//!   triples and a final verdict.
//! - [`fidelity`] checks step coverage and ordering faithfulness against
//!   the golden traces.
//! - [`stats`] and [`campaign`] aggregate call records into the accuracy,
//!   ratio and correlation summaries a full experiment reports.

pub mod campaign;
pub mod extract;
pub mod fidelity;
pub mod forge;
pub mod lexicon;
pub mod oracle;
pub mod problem;
pub mod prompt;
pub mod provider;
pub mod sample;
pub mod stats;
pub mod triple;

pub use lexicon::Lexicon;
pub use problem::{OntologyMode, Problem, Statement, StatementKind, TargetAnswer};
pub use triple::{Polarity, Triple};
