//! Entity-level faithfulness toolkit for abstractive summarization.
//!
//! Generated summaries routinely name entities the source article never
//! mentions. Some of those are hallucinations; others are true facts the
//! article merely omits. This crate tells the two apart with an external
//! knowledge base, and provides the machinery to *repair* the hallucinated
//! ones:
//!
//! - [`kb`]: a deduplicated (subject, relation, object) triple store with a
//!   subject index and k-hop breadth-first subgraph extraction.
//! - [`linker`]: dictionary-based entity linking — longest normalized alias
//!   match with word-boundary alignment, resolving surface forms to
//!   canonical entity ids.
//! - [`coverage`]: classify reference-summary entities as in-source,
//!   KB-reachable at hop h, or unsupported; corpus coverage reports and
//!   abstractive subset filtering.
//! - [`linearize`]: serialize subgraph facts into delimited strings appended
//!   to the source under a token budget, plus random-words / random-facts
//!   control baselines.
//! - [`skeleton`]: mask typed entity mentions into indexed placeholders and
//!   reassemble text from fills.
//! - [`revision`]: fill masked slots from a (subject, relation) → object-set
//!   fact memory with a deterministic, interpretable scorer, falling back to
//!   an extractive copy baseline.
//! - [`metrics`]: entity-id correctness and consistency, abstractive /
//!   extractive and per-category breakdowns, and ROUGE-1 with a canonical
//!   (id-collapsed) mode.
//! - [`corpus`]: JSONL document and prediction I/O.
//!
//! Everything is deterministic: randomized baselines take explicit seeds,
//! collections iterate in stable order, and identical inputs produce
//! byte-identical outputs.

pub mod corpus;
pub mod coverage;
pub mod error;
pub mod kb;
pub mod linearize;
pub mod linker;
pub mod metrics;
pub mod revision;
pub mod skeleton;
pub mod types;

pub use corpus::{load_corpus, load_predictions, Document};
pub use coverage::{
    classify_entity, coverage_report, filter_abstractive_subset, split_entities, ClassCoverage,
    CoverageDiagnostics, CoverageReport, HopCell, ProvenanceClass,
};
pub use error::{Error, Result};
pub use kb::{
    load_kb, Fact, FactObject, KbBuilder, KnowledgeBase, KnowledgeSubgraph, LoadStats,
    MissingObjectPolicy,
};
pub use linearize::{
    augment_source, linearize, linearize_with, random_facts, random_facts_from, random_words,
    token_count, AugmentResult, FactOrdering, LinearizationConfig, SEPARATOR,
};
pub use linker::{entity_set, link, load_aliases, normalize, AliasEntry, AliasTable, Mention};
pub use metrics::{
    canonicalize_mentions, entity_consistency, entity_correctness, entity_correctness_recall,
    evaluate_corpus, rouge1, rouge1_canonical, EntityMetricReport, EntityScore, EvalDiagnostics,
    EvalMode, EvalOptions, EvalReport, RougeAverages, RougeReport, RougeScore,
};
pub use revision::{
    build_fact_memory, copy_baseline, revise, score_candidates, FactMemory, FillOrigin,
    MemoryEntry, RevisionConfig, RevisionResult, ScoredCandidate, SlotRevision, ValueEntity,
};
pub use skeleton::{mask_entities, unmask, MaskSlot, SkeletonSummary};
pub use types::{Category, EntityId, Relation, RelationId};
