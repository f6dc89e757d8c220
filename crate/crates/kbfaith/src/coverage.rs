//! Target-entity provenance classification and corpus coverage reports.
//!
//! For each document, every distinct entity mentioned in the reference
//! summary is classified by where it can be grounded: directly in the source
//! text, in the KB within some number of hops of the source entities, or
//! nowhere (unsupported). The corpus report aggregates these classes per
//! entity category with cumulative per-hop coverage counts.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::Document;
use crate::kb::{KnowledgeBase, KnowledgeSubgraph};
use crate::linker::{entity_set, link, AliasTable};
use crate::types::{Category, EntityId};

/// Where a target-summary entity can be grounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProvenanceClass {
    /// Mentioned in the source document itself.
    InSource,
    /// Reachable in the KB at this minimal hop count (≥ 1) from the source
    /// entities.
    InKbHop(u32),
    /// Neither in the source nor in the extracted subgraph.
    Unsupported,
}

impl ProvenanceClass {
    /// Minimal hop at which the entity is covered; `None` when unsupported.
    /// In-source entities count as hop 0.
    pub fn min_hop(self) -> Option<u32> {
        match self {
            ProvenanceClass::InSource => Some(0),
            ProvenanceClass::InKbHop(h) => Some(h),
            ProvenanceClass::Unsupported => None,
        }
    }
}

/// Classify one entity against a document's source entity set and the
/// subgraph expanded from it.
pub fn classify_entity(
    entity: &EntityId,
    source_entities: &BTreeSet<EntityId>,
    subgraph: &KnowledgeSubgraph,
) -> ProvenanceClass {
    if source_entities.contains(entity) {
        return ProvenanceClass::InSource;
    }
    match subgraph.entity_hop(entity) {
        // subgraph seeds are the source entities, so hop 0 is "in source"
        Some(0) => ProvenanceClass::InSource,
        Some(h) => ProvenanceClass::InKbHop(h),
        None => ProvenanceClass::Unsupported,
    }
}

/// One cumulative coverage cell: how many entities are covered within the
/// hop, and what share of the class total that is (0–100).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopCell {
    pub count: usize,
    pub percent: f64,
}

/// Coverage aggregate for one entity class (a category, or the overall row).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassCoverage {
    /// Distinct target entities observed in this class, summed over
    /// documents (the same entity in two documents counts twice).
    pub total: usize,
    /// Entities not covered at any hop.
    pub unsupported: usize,
    /// Cumulative coverage per hop, `0..=hops`; hop 0 means "in source".
    pub coverage_by_hop: BTreeMap<u32, HopCell>,
}

impl ClassCoverage {
    fn from_min_hops(min_hops: &[Option<u32>], hops: u32) -> Self {
        let total = min_hops.len();
        let unsupported = min_hops.iter().filter(|h| h.is_none()).count();
        let coverage_by_hop = (0..=hops)
            .map(|h| {
                let count = min_hops.iter().filter(|m| m.is_some_and(|mh| mh <= h)).count();
                let percent = if total == 0 {
                    0.0
                } else {
                    100.0 * count as f64 / total as f64
                };
                (h, HopCell { count, percent })
            })
            .collect();
        ClassCoverage { total, unsupported, coverage_by_hop }
    }
}

/// Per-document anomalies worth surfacing alongside the aggregate numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoverageDiagnostics {
    /// Documents whose source text linked to no entity at all (their target
    /// entities can only be in-source-covered never, so they skew results).
    pub docs_without_source_entities: usize,
    /// Documents whose reference summary linked to no entity.
    pub docs_without_target_entities: usize,
}

/// Corpus-level coverage report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub corpus_size: usize,
    pub hops: u32,
    pub overall: ClassCoverage,
    /// One row per entity category (all categories always present).
    pub by_category: BTreeMap<Category, ClassCoverage>,
    pub diagnostics: CoverageDiagnostics,
}

/// Build the corpus coverage report at the given hop depth.
///
/// A target entity's category is taken from its first mention in the target
/// text; its provenance is classified against the source entity set and the
/// k-hop subgraph seeded by it.
pub fn coverage_report(
    kb: &KnowledgeBase,
    aliases: &AliasTable,
    corpus: &[Document],
    hops: u32,
) -> CoverageReport {
    let mut rows: Vec<(Category, Option<u32>)> = Vec::new();
    let mut diagnostics = CoverageDiagnostics::default();

    for doc in corpus {
        let source_mentions = link(&doc.source, aliases);
        let source_entities = entity_set(&source_mentions);
        if source_entities.is_empty() {
            diagnostics.docs_without_source_entities += 1;
        }
        let target_mentions = link(&doc.target, aliases);
        if target_mentions.is_empty() {
            diagnostics.docs_without_target_entities += 1;
        }
        let subgraph = kb.subgraph(&source_entities, hops);

        let mut first_category: BTreeMap<EntityId, Category> = BTreeMap::new();
        for m in &target_mentions {
            first_category.entry(m.entity.clone()).or_insert(m.category);
        }
        for (entity, category) in first_category {
            let class = classify_entity(&entity, &source_entities, &subgraph);
            rows.push((category, class.min_hop()));
        }
    }

    let overall_hops: Vec<Option<u32>> = rows.iter().map(|(_, h)| *h).collect();
    let by_category = Category::ALL
        .iter()
        .map(|&cat| {
            let hops_of_cat: Vec<Option<u32>> = rows
                .iter()
                .filter(|(c, _)| *c == cat)
                .map(|(_, h)| *h)
                .collect();
            (cat, ClassCoverage::from_min_hops(&hops_of_cat, hops))
        })
        .collect();

    CoverageReport {
        corpus_size: corpus.len(),
        hops,
        overall: ClassCoverage::from_min_hops(&overall_hops, hops),
        by_category,
        diagnostics,
    }
}

/// Partition the distinct target entity ids into (abstractive, extractive):
/// entities absent from the source entity set vs those present in it.
pub fn split_entities(
    target_mentions: &[crate::linker::Mention],
    source_entities: &BTreeSet<EntityId>,
) -> (BTreeSet<EntityId>, BTreeSet<EntityId>) {
    let mut abstractive = BTreeSet::new();
    let mut extractive = BTreeSet::new();
    for mention in target_mentions {
        if source_entities.contains(&mention.entity) {
            extractive.insert(mention.entity.clone());
        } else {
            abstractive.insert(mention.entity.clone());
        }
    }
    (abstractive, extractive)
}

/// Keep exactly the documents where at least one target entity of the given
/// category (by its first target mention) is absent from the source entity
/// set — the "abstractive subset" for that category.
pub fn filter_abstractive_subset(
    corpus: &[Document],
    aliases: &AliasTable,
    category: Category,
) -> Vec<Document> {
    corpus
        .iter()
        .filter(|doc| {
            let source_entities = entity_set(&link(&doc.source, aliases));
            let target_mentions = link(&doc.target, aliases);
            let mut first_category: BTreeMap<EntityId, Category> = BTreeMap::new();
            for m in &target_mentions {
                first_category.entry(m.entity.clone()).or_insert(m.category);
            }
            first_category
                .iter()
                .any(|(entity, cat)| *cat == category && !source_entities.contains(entity))
        })
        .cloned()
        .collect()
}
