//! Knowledge-base storage, indexing, and k-hop subgraph extraction.
//!
//! The KB is a deduplicated set of (subject, relation, object) facts plus an
//! entity label/category table. Facts are indexed by subject so that
//! [`KnowledgeBase::facts_from`] runs in time independent of the total fact
//! count, which is what makes breadth-first subgraph expansion cheap.
//!
//! A [`KnowledgeBase`] is immutable once built and safe to share across
//! threads; [`KnowledgeBase::subgraph`] is a pure function of its inputs.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fs;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linearize::SEPARATOR;
use crate::types::{Category, EntityId, Relation, RelationId};

/// Object position of a fact: either another entity (carrying its canonical
/// label) or an opaque literal string.
///
/// Literals are real facts — they linearize and show up in provenance — but
/// they never expand the traversal frontier and never count as covered
/// entities, because they have no canonical ID.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactObject {
    Entity { id: EntityId, label: String },
    Literal { value: String },
}

impl FactObject {
    pub fn entity_id(&self) -> Option<&EntityId> {
        match self {
            FactObject::Entity { id, .. } => Some(id),
            FactObject::Literal { .. } => None,
        }
    }

    /// The string linearization emits for this object.
    pub fn surface(&self) -> &str {
        match self {
            FactObject::Entity { label, .. } => label,
            FactObject::Literal { value } => value,
        }
    }
}

/// One KB atom: subject entity, labeled relation, object entity or literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub subject: EntityId,
    pub relation: Relation,
    pub object: FactObject,
}

impl Fact {
    /// The three label strings `(subject, relation, object)` in linearization
    /// order. Requires the KB that owns this fact for the subject label.
    pub fn label_triple(&self, kb: &KnowledgeBase) -> [String; 3] {
        [
            kb.label(&self.subject).unwrap_or(self.subject.as_str()).to_string(),
            self.relation.label.clone(),
            self.object.surface().to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct EntityInfo {
    label: String,
    category: Category,
}

/// What to do with a triple whose entity-valued object has no entry in the
/// label table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingObjectPolicy {
    /// Drop the line and count it (default).
    #[default]
    RejectLine,
    /// Keep the fact, demoting the object to a literal holding the raw id.
    KeepAsLiteral,
}

/// Counters reported by [`load_kb`] / [`KbBuilder::build`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadStats {
    pub facts: usize,
    pub entities: usize,
    pub relations: usize,
    pub duplicates_dropped: usize,
    pub rejected_missing_subject_label: usize,
    pub rejected_missing_object_label: usize,
    pub objects_kept_as_literal: usize,
}

enum RawObject {
    Entity(EntityId),
    Literal(String),
}

/// Incremental KB constructor. Entities and triples may be added in any
/// order; referential checks run at [`KbBuilder::build`].
#[derive(Default)]
pub struct KbBuilder {
    entities: BTreeMap<EntityId, EntityInfo>,
    relations: BTreeMap<RelationId, String>,
    raw_facts: Vec<(EntityId, RelationId, RawObject)>,
}

impl KbBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register an entity with its canonical label and category.
    ///
    /// Exact duplicates are accepted; re-registering an id with a different
    /// label or category is an error.
    pub fn add_entity(
        &mut self,
        id: impl Into<String>,
        label: impl Into<String>,
        category: Category,
    ) -> Result<()> {
        let id = EntityId::new(id);
        let label = label.into();
        if id.as_str().is_empty() {
            return Err(Error::InvalidInput("empty entity id".into()));
        }
        if label.is_empty() {
            return Err(Error::InvalidInput(format!("empty label for entity {id}")));
        }
        if label.contains(SEPARATOR) {
            return Err(Error::InvalidInput(format!(
                "label for entity {id} contains the reserved separator {SEPARATOR:?}"
            )));
        }
        let info = EntityInfo { label, category };
        match self.entities.get(&id) {
            Some(existing) if *existing != info => Err(Error::InvalidInput(format!(
                "conflicting label or category for entity {id}"
            ))),
            _ => {
                self.entities.insert(id, info);
                Ok(())
            }
        }
    }

    /// Add a triple with an entity-valued object.
    pub fn add_entity_triple(
        &mut self,
        subject: impl Into<String>,
        relation_id: impl Into<String>,
        relation_label: impl Into<String>,
        object: impl Into<String>,
    ) -> Result<()> {
        let object = EntityId::new(object);
        self.add_raw(subject, relation_id, relation_label, RawObject::Entity(object))
    }

    /// Add a triple with a literal object.
    pub fn add_literal_triple(
        &mut self,
        subject: impl Into<String>,
        relation_id: impl Into<String>,
        relation_label: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<()> {
        let value = value.into();
        if value.is_empty() {
            return Err(Error::InvalidInput("empty literal object".into()));
        }
        if value.contains(SEPARATOR) {
            return Err(Error::InvalidInput(format!(
                "literal object contains the reserved separator {SEPARATOR:?}"
            )));
        }
        self.add_raw(subject, relation_id, relation_label, RawObject::Literal(value))
    }

    fn add_raw(
        &mut self,
        subject: impl Into<String>,
        relation_id: impl Into<String>,
        relation_label: impl Into<String>,
        object: RawObject,
    ) -> Result<()> {
        let subject = EntityId::new(subject);
        let relation_id = RelationId::new(relation_id);
        let relation_label = relation_label.into();
        if subject.as_str().is_empty() {
            return Err(Error::InvalidInput("empty subject id".into()));
        }
        if relation_id.as_str().is_empty() {
            return Err(Error::InvalidInput("empty relation id".into()));
        }
        if relation_label.is_empty() {
            return Err(Error::InvalidInput(format!(
                "empty label for relation {relation_id}"
            )));
        }
        if relation_label.contains(SEPARATOR) {
            return Err(Error::InvalidInput(format!(
                "label for relation {relation_id} contains the reserved separator {SEPARATOR:?}"
            )));
        }
        if let RawObject::Entity(id) = &object {
            if id.as_str().is_empty() {
                return Err(Error::InvalidInput("empty object entity id".into()));
            }
        }
        match self.relations.get(&relation_id) {
            Some(existing) if *existing != relation_label => {
                return Err(Error::InvalidInput(format!(
                    "conflicting label for relation {relation_id}: {existing:?} vs {relation_label:?}"
                )))
            }
            _ => {
                self.relations.insert(relation_id.clone(), relation_label);
            }
        }
        self.raw_facts.push((subject, relation_id, object));
        Ok(())
    }

    /// Resolve, deduplicate, sort, and index the accumulated triples.
    pub fn build(self, policy: MissingObjectPolicy) -> (KnowledgeBase, LoadStats) {
        let mut stats = LoadStats::default();
        let mut set: BTreeSet<Fact> = BTreeSet::new();
        let mut candidates = 0usize;
        for (subject, relation_id, object) in self.raw_facts {
            if !self.entities.contains_key(&subject) {
                stats.rejected_missing_subject_label += 1;
                continue;
            }
            let object = match object {
                RawObject::Entity(id) => match self.entities.get(&id) {
                    Some(info) => FactObject::Entity {
                        id,
                        label: info.label.clone(),
                    },
                    None => match policy {
                        MissingObjectPolicy::RejectLine => {
                            stats.rejected_missing_object_label += 1;
                            continue;
                        }
                        MissingObjectPolicy::KeepAsLiteral => {
                            stats.objects_kept_as_literal += 1;
                            FactObject::Literal {
                                value: id.as_str().to_string(),
                            }
                        }
                    },
                },
                RawObject::Literal(value) => FactObject::Literal { value },
            };
            let label = self.relations[&relation_id].clone();
            candidates += 1;
            set.insert(Fact {
                subject,
                relation: Relation { id: relation_id, label },
                object,
            });
        }
        stats.duplicates_dropped = candidates - set.len();
        stats.facts = set.len();
        stats.entities = self.entities.len();
        stats.relations = self.relations.len();

        let facts: Vec<Fact> = set.into_iter().collect();
        let mut subject_index: HashMap<EntityId, Range<usize>> = HashMap::new();
        let mut start = 0;
        for (i, fact) in facts.iter().enumerate() {
            if fact.subject != facts[start].subject {
                subject_index.insert(facts[start].subject.clone(), start..i);
                start = i;
            }
        }
        if !facts.is_empty() {
            subject_index.insert(facts[start].subject.clone(), start..facts.len());
        }

        let kb = KnowledgeBase {
            facts,
            subject_index,
            entities: self.entities,
            relations: self.relations,
        };
        (kb, stats)
    }
}

/// An indexed, deduplicated, immutable triple store.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    /// All facts, globally sorted by (subject, relation, object); each
    /// subject's facts form a contiguous run.
    facts: Vec<Fact>,
    subject_index: HashMap<EntityId, Range<usize>>,
    entities: BTreeMap<EntityId, EntityInfo>,
    relations: BTreeMap<RelationId, String>,
}

impl KnowledgeBase {
    /// All facts in canonical order.
    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// All and only facts with the given subject, ordered by (relation id,
    /// object). Unknown subjects yield an empty slice.
    pub fn facts_from(&self, subject: &EntityId) -> &[Fact] {
        match self.subject_index.get(subject) {
            Some(range) => &self.facts[range.clone()],
            None => &[],
        }
    }

    pub fn contains_entity(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn label(&self, id: &EntityId) -> Option<&str> {
        self.entities.get(id).map(|info| info.label.as_str())
    }

    pub fn category(&self, id: &EntityId) -> Option<Category> {
        self.entities.get(id).map(|info| info.category)
    }

    /// The canonical label for an entity; unknown ids are an error.
    pub fn canonical_label(&self, id: &EntityId) -> Result<&str> {
        self.label(id)
            .ok_or_else(|| Error::UnknownEntity(id.as_str().to_string()))
    }

    /// Entity ids in the label table, in sorted order.
    pub fn entity_ids(&self) -> impl Iterator<Item = &EntityId> {
        self.entities.keys()
    }

    /// Breadth-first k-hop expansion from `seeds`.
    ///
    /// Hop-1 facts originate at the seeds; the hop-(i+1) frontier is the set
    /// of entity-valued objects of hop-i facts not seen before. Literal
    /// objects never enter the frontier. Every fact is annotated with the
    /// minimal hop at which it is reached.
    pub fn subgraph(&self, seeds: &BTreeSet<EntityId>, hops: u32) -> KnowledgeSubgraph {
        let mut entity_hops: BTreeMap<EntityId, u32> =
            seeds.iter().map(|s| (s.clone(), 0)).collect();
        let mut facts: Vec<(Fact, u32)> = Vec::new();
        let mut frontier: BTreeSet<EntityId> = seeds.clone();
        for hop in 1..=hops {
            let mut next = BTreeSet::new();
            for subject in &frontier {
                for fact in self.facts_from(subject) {
                    if let FactObject::Entity { id, .. } = &fact.object {
                        if !entity_hops.contains_key(id) {
                            entity_hops.insert(id.clone(), hop);
                            next.insert(id.clone());
                        }
                    }
                    facts.push((fact.clone(), hop));
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        KnowledgeSubgraph {
            seeds: seeds.clone(),
            facts,
            entity_hops,
        }
    }
}

/// Deduplicated facts reachable within k hops of a seed entity set, each
/// annotated with the minimal hop at which it was reached.
#[derive(Debug, Clone)]
pub struct KnowledgeSubgraph {
    seeds: BTreeSet<EntityId>,
    /// Sorted by (hop, fact); each fact appears exactly once, at its minimal
    /// hop.
    facts: Vec<(Fact, u32)>,
    /// Minimal entity-step distance from the seed set; seeds map to 0.
    entity_hops: BTreeMap<EntityId, u32>,
}

impl KnowledgeSubgraph {
    pub fn seeds(&self) -> &BTreeSet<EntityId> {
        &self.seeds
    }

    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter().map(|(fact, _)| fact)
    }

    /// Facts paired with their minimal hop annotation.
    pub fn annotated_facts(&self) -> &[(Fact, u32)] {
        &self.facts
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn hop_of(&self, fact: &Fact) -> Option<u32> {
        self.facts
            .iter()
            .find(|(f, _)| f == fact)
            .map(|(_, hop)| *hop)
    }

    /// Union of seeds, fact subjects, and entity-valued fact objects.
    pub fn entities(&self) -> BTreeSet<EntityId> {
        self.entity_hops.keys().cloned().collect()
    }

    /// Minimal hop at which the entity appears; 0 for seeds, `None` when the
    /// entity is not in the subgraph at all.
    pub fn entity_hop(&self, id: &EntityId) -> Option<u32> {
        self.entity_hops.get(id).copied()
    }

    pub fn contains_entity(&self, id: &EntityId) -> bool {
        self.entity_hops.contains_key(id)
    }
}

fn split_tsv(line: &str) -> Vec<&str> {
    line.split('\t').collect()
}

/// Load a KB from the triples and labels TSV files.
///
/// Triples format, one fact per line:
/// `subject_id<TAB>relation_id<TAB>relation_label<TAB>object_kind<TAB>object_value`
/// with `object_kind` either `entity` or `literal`. Labels format:
/// `entity_id<TAB>canonical_label<TAB>category`. Blank lines and lines
/// starting with `#` are ignored in both files.
pub fn load_kb(
    triples_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    policy: MissingObjectPolicy,
) -> Result<(KnowledgeBase, LoadStats)> {
    let triples_path = triples_path.as_ref();
    let labels_path = labels_path.as_ref();
    let mut builder = KbBuilder::new();

    let labels_text =
        fs::read_to_string(labels_path).map_err(|e| Error::io(labels_path, e))?;
    for (idx, line) in labels_text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_tsv(line);
        let [id, label, category] = fields[..] else {
            return Err(Error::malformed(
                labels_path,
                lineno,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        };
        let category: Category = category
            .parse()
            .map_err(|e: Error| Error::malformed(labels_path, lineno, e.to_string()))?;
        builder
            .add_entity(id, label, category)
            .map_err(|e| Error::malformed(labels_path, lineno, e.to_string()))?;
    }

    let triples_text =
        fs::read_to_string(triples_path).map_err(|e| Error::io(triples_path, e))?;
    for (idx, line) in triples_text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = split_tsv(line);
        let [subject, relation_id, relation_label, kind, value] = fields[..] else {
            return Err(Error::malformed(
                triples_path,
                lineno,
                format!("expected 5 tab-separated fields, got {}", fields.len()),
            ));
        };
        let result = match kind {
            "entity" => builder.add_entity_triple(subject, relation_id, relation_label, value),
            "literal" => builder.add_literal_triple(subject, relation_id, relation_label, value),
            other => Err(Error::InvalidInput(format!(
                "object_kind must be \"entity\" or \"literal\", got {other:?}"
            ))),
        };
        result.map_err(|e| Error::malformed(triples_path, lineno, e.to_string()))?;
    }

    Ok(builder.build(policy))
}
