//! Deterministic skeleton revision over a (subject, relation) → object-set
//! fact memory, with an extractive copy baseline as fallback.
//!
//! The memory mirrors a key/value retrieval structure: one key per distinct
//! (subject, relation) pair in the document's subgraph, whose value is the
//! set of entity objects observed under that key. Masked slots are filled by
//! retrieving the top-K keys for the slot and ranking their value entities
//! with an interpretable score:
//!
//! ```text
//! score(e) = w_type     · [category(e) == slot category]
//!          + w_context  · overlap(relation ∪ object label words, mask context window)
//!          + w_salience · (subject mentions in source / all source mentions)
//! ```
//!
//! Every component is computable from the document and the KB alone, so a
//! revision run is a pure function of its inputs.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::Document;
use crate::error::Result;
use crate::kb::{Fact, FactObject, KnowledgeBase, KnowledgeSubgraph};
use crate::linker::{entity_set, link, AliasTable, Mention};
use crate::skeleton::{unmask, MaskSlot, SkeletonSummary};
use crate::types::{Category, EntityId, RelationId};

/// Tunables for candidate retrieval and scoring.
#[derive(Debug, Clone, PartialEq)]
pub struct RevisionConfig {
    /// Fact keys retained per mask (by best value score).
    pub top_k: usize,
    /// Weight of the slot-category match.
    pub w_type: f64,
    /// Weight of the context-window word overlap.
    pub w_context: f64,
    /// Weight of subject salience in the source.
    pub w_salience: f64,
    /// Whitespace tokens considered on each side of the mask.
    pub context_window: usize,
}

impl Default for RevisionConfig {
    fn default() -> Self {
        RevisionConfig {
            top_k: 16,
            w_type: 2.0,
            w_context: 1.0,
            w_salience: 0.5,
            context_window: 10,
        }
    }
}

impl RevisionConfig {
    /// Weights must be nonnegative with at least one positive; `top_k` ≥ 1.
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.top_k == 0 {
            return Err(Error::InvalidInput("top_k must be at least 1".into()));
        }
        let weights = [self.w_type, self.w_context, self.w_salience];
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidInput(
                "score weights must be finite and nonnegative".into(),
            ));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::InvalidInput("at least one score weight must be positive".into()));
        }
        Ok(())
    }
}

/// One entity value under a fact-memory key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueEntity {
    pub label: String,
    /// Category per the KB label table; `None` when the object entity id has
    /// no category there.
    pub category: Option<Category>,
}

/// All objects observed under one (subject, relation) key.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MemoryEntry {
    pub relation_label: String,
    /// Entity objects — the fillable candidates.
    pub values: BTreeMap<EntityId, ValueEntity>,
    /// Every contributing fact, including literal-object facts (which carry
    /// no fillable entity but remain part of the key's evidence).
    pub provenance: Vec<Fact>,
}

/// Key/value retrieval structure over a document's subgraph: one entry per
/// distinct (subject, relation), valued by its object-entity set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FactMemory {
    entries: BTreeMap<(EntityId, RelationId), MemoryEntry>,
}

impl FactMemory {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, subject: &EntityId, relation: &RelationId) -> Option<&MemoryEntry> {
        self.entries.get(&(subject.clone(), relation.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(EntityId, RelationId), &MemoryEntry)> {
        self.entries.iter()
    }
}

/// Group the subgraph's facts into a [`FactMemory`]: keys deduplicated,
/// entity objects as values, literal objects kept only as provenance.
pub fn build_fact_memory(kb: &KnowledgeBase, sub: &KnowledgeSubgraph) -> FactMemory {
    let mut entries: BTreeMap<(EntityId, RelationId), MemoryEntry> = BTreeMap::new();
    for fact in sub.facts() {
        let key = (fact.subject.clone(), fact.relation.id.clone());
        let entry = entries.entry(key).or_default();
        entry.relation_label = fact.relation.label.clone();
        if let FactObject::Entity { id, label } = &fact.object {
            entry.values.insert(
                id.clone(),
                ValueEntity { label: label.clone(), category: kb.category(id) },
            );
        }
        entry.provenance.push(fact.clone());
    }
    for entry in entries.values_mut() {
        entry.provenance.sort();
        entry.provenance.dedup();
    }
    FactMemory { entries }
}

/// One ranked fill candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredCandidate {
    pub entity: EntityId,
    pub label: String,
    pub score: f64,
    /// Facts from the retained keys whose object is this entity.
    pub supporting_facts: Vec<Fact>,
}

/// Lowercase a token and strip non-alphanumeric edges; used for context
/// overlap so punctuation never blocks a word match.
fn normalize_token(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

fn word_set(text: &str) -> BTreeSet<String> {
    text.split_whitespace()
        .map(normalize_token)
        .filter(|t| !t.is_empty())
        .collect()
}

/// The normalized words within `window` whitespace tokens on each side of
/// the slot's placeholder (the placeholder token itself excluded).
fn context_tokens(skeleton_text: &str, slot: &MaskSlot, window: usize) -> BTreeSet<String> {
    let placeholder = SkeletonSummary::placeholder(slot.category, slot.index);
    let tokens: Vec<&str> = skeleton_text.split_whitespace().collect();
    let Some(pos) = tokens.iter().position(|t| t.contains(&placeholder)) else {
        return BTreeSet::new();
    };
    let lo = pos.saturating_sub(window);
    let hi = (pos + window + 1).min(tokens.len());
    tokens[lo..hi]
        .iter()
        .enumerate()
        .filter(|(offset, _)| lo + offset != pos)
        .map(|(_, t)| normalize_token(t))
        .filter(|t| !t.is_empty())
        .collect()
}

struct SlotScorer<'a> {
    window: BTreeSet<String>,
    mention_counts: BTreeMap<&'a EntityId, usize>,
    total_mentions: usize,
    cfg: &'a RevisionConfig,
    slot_category: Category,
}

impl<'a> SlotScorer<'a> {
    fn new(
        slot: &MaskSlot,
        skeleton: &SkeletonSummary,
        source_mentions: &'a [Mention],
        cfg: &'a RevisionConfig,
    ) -> Self {
        let mut mention_counts: BTreeMap<&EntityId, usize> = BTreeMap::new();
        for m in source_mentions {
            *mention_counts.entry(&m.entity).or_insert(0) += 1;
        }
        SlotScorer {
            window: context_tokens(&skeleton.text, slot, cfg.context_window),
            mention_counts,
            total_mentions: source_mentions.len(),
            cfg,
            slot_category: slot.category,
        }
    }

    fn score(&self, subject: &EntityId, relation_label: &str, value: &ValueEntity) -> f64 {
        let type_score = if value.category == Some(self.slot_category) { 1.0 } else { 0.0 };

        let mut fact_words = word_set(relation_label);
        fact_words.extend(word_set(&value.label));
        let context_score = if fact_words.is_empty() {
            0.0
        } else {
            fact_words.intersection(&self.window).count() as f64 / fact_words.len() as f64
        };

        let salience = if self.total_mentions == 0 {
            0.0
        } else {
            *self.mention_counts.get(subject).unwrap_or(&0) as f64 / self.total_mentions as f64
        };

        self.cfg.w_type * type_score
            + self.cfg.w_context * context_score
            + self.cfg.w_salience * salience
    }
}

/// Rank fill candidates for one slot.
///
/// Keys whose subject is a linked source entity are scored by their best
/// value; the top `cfg.top_k` keys contribute their value entities, each
/// ranked by its best score with ties broken by ascending entity id. An
/// empty result means the memory offered nothing for this slot.
pub fn score_candidates(
    slot: &MaskSlot,
    skeleton: &SkeletonSummary,
    source_mentions: &[Mention],
    memory: &FactMemory,
    cfg: &RevisionConfig,
) -> Vec<ScoredCandidate> {
    let source_entities = entity_set(source_mentions);
    let scorer = SlotScorer::new(slot, skeleton, source_mentions, cfg);

    struct ScoredKey<'m> {
        entry: &'m MemoryEntry,
        scored_values: Vec<(&'m EntityId, &'m ValueEntity, f64)>,
        key_score: f64,
    }

    let mut keys: Vec<ScoredKey> = memory
        .iter()
        .filter(|((subject, _), entry)| {
            source_entities.contains(subject) && !entry.values.is_empty()
        })
        .map(|((subject, _), entry)| {
            let scored_values: Vec<(&EntityId, &ValueEntity, f64)> = entry
                .values
                .iter()
                .map(|(id, value)| (id, value, scorer.score(subject, &entry.relation_label, value)))
                .collect();
            let key_score = scored_values
                .iter()
                .map(|(_, _, s)| *s)
                .fold(f64::NEG_INFINITY, f64::max);
            ScoredKey { entry, scored_values, key_score }
        })
        .collect();
    // stable sort: equal key scores keep ascending key order
    keys.sort_by(|a, b| b.key_score.total_cmp(&a.key_score));
    keys.truncate(cfg.top_k);

    let mut best: BTreeMap<&EntityId, (f64, &ValueEntity)> = BTreeMap::new();
    for key in &keys {
        for (id, value, score) in &key.scored_values {
            match best.get_mut(id) {
                Some((existing, _)) if *existing >= *score => {}
                _ => {
                    best.insert(id, (*score, value));
                }
            }
        }
    }

    let mut ranked: Vec<ScoredCandidate> = best
        .into_iter()
        .map(|(id, (score, value))| {
            let mut supporting_facts: Vec<Fact> = keys
                .iter()
                .flat_map(|key| key.entry.provenance.iter())
                .filter(|fact| fact.object.entity_id() == Some(id))
                .cloned()
                .collect();
            supporting_facts.sort();
            supporting_facts.dedup();
            ScoredCandidate { entity: id.clone(), label: value.label.clone(), score, supporting_facts }
        })
        .collect();
    // ascending-id map order is the tie-break; stable sort preserves it
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    ranked
}

/// Extractive fallback: the most frequent source entity of the slot's
/// category; frequency ties go to the entity mentioned earliest.
pub fn copy_baseline(slot: &MaskSlot, source_mentions: &[Mention]) -> Option<EntityId> {
    let mut counts: BTreeMap<&EntityId, (usize, usize)> = BTreeMap::new();
    for mention in source_mentions {
        if mention.category != slot.category {
            continue;
        }
        let entry = counts.entry(&mention.entity).or_insert((0, mention.start));
        entry.0 += 1;
        entry.1 = entry.1.min(mention.start);
    }
    let mut ranked: Vec<(&EntityId, usize, usize)> =
        counts.into_iter().map(|(id, (count, first))| (id, count, first)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)).then(a.0.cmp(b.0)));
    ranked.first().map(|(id, _, _)| (*id).clone())
}

/// How a slot's fill was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillOrigin {
    /// Ranked first by the fact-memory scorer.
    Memory,
    /// No memory candidates; copied from the source.
    CopyBaseline,
    /// Nothing fillable anywhere; the original surface was kept.
    KeptOriginal,
}

/// Outcome for one slot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRevision {
    pub index: usize,
    pub chosen: EntityId,
    pub chosen_label: String,
    pub score: f64,
    pub origin: FillOrigin,
    pub supporting_facts: Vec<Fact>,
    /// Remaining candidates, ranked (score descending, entity id ascending).
    pub alternates: Vec<ScoredCandidate>,
}

/// A fully revised summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevisionResult {
    pub final_text: String,
    pub slots: Vec<SlotRevision>,
}

/// Fill every slot of `skeleton` for `doc`: retrieve and rank from the k-hop
/// fact memory, fall back to the copy baseline, and keep the original
/// surface only when both fail. Fills are canonical labels; the final text
/// is the unmasked skeleton.
pub fn revise(
    kb: &KnowledgeBase,
    aliases: &AliasTable,
    doc: &Document,
    skeleton: &SkeletonSummary,
    cfg: &RevisionConfig,
    hops: u32,
) -> Result<RevisionResult> {
    cfg.validate()?;
    let source_mentions = link(&doc.source, aliases);
    let source_entities = entity_set(&source_mentions);
    let sub = kb.subgraph(&source_entities, hops);
    let memory = build_fact_memory(kb, &sub);

    let mut fills: BTreeMap<usize, String> = BTreeMap::new();
    let mut slots = Vec::new();
    for slot in &skeleton.slots {
        let mut ranking = score_candidates(slot, skeleton, &source_mentions, &memory, cfg);
        let revision = if !ranking.is_empty() {
            let top = ranking.remove(0);
            SlotRevision {
                index: slot.index,
                chosen: top.entity,
                chosen_label: top.label,
                score: top.score,
                origin: FillOrigin::Memory,
                supporting_facts: top.supporting_facts,
                alternates: ranking,
            }
        } else if let Some(entity) = copy_baseline(slot, &source_mentions) {
            let label = kb
                .label(&entity)
                .map(str::to_string)
                .or_else(|| {
                    source_mentions
                        .iter()
                        .find(|m| m.entity == entity)
                        .map(|m| m.surface.clone())
                })
                .unwrap_or_else(|| entity.as_str().to_string());
            SlotRevision {
                index: slot.index,
                chosen: entity,
                chosen_label: label,
                score: 0.0,
                origin: FillOrigin::CopyBaseline,
                supporting_facts: Vec::new(),
                alternates: Vec::new(),
            }
        } else {
            SlotRevision {
                index: slot.index,
                chosen: slot.original.entity.clone(),
                chosen_label: slot.original.surface.clone(),
                score: 0.0,
                origin: FillOrigin::KeptOriginal,
                supporting_facts: Vec::new(),
                alternates: Vec::new(),
            }
        };
        fills.insert(slot.index, revision.chosen_label.clone());
        slots.push(revision);
    }

    let final_text = unmask(skeleton, &fills)?;
    Ok(RevisionResult { final_text, slots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{KbBuilder, MissingObjectPolicy};
    use crate::skeleton::mask_entities;

    fn table_kb() -> KnowledgeBase {
        let mut b = KbBuilder::new();
        b.add_entity("Q_plasgran", "Plasgran", Category::Organization).unwrap();
        b.add_entity("Q_wimblington", "Wimblington", Category::Location).unwrap();
        b.add_entity("Q_plastic_recycling", "plastic recycling", Category::Other).unwrap();
        b.add_entity("Q_cambridgeshire", "Cambridgeshire", Category::Location).unwrap();
        b.add_entity_triple("Q_plasgran", "P_industry", "industry", "Q_plastic_recycling").unwrap();
        b.add_entity_triple("Q_wimblington", "P_county", "historic county", "Q_cambridgeshire").unwrap();
        b.add_literal_triple("Q_wimblington", "P_aka", "also known as", "Wimblington, Cambridgeshire").unwrap();
        b.build(MissingObjectPolicy::RejectLine).0
    }

    fn table_aliases() -> AliasTable {
        let mut t = AliasTable::new();
        t.insert("Plasgran", "Q_plasgran", Category::Organization, 0).unwrap();
        t.insert("Wimblington", "Q_wimblington", Category::Location, 0).unwrap();
        t.insert("Cambridgeshire", "Q_cambridgeshire", Category::Location, 0).unwrap();
        t.insert("Oxfordshire", "Q_oxfordshire", Category::Location, 0).unwrap();
        t.insert("plastic recycling", "Q_plastic_recycling", Category::Other, 0).unwrap();
        t
    }

    const SOURCE: &str = "A fire crew remains at Plasgran in Manea Road, Wimblington.";
    const CANDIDATE: &str =
        "A large fire has broken out at a recycling centre in Oxfordshire, the fire service has said.";

    fn location_skeleton(text: &str) -> SkeletonSummary {
        mask_entities(text, &table_aliases(), &BTreeSet::from([Category::Location]))
    }

    fn table_memory(kb: &KnowledgeBase) -> FactMemory {
        let seeds: BTreeSet<EntityId> =
            [EntityId::new("Q_plasgran"), EntityId::new("Q_wimblington")].into();
        build_fact_memory(kb, &kb.subgraph(&seeds, 1))
    }

    #[test]
    fn empty_subgraph_builds_an_empty_memory() {
        let kb = table_kb();
        let memory = build_fact_memory(&kb, &kb.subgraph(&BTreeSet::new(), 2));
        assert!(memory.is_empty());
    }

    #[test]
    fn memory_groups_facts_by_subject_relation_key() {
        let kb = table_kb();
        let memory = table_memory(&kb);
        assert_eq!(memory.len(), 3);
        let entry = memory
            .entry(&EntityId::new("Q_wimblington"), &RelationId::new("P_county"))
            .unwrap();
        assert_eq!(entry.relation_label, "historic county");
        assert_eq!(entry.values.len(), 1);
        assert!(entry.values.contains_key(&EntityId::new("Q_cambridgeshire")));
        assert_eq!(
            entry.values[&EntityId::new("Q_cambridgeshire")].category,
            Some(Category::Location)
        );
    }

    #[test]
    fn literal_objects_are_provenance_but_not_values() {
        let kb = table_kb();
        let memory = table_memory(&kb);
        let entry = memory
            .entry(&EntityId::new("Q_wimblington"), &RelationId::new("P_aka"))
            .unwrap();
        assert!(entry.values.is_empty());
        assert_eq!(entry.provenance.len(), 1);
        assert!(matches!(entry.provenance[0].object, FactObject::Literal { .. }));
    }

    #[test]
    fn memory_keys_and_values_match_a_brute_force_group_by() {
        let mut b = KbBuilder::new();
        for (id, label) in [("Q_x", "X"), ("Q_y", "Y"), ("Q_z", "Z")] {
            b.add_entity(id, label, Category::Other).unwrap();
        }
        b.add_entity_triple("Q_x", "P1", "r1", "Q_y").unwrap();
        b.add_entity_triple("Q_x", "P1", "r1", "Q_z").unwrap();
        b.add_entity_triple("Q_x", "P2", "r2", "Q_y").unwrap();
        let kb = b.build(MissingObjectPolicy::RejectLine).0;
        let seeds: BTreeSet<EntityId> = [EntityId::new("Q_x")].into();
        let sub = kb.subgraph(&seeds, 1);
        let memory = build_fact_memory(&kb, &sub);

        let mut expected: BTreeMap<(EntityId, RelationId), BTreeSet<EntityId>> = BTreeMap::new();
        for fact in sub.facts() {
            if let Some(id) = fact.object.entity_id() {
                expected
                    .entry((fact.subject.clone(), fact.relation.id.clone()))
                    .or_default()
                    .insert(id.clone());
            }
        }
        assert_eq!(memory.len(), expected.len());
        for (key, objects) in expected {
            let entry = memory.entry(&key.0, &key.1).unwrap();
            let got: BTreeSet<EntityId> = entry.values.keys().cloned().collect();
            assert_eq!(got, objects);
        }
    }

    #[test]
    fn single_matching_candidate_scores_at_least_w_type() {
        let mut b = KbBuilder::new();
        b.add_entity("Q_s", "Source Town", Category::Location).unwrap();
        b.add_entity("Q_o", "Object City", Category::Location).unwrap();
        b.add_entity_triple("Q_s", "P1", "twinned with", "Q_o").unwrap();
        let kb = b.build(MissingObjectPolicy::RejectLine).0;
        let mut aliases = AliasTable::new();
        aliases.insert("Source Town", "Q_s", Category::Location, 0).unwrap();
        aliases.insert("Object City", "Q_o", Category::Location, 0).unwrap();

        let source_mentions = link("About Source Town.", &aliases);
        let skeleton = mask_entities("News from Object City.", &aliases, &BTreeSet::from([Category::Location]));
        let memory = build_fact_memory(&kb, &kb.subgraph(&entity_set(&source_mentions), 1));
        let cfg = RevisionConfig::default();
        let ranking = score_candidates(&skeleton.slots[0], &skeleton, &source_mentions, &memory, &cfg);
        assert_eq!(ranking.len(), 1);
        assert_eq!(ranking[0].entity, EntityId::new("Q_o"));
        assert!(ranking[0].score >= cfg.w_type);
    }

    #[test]
    fn location_slot_ranks_cambridgeshire_over_plastic_recycling() {
        let kb = table_kb();
        let aliases = table_aliases();
        let source_mentions = link(SOURCE, &aliases);
        assert_eq!(source_mentions.len(), 2);
        let skeleton = location_skeleton(CANDIDATE);
        assert_eq!(skeleton.slots.len(), 1);
        let memory = table_memory(&kb);
        let cfg = RevisionConfig::default();
        let ranking =
            score_candidates(&skeleton.slots[0], &skeleton, &source_mentions, &memory, &cfg);
        assert_eq!(ranking.len(), 2);
        assert_eq!(ranking[0].entity, EntityId::new("Q_cambridgeshire"));
        // type match (2.0) + no context overlap + salience 1/2 · 0.5
        assert!((ranking[0].score - 2.25).abs() < 1e-12, "score {}", ranking[0].score);
        assert_eq!(ranking[1].entity, EntityId::new("Q_plastic_recycling"));
        // no type match + "recycling" is 1 of 3 fact words + salience 0.25
        assert!((ranking[1].score - (1.0 / 3.0 + 0.25)).abs() < 1e-12, "score {}", ranking[1].score);
        assert_eq!(ranking[0].supporting_facts.len(), 1);
        assert_eq!(ranking[0].supporting_facts[0].relation.label, "historic county");
    }

    #[test]
    fn ranking_matches_brute_force_rescoring() {
        let kb = table_kb();
        let aliases = table_aliases();
        let source_mentions = link(SOURCE, &aliases);
        let skeleton = location_skeleton(CANDIDATE);
        let memory = table_memory(&kb);
        let cfg = RevisionConfig::default();
        let ranking =
            score_candidates(&skeleton.slots[0], &skeleton, &source_mentions, &memory, &cfg);
        for pair in ranking.windows(2) {
            assert!(
                pair[0].score > pair[1].score
                    || (pair[0].score == pair[1].score && pair[0].entity < pair[1].entity)
            );
        }
    }

    #[test]
    fn top_k_truncation_limits_contributing_keys() {
        let mut b = KbBuilder::new();
        b.add_entity("Q_s", "Town", Category::Location).unwrap();
        b.add_entity("Q_match", "Match City", Category::Location).unwrap();
        b.add_entity("Q_other", "Something Else", Category::Other).unwrap();
        // key 1 carries the category-matching (higher-scoring) value
        b.add_entity_triple("Q_s", "P1", "near", "Q_match").unwrap();
        // key 2 carries a mismatching value
        b.add_entity_triple("Q_s", "P2", "industry", "Q_other").unwrap();
        let kb = b.build(MissingObjectPolicy::RejectLine).0;
        let mut aliases = AliasTable::new();
        aliases.insert("Town", "Q_s", Category::Location, 0).unwrap();
        aliases.insert("Match City", "Q_match", Category::Location, 0).unwrap();
        let source_mentions = link("Around Town.", &aliases);
        let skeleton = mask_entities("Visit Match City.", &aliases, &BTreeSet::from([Category::Location]));
        let memory = build_fact_memory(&kb, &kb.subgraph(&entity_set(&source_mentions), 1));

        let cfg = RevisionConfig { top_k: 1, ..RevisionConfig::default() };
        let ranking = score_candidates(&skeleton.slots[0], &skeleton, &source_mentions, &memory, &cfg);
        // only the best key survives, so only its value is a candidate
        assert_eq!(ranking.len(), 1);
        assert_eq!(ranking[0].entity, EntityId::new("Q_match"));
    }

    #[test]
    fn raising_w_type_never_demotes_a_category_match() {
        let kb = table_kb();
        let aliases = table_aliases();
        let source_mentions = link(SOURCE, &aliases);
        let skeleton = location_skeleton(CANDIDATE);
        let memory = table_memory(&kb);
        for w_type in [2.0, 4.0, 8.0, 100.0] {
            let cfg = RevisionConfig { w_type, ..RevisionConfig::default() };
            let ranking =
                score_candidates(&skeleton.slots[0], &skeleton, &source_mentions, &memory, &cfg);
            assert_eq!(ranking[0].entity, EntityId::new("Q_cambridgeshire"));
        }
    }

    #[test]
    fn copy_baseline_picks_most_frequent_then_earliest() {
        let mut aliases = AliasTable::new();
        aliases.insert("Paris", "Q_paris", Category::Location, 0).unwrap();
        aliases.insert("London", "Q_london", Category::Location, 0).unwrap();
        aliases.insert("Bob", "Q_bob", Category::Person, 0).unwrap();
        let skeleton = {
            let mut t = AliasTable::new();
            t.insert("Rome", "Q_rome", Category::Location, 0).unwrap();
            mask_entities("Visit Rome", &t, &BTreeSet::from([Category::Location]))
        };
        let slot = &skeleton.slots[0];

        // London twice beats Paris once
        let mentions = link("Paris then London then London", &aliases);
        assert_eq!(copy_baseline(slot, &mentions), Some(EntityId::new("Q_london")));

        // tie: each once; Paris mentioned first
        let mentions = link("Paris and London", &aliases);
        assert_eq!(copy_baseline(slot, &mentions), Some(EntityId::new("Q_paris")));

        // no location in source
        let mentions = link("Bob speaks", &aliases);
        assert_eq!(copy_baseline(slot, &mentions), None);
    }

    #[test]
    fn revise_fills_the_location_slot_with_cambridgeshire() {
        let kb = table_kb();
        let aliases = table_aliases();
        let doc = Document {
            id: "t1".into(),
            source: SOURCE.into(),
            target: "Fire crews remain at a plastics factory in Cambridgeshire.".into(),
            candidate: Some(CANDIDATE.into()),
        };
        let skeleton = location_skeleton(CANDIDATE);
        let result =
            revise(&kb, &aliases, &doc, &skeleton, &RevisionConfig::default(), 1).unwrap();
        assert_eq!(
            result.final_text,
            "A large fire has broken out at a recycling centre in Cambridgeshire, the fire service has said."
        );
        assert_eq!(result.slots.len(), 1);
        assert_eq!(result.slots[0].chosen, EntityId::new("Q_cambridgeshire"));
        assert_eq!(result.slots[0].origin, FillOrigin::Memory);
        assert_eq!(result.slots[0].alternates.len(), 1);

        // determinism: identical inputs give identical results
        let again =
            revise(&kb, &aliases, &doc, &skeleton, &RevisionConfig::default(), 1).unwrap();
        assert_eq!(result, again);
    }

    #[test]
    fn zero_slot_skeleton_revises_to_itself() {
        let kb = table_kb();
        let aliases = table_aliases();
        let doc = Document {
            id: "t".into(),
            source: "no entities".into(),
            target: "none".into(),
            candidate: Some("still none".into()),
        };
        let skeleton = location_skeleton("still none");
        assert!(skeleton.slots.is_empty());
        let result = revise(&kb, &aliases, &doc, &skeleton, &RevisionConfig::default(), 1).unwrap();
        assert_eq!(result.final_text, "still none");
        assert!(result.slots.is_empty());
    }

    #[test]
    fn empty_memory_falls_back_to_the_copy_baseline() {
        // KB with no facts at all: memory is empty, source has a location
        let mut b = KbBuilder::new();
        b.add_entity("Q_wimblington", "Wimblington", Category::Location).unwrap();
        let kb = b.build(MissingObjectPolicy::RejectLine).0;
        let aliases = table_aliases();
        let doc = Document {
            id: "t".into(),
            source: "A fire in Wimblington today.".into(),
            target: "t".into(),
            candidate: Some("Blaze hits Oxfordshire.".into()),
        };
        let skeleton = location_skeleton("Blaze hits Oxfordshire.");
        let result = revise(&kb, &aliases, &doc, &skeleton, &RevisionConfig::default(), 1).unwrap();
        assert_eq!(result.slots[0].origin, FillOrigin::CopyBaseline);
        assert_eq!(result.slots[0].chosen, EntityId::new("Q_wimblington"));
        assert_eq!(result.final_text, "Blaze hits Wimblington.");
    }

    #[test]
    fn with_nothing_fillable_the_original_surface_is_kept() {
        let mut b = KbBuilder::new();
        b.add_entity("Q_bob", "Bob", Category::Person).unwrap();
        let kb = b.build(MissingObjectPolicy::RejectLine).0;
        let aliases = table_aliases();
        let doc = Document {
            id: "t".into(),
            source: "nothing linkable".into(),
            target: "t".into(),
            candidate: Some("Fire in Oxfordshire.".into()),
        };
        let skeleton = location_skeleton("Fire in Oxfordshire.");
        let result = revise(&kb, &aliases, &doc, &skeleton, &RevisionConfig::default(), 1).unwrap();
        assert_eq!(result.slots[0].origin, FillOrigin::KeptOriginal);
        assert_eq!(result.final_text, "Fire in Oxfordshire.");
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(RevisionConfig { top_k: 0, ..RevisionConfig::default() }.validate().is_err());
        assert!(RevisionConfig { w_type: -1.0, ..RevisionConfig::default() }.validate().is_err());
        assert!(RevisionConfig {
            w_type: 0.0,
            w_context: 0.0,
            w_salience: 0.0,
            ..RevisionConfig::default()
        }
        .validate()
        .is_err());
        assert!(RevisionConfig::default().validate().is_ok());
    }
}
