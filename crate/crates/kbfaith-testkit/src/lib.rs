//! Test-only companions to `kbfaith`: seeded random input generators and
//! deliberately naive reference implementations ("oracles").
//!
//! The oracles share no code with the library paths they check — the
//! subgraph oracle scans the whole fact list per level instead of using the
//! subject index, the ROUGE oracle matches sorted token vectors instead of
//! hash counting, and linker expectations are produced *by construction*
//! (mentions planted at known byte offsets) rather than by a second matcher.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::Rng;

use kbfaith::{
    AliasTable, Category, EntityId, Fact, KbBuilder, KnowledgeBase, MissingObjectPolicy,
};

/// Generators for random KBs, alias worlds, texts, and id sets.
pub mod gen {
    use super::*;

    const WORDS: &[&str] = &[
        "river", "north", "mill", "harbor", "green", "stone", "valley", "bridge", "old", "new",
        "grand", "park", "union", "west", "lake", "summit", "iron", "gold", "creek", "plains",
        "royal", "church", "market", "tower",
    ];

    fn words(rng: &mut impl Rng, min: usize, max: usize) -> String {
        let n = rng.gen_range(min..=max);
        (0..n)
            .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn random_category(rng: &mut impl Rng) -> Category {
        Category::ALL[rng.gen_range(0..Category::ALL.len())]
    }

    /// A random KB with up to `max_entities` entities and `max_facts`
    /// attempted triples (duplicates collapse), mixing entity and literal
    /// objects.
    pub fn random_kb(rng: &mut impl Rng, max_entities: usize, max_facts: usize) -> KnowledgeBase {
        let n_entities = rng.gen_range(1..=max_entities.max(1));
        let mut builder = KbBuilder::new();
        for i in 0..n_entities {
            builder
                .add_entity(format!("E{i}"), format!("{} {i}", words(rng, 1, 2)), random_category(rng))
                .unwrap();
        }
        let n_relations = rng.gen_range(1..=12usize);
        let relations: Vec<(String, String)> = (0..n_relations)
            .map(|j| (format!("R{j}"), format!("{} {j}", words(rng, 1, 2))))
            .collect();
        let n_facts = rng.gen_range(0..=max_facts);
        for _ in 0..n_facts {
            let subject = format!("E{}", rng.gen_range(0..n_entities));
            let (rid, rlabel) = &relations[rng.gen_range(0..n_relations)];
            if rng.gen_bool(0.85) {
                let object = format!("E{}", rng.gen_range(0..n_entities));
                builder.add_entity_triple(subject, rid, rlabel, object).unwrap();
            } else {
                builder.add_literal_triple(subject, rid, rlabel, words(rng, 1, 4)).unwrap();
            }
        }
        builder.build(MissingObjectPolicy::RejectLine).0
    }

    /// A random seed set of entities actually present in the KB.
    pub fn random_seeds(rng: &mut impl Rng, kb: &KnowledgeBase, max: usize) -> BTreeSet<EntityId> {
        let ids: Vec<&EntityId> = kb.entity_ids().collect();
        if ids.is_empty() {
            return BTreeSet::new();
        }
        let n = rng.gen_range(1..=max.min(ids.len()));
        (0..n).map(|_| ids[rng.gen_range(0..ids.len())].clone()).collect()
    }

    /// A random set of entity ids drawn from `Q0..Q{universe}`.
    pub fn random_id_set(rng: &mut impl Rng, universe: usize, max_size: usize) -> BTreeSet<EntityId> {
        let size = rng.gen_range(0..=max_size);
        (0..size)
            .map(|_| EntityId::new(format!("Q{}", rng.gen_range(0..universe))))
            .collect()
    }

    /// An alias table whose surfaces are built from a per-entity word
    /// alphabet, so no surface can accidentally contain or extend another
    /// entity's surface.
    pub struct AliasWorld {
        pub table: AliasTable,
        /// Every registered (surface, entity, category) row, plantable into
        /// generated text.
        pub surfaces: Vec<(String, EntityId, Category)>,
    }

    pub fn alias_world(rng: &mut impl Rng, n_entities: usize) -> AliasWorld {
        let mut table = AliasTable::new();
        let mut surfaces = Vec::new();
        for i in 0..n_entities {
            let entity = EntityId::new(format!("E{i}"));
            let category = random_category(rng);
            let n_surfaces = rng.gen_range(1..=3usize);
            for s in 0..n_surfaces {
                let n_words = rng.gen_range(1..=2usize);
                let surface: String = (0..n_words)
                    .map(|w| format!("ali{i}x{s}x{w}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                table.insert(&surface, entity.as_str(), category, 0).unwrap();
                surfaces.push((surface, entity.clone(), category));
            }
        }
        AliasWorld { table, surfaces }
    }

    /// A generated text with mentions planted at known byte offsets — the
    /// ground truth for linker and mask round-trip tests.
    pub struct PlantedText {
        pub text: String,
        /// (start byte, end byte, entity, category) per planted mention, in
        /// text order.
        pub mentions: Vec<(usize, usize, EntityId, Category)>,
    }

    fn perturb_case(rng: &mut impl Rng, s: &str) -> String {
        s.chars()
            .map(|c| if rng.gen_bool(0.5) { c.to_ascii_uppercase() } else { c })
            .collect()
    }

    /// Build a text of filler words and planted alias mentions. Consecutive
    /// mentions are always separated by at least one filler so the planted
    /// list is exactly what a longest-match linker must find.
    pub fn planted_text(rng: &mut impl Rng, world: &AliasWorld, max_items: usize) -> PlantedText {
        let mut text = String::new();
        let mut mentions = Vec::new();
        let n_items = rng.gen_range(0..=max_items);
        let mut last_was_mention = false;
        for _ in 0..n_items {
            if !text.is_empty() {
                text.push(' ');
                if rng.gen_bool(0.15) {
                    text.push(' ');
                }
            }
            let plant = !world.surfaces.is_empty() && !last_was_mention && rng.gen_bool(0.4);
            if plant {
                let (surface, entity, category) =
                    &world.surfaces[rng.gen_range(0..world.surfaces.len())];
                let rendered = perturb_case(rng, surface);
                let start = text.len();
                text.push_str(&rendered);
                mentions.push((start, text.len(), entity.clone(), *category));
                last_was_mention = true;
            } else {
                text.push_str(&format!("flr{}", rng.gen_range(0..50)));
                last_was_mention = false;
            }
            if rng.gen_bool(0.2) {
                text.push(if rng.gen_bool(0.5) { ',' } else { '.' });
            }
        }
        PlantedText { text, mentions }
    }

    /// Plain filler text with no linkable mentions.
    pub fn filler_text(rng: &mut impl Rng, max_words: usize) -> String {
        let n = rng.gen_range(0..=max_words);
        (0..n)
            .map(|_| format!("flr{}", rng.gen_range(0..50)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Brute-force reference implementations.
pub mod oracle {
    use super::*;

    /// Injective comparison key for a fact within one KB.
    pub type FactKey = (String, String, String);

    pub fn fact_key(fact: &Fact) -> FactKey {
        let object = match fact.object.entity_id() {
            Some(id) => format!("E:{id}"),
            None => format!("L:{}", fact.object.surface()),
        };
        (
            fact.subject.as_str().to_string(),
            fact.relation.id.as_str().to_string(),
            object,
        )
    }

    /// Level-by-level BFS that rescans the whole fact list at every level —
    /// no subject index, no shared traversal code. Returns (fact → minimal
    /// hop, entity → minimal hop).
    pub fn subgraph(
        kb: &KnowledgeBase,
        seeds: &BTreeSet<EntityId>,
        hops: u32,
    ) -> (BTreeMap<FactKey, u32>, BTreeMap<EntityId, u32>) {
        let mut dist: BTreeMap<EntityId, u32> = seeds.iter().map(|s| (s.clone(), 0)).collect();
        for level in 1..=hops {
            let mut discovered: Vec<EntityId> = Vec::new();
            for fact in kb.facts() {
                if dist.get(&fact.subject) == Some(&(level - 1)) {
                    if let Some(object) = fact.object.entity_id() {
                        if !dist.contains_key(object) {
                            discovered.push(object.clone());
                        }
                    }
                }
            }
            for entity in discovered {
                dist.entry(entity).or_insert(level);
            }
        }
        let mut facts = BTreeMap::new();
        for fact in kb.facts() {
            if let Some(d) = dist.get(&fact.subject) {
                if *d < hops {
                    facts.insert(fact_key(fact), d + 1);
                }
            }
        }
        (facts, dist)
    }

    /// Quadratic set-intersection count (no set operations).
    pub fn intersection_count(a: &BTreeSet<EntityId>, b: &BTreeSet<EntityId>) -> usize {
        a.iter().filter(|x| b.iter().any(|y| y == *x)).count()
    }

    /// Whitespace token count via manual splitting.
    pub fn token_count(text: &str) -> usize {
        text.split(char::is_whitespace).filter(|t| !t.is_empty()).count()
    }

    /// Clipped-unigram ROUGE-1 via sorted-vector matching (two-pointer walk
    /// rather than hash counting). Returns (precision, recall, f1), or
    /// `None` when the reference has no tokens.
    pub fn rouge1(candidate: &str, reference: &str) -> Option<(f64, f64, f64)> {
        let mut cand: Vec<String> =
            candidate.split_whitespace().map(str::to_lowercase).collect();
        let mut reference: Vec<String> =
            reference.split_whitespace().map(str::to_lowercase).collect();
        if reference.is_empty() {
            return None;
        }
        cand.sort();
        reference.sort();
        let (mut i, mut j, mut matched) = (0usize, 0usize, 0usize);
        while i < cand.len() && j < reference.len() {
            match cand[i].cmp(&reference[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    matched += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        let precision = if cand.is_empty() { 0.0 } else { matched as f64 / cand.len() as f64 };
        let recall = matched as f64 / reference.len() as f64;
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Some((precision, recall, f1))
    }
}
