//! Fact linearization, budgeted source augmentation, and the random-words /
//! random-facts control baselines.
//!
//! Facts become delimited strings — `[SEP] subject relation object ` repeated
//! and closed by a final `[SEP]` — which are appended to the source text
//! under a whitespace-token budget, pruning at whole-fact granularity.
//!
//! The budget counts whitespace-delimited words rather than model subwords:
//! subword counts are tokenizer-specific, and whole words keep the artifact
//! model-free and the arithmetic exact.

use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kb::{Fact, FactObject, KnowledgeBase, KnowledgeSubgraph};
use crate::linker::normalize;
use crate::types::Category;

/// The default fact delimiter. Entity labels, relation labels, and literals
/// containing this substring are rejected at KB load so linearized strings
/// split unambiguously.
pub const SEPARATOR: &str = "[SEP]";

/// How facts are ordered before budget pruning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactOrdering {
    /// Facts whose subject label occurs earlier in the source come first;
    /// subjects never mentioned sort last. Ties keep subgraph order
    /// (hop, then fact). This favors source-salient facts when pruning.
    #[default]
    SubjectMentionOrder,
    /// Order by (subject label, relation label, object surface).
    Lexicographic,
}

/// Configuration for [`augment_source`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationConfig {
    /// Whitespace-token budget for the whole augmented string.
    pub budget_tokens: usize,
    pub separator: String,
    /// When set, keep only facts whose object is an entity of this category.
    pub category_filter: Option<Category>,
    pub ordering: FactOrdering,
}

impl Default for LinearizationConfig {
    fn default() -> Self {
        LinearizationConfig {
            budget_tokens: 1024,
            separator: SEPARATOR.to_string(),
            category_filter: None,
            ordering: FactOrdering::default(),
        }
    }
}

/// Whitespace-token count — the unit of every budget in this module.
pub fn token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Linearize facts with a custom separator: `<sep> s r o <sep> s r o <sep>`.
/// An empty fact list yields the bare separator.
pub fn linearize_with(kb: &KnowledgeBase, facts: &[Fact], separator: &str) -> String {
    let mut out = String::from(separator);
    for fact in facts {
        let [s, r, o] = fact.label_triple(kb);
        out.push(' ');
        out.push_str(&s);
        out.push(' ');
        out.push_str(&r);
        out.push(' ');
        out.push_str(&o);
        out.push(' ');
        out.push_str(separator);
    }
    out
}

/// Linearize facts with the default separator.
pub fn linearize(kb: &KnowledgeBase, facts: &[Fact]) -> String {
    linearize_with(kb, facts, SEPARATOR)
}

/// Result of [`augment_source`]: the augmented text plus what the budget did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentResult {
    pub text: String,
    /// Facts that made it into the output.
    pub facts_used: usize,
    /// Facts dropped by the category filter or the token budget.
    pub pruned: usize,
    /// True when the source alone exceeded the budget and was cut to fit;
    /// no facts are appended in that case.
    pub source_truncated: bool,
}

fn fact_token_cost(kb: &KnowledgeBase, fact: &Fact) -> usize {
    let [s, r, o] = fact.label_triple(kb);
    // one trailing separator per fact
    token_count(&s) + token_count(&r) + token_count(&o) + 1
}

/// Order subgraph facts for pruning per `ordering`, returning owned facts.
fn ordered_facts(
    kb: &KnowledgeBase,
    source: &str,
    sub: &KnowledgeSubgraph,
    ordering: FactOrdering,
) -> Vec<Fact> {
    let mut annotated: Vec<(Fact, u32)> = sub.annotated_facts().to_vec();
    match ordering {
        FactOrdering::SubjectMentionOrder => {
            let norm_source = normalize(source);
            // stable sort: ties keep (hop, fact) subgraph order
            annotated.sort_by_key(|(fact, _)| {
                kb.label(&fact.subject)
                    .and_then(|label| norm_source.find(&normalize(label)))
                    .unwrap_or(usize::MAX)
            });
        }
        FactOrdering::Lexicographic => {
            annotated.sort_by_key(|(fact, _)| fact.label_triple(kb));
        }
    }
    annotated.into_iter().map(|(fact, _)| fact).collect()
}

/// Append the subgraph's facts to the source as a linearized string, keeping
/// the longest fact prefix that fits the token budget.
///
/// When no fact fits (or none survives the category filter), the result is
/// the source unchanged; when the source alone exceeds the budget it is
/// truncated to `budget_tokens` words and flagged.
pub fn augment_source(
    kb: &KnowledgeBase,
    source: &str,
    sub: &KnowledgeSubgraph,
    cfg: &LinearizationConfig,
) -> AugmentResult {
    let candidates = ordered_facts(kb, source, sub, cfg.ordering);
    let total_candidates = candidates.len();
    let filtered: Vec<Fact> = match cfg.category_filter {
        None => candidates,
        Some(filter) => candidates
            .into_iter()
            .filter(|fact| match &fact.object {
                FactObject::Entity { id, .. } => kb.category(id) == Some(filter),
                FactObject::Literal { .. } => false,
            })
            .collect(),
    };

    let source_tokens = token_count(source);
    if source_tokens > cfg.budget_tokens {
        let truncated: Vec<&str> = source.split_whitespace().take(cfg.budget_tokens).collect();
        return AugmentResult {
            text: truncated.join(" "),
            facts_used: 0,
            pruned: total_candidates,
            source_truncated: true,
        };
    }

    // source + leading separator + per-fact (labels + trailing separator)
    let mut used = source_tokens + 1;
    let mut kept = 0;
    for fact in &filtered {
        let cost = fact_token_cost(kb, fact);
        if used + cost > cfg.budget_tokens {
            break;
        }
        used += cost;
        kept += 1;
    }

    if kept == 0 {
        return AugmentResult {
            text: source.to_string(),
            facts_used: 0,
            pruned: total_candidates,
            source_truncated: false,
        };
    }

    let linearized = linearize_with(kb, &filtered[..kept], &cfg.separator);
    let text = if source.is_empty() {
        linearized
    } else {
        format!("{source} {linearized}")
    };
    AugmentResult {
        text,
        facts_used: kept,
        pruned: total_candidates - kept,
        source_truncated: false,
    }
}

/// Sample `n` words uniformly with replacement from a vocabulary file (one
/// word per line; blank lines ignored), joined by single spaces.
/// Deterministic for a given seed.
pub fn random_words(n: usize, vocab_path: impl AsRef<Path>, seed: u64) -> Result<String> {
    let vocab_path = vocab_path.as_ref();
    let text = fs::read_to_string(vocab_path).map_err(|e| Error::io(vocab_path, e))?;
    let vocab: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .collect();
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary(vocab_path.to_path_buf()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::from(0..vocab.len());
    let words: Vec<&str> = (0..n).map(|_| vocab[dist.sample(&mut rng)]).collect();
    Ok(words.join(" "))
}

/// Sample `n` facts from the whole KB, uniformly without replacement (with
/// replacement only when `n` exceeds the pool). When `category` is set, the
/// pool is restricted to facts whose object is an entity of that category.
/// Deterministic for a given seed.
pub fn random_facts(
    kb: &KnowledgeBase,
    n: usize,
    category: Option<Category>,
    seed: u64,
) -> Result<Vec<Fact>> {
    random_facts_from(kb, kb.facts(), n, category, seed)
}

/// Sample `n` facts from an explicit pool under the same contract as
/// [`random_facts`] — used when the pool is narrower than the whole KB, for
/// example one document's subgraph facts.
pub fn random_facts_from(
    kb: &KnowledgeBase,
    pool: &[Fact],
    n: usize,
    category: Option<Category>,
    seed: u64,
) -> Result<Vec<Fact>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let pool: Vec<&Fact> = pool
        .iter()
        .filter(|fact| match category {
            None => true,
            Some(filter) => match &fact.object {
                FactObject::Entity { id, .. } => kb.category(id) == Some(filter),
                FactObject::Literal { .. } => false,
            },
        })
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptySamplePool);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<usize> = if n <= pool.len() {
        rand::seq::index::sample(&mut rng, pool.len(), n).into_vec()
    } else {
        let dist = Uniform::from(0..pool.len());
        (0..n).map(|_| dist.sample(&mut rng)).collect()
    };
    Ok(picks.into_iter().map(|i| pool[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{KbBuilder, MissingObjectPolicy};
    use crate::types::EntityId;
    use std::collections::BTreeSet;

    fn coveney_kb() -> KnowledgeBase {
        let mut b = KbBuilder::new();
        b.add_entity("Q_coveney", "Simon Coveney", Category::Person).unwrap();
        b.add_entity("Q_ireland", "Ireland", Category::Location).unwrap();
        b.add_entity("Q_taoiseach", "Taoiseach", Category::Other).unwrap();
        b.add_entity("Q_pm", "prime minister", Category::Other).unwrap();
        b.add_entity_triple("Q_coveney", "P_citizen", "country of citizen", "Q_ireland").unwrap();
        b.add_entity_triple("Q_taoiseach", "P_subclass", "subclass of", "Q_pm").unwrap();
        b.build(MissingObjectPolicy::RejectLine).0
    }

    fn coveney_facts(kb: &KnowledgeBase) -> Vec<Fact> {
        let mut facts = kb.facts_from(&EntityId::new("Q_coveney")).to_vec();
        facts.extend(kb.facts_from(&EntityId::new("Q_taoiseach")).to_vec());
        facts
    }

    #[test]
    fn linearize_produces_the_exact_delimited_format() {
        let kb = coveney_kb();
        let facts = coveney_facts(&kb);
        assert_eq!(
            linearize(&kb, &facts),
            "[SEP] Simon Coveney country of citizen Ireland [SEP] Taoiseach subclass of prime minister [SEP]"
        );
    }

    #[test]
    fn linearize_empty_list_is_a_bare_separator() {
        let kb = coveney_kb();
        assert_eq!(linearize(&kb, &[]), "[SEP]");
        assert_eq!(linearize_with(&kb, &[], "<F>"), "<F>");
    }

    #[test]
    fn splitting_on_the_separator_recovers_label_triples_in_order() {
        let kb = coveney_kb();
        let facts = coveney_facts(&kb);
        let lin = linearize(&kb, &facts);
        let segments: Vec<&str> = lin.split(SEPARATOR).collect();
        assert_eq!(segments.first(), Some(&""));
        assert_eq!(segments.last(), Some(&""));
        let middles = &segments[1..segments.len() - 1];
        assert_eq!(middles.len(), facts.len());
        for (segment, fact) in middles.iter().zip(&facts) {
            assert_eq!(segment.trim(), fact.label_triple(&kb).join(" "));
        }
    }

    #[test]
    fn linearized_token_count_matches_the_cost_model() {
        let kb = coveney_kb();
        let facts = coveney_facts(&kb);
        let expected: usize = 1 + facts.iter().map(|f| fact_token_cost(&kb, f)).sum::<usize>();
        assert_eq!(token_count(&linearize(&kb, &facts)), expected);
        assert_eq!(token_count(&linearize(&kb, &facts)), 14);
    }

    fn budget_kb() -> KnowledgeBase {
        let mut b = KbBuilder::new();
        b.add_entity("Q_s1", "alpha beta", Category::Other).unwrap();
        b.add_entity("Q_s2", "gamma", Category::Other).unwrap();
        b.add_entity("Q_o1", "obj one", Category::Other).unwrap();
        b.add_entity("Q_o2", "one two three", Category::Other).unwrap();
        // fact 1: 2 + 3 + 2 labels + 1 = 8 tokens; subject mentioned first in source
        b.add_entity_triple("Q_s1", "P_a", "rel one two", "Q_o1").unwrap();
        // fact 2: 1 + 2 + 3 labels + 1 = 7 tokens
        b.add_entity_triple("Q_s2", "P_b", "rel x", "Q_o2").unwrap();
        b.build(MissingObjectPolicy::RejectLine).0
    }

    #[test]
    fn budget_prunes_at_whole_fact_granularity() {
        let kb = budget_kb();
        let source = "alpha beta gamma"; // 3 tokens; both subjects mentioned, s1 first
        let seeds: BTreeSet<EntityId> = [EntityId::new("Q_s1"), EntityId::new("Q_s2")].into();
        let sub = kb.subgraph(&seeds, 1);

        // 3 (source) + 1 (leading sep) + 8 + 7 = 19 for both facts
        let all = augment_source(&kb, source, &sub, &LinearizationConfig {
            budget_tokens: 19,
            ..LinearizationConfig::default()
        });
        assert_eq!(all.facts_used, 2);
        assert_eq!(all.pruned, 0);
        assert_eq!(token_count(&all.text), 19);

        // source tokens + 9 fits exactly one fact (3 + 1 + 8 = 12)
        let one = augment_source(&kb, source, &sub, &LinearizationConfig {
            budget_tokens: 12,
            ..LinearizationConfig::default()
        });
        assert_eq!(one.facts_used, 1);
        assert_eq!(one.pruned, 1);
        assert_eq!(token_count(&one.text), 12);
        assert!(one.text.contains("alpha beta rel one two obj one"));
        assert!(!one.text.contains("rel x"));

        // no fact fits: source-only, nothing appended
        let none = augment_source(&kb, source, &sub, &LinearizationConfig {
            budget_tokens: 11,
            ..LinearizationConfig::default()
        });
        assert_eq!(none.facts_used, 0);
        assert_eq!(none.pruned, 2);
        assert_eq!(none.text, source);
        assert!(!none.source_truncated);
    }

    #[test]
    fn smaller_budget_output_is_a_fact_prefix_of_larger_budget_output() {
        let kb = budget_kb();
        let source = "alpha beta gamma";
        let seeds: BTreeSet<EntityId> = [EntityId::new("Q_s1"), EntityId::new("Q_s2")].into();
        let sub = kb.subgraph(&seeds, 1);
        let at = |budget| {
            augment_source(&kb, source, &sub, &LinearizationConfig {
                budget_tokens: budget,
                ..LinearizationConfig::default()
            })
        };
        let small = at(12);
        let large = at(100);
        assert!(large.text.starts_with(small.text.trim_end_matches(SEPARATOR)));
        assert!(small.facts_used <= large.facts_used);
    }

    #[test]
    fn oversized_source_is_truncated_and_flagged() {
        let kb = budget_kb();
        let seeds: BTreeSet<EntityId> = [EntityId::new("Q_s1")].into();
        let sub = kb.subgraph(&seeds, 1);
        let result = augment_source(&kb, "one two three four five", &sub, &LinearizationConfig {
            budget_tokens: 3,
            ..LinearizationConfig::default()
        });
        assert!(result.source_truncated);
        assert_eq!(result.text, "one two three");
        assert_eq!(result.facts_used, 0);
    }

    #[test]
    fn category_filter_keeps_only_facts_with_matching_object_category() {
        let mut b = KbBuilder::new();
        b.add_entity("Q_plasgran", "Plasgran", Category::Organization).unwrap();
        b.add_entity("Q_wimblington", "Wimblington", Category::Location).unwrap();
        b.add_entity("Q_plastic_recycling", "plastic recycling", Category::Other).unwrap();
        b.add_entity("Q_cambridgeshire", "Cambridgeshire", Category::Location).unwrap();
        b.add_entity_triple("Q_plasgran", "P_industry", "industry", "Q_plastic_recycling").unwrap();
        b.add_entity_triple("Q_wimblington", "P_county", "historic county", "Q_cambridgeshire").unwrap();
        b.add_literal_triple("Q_wimblington", "P_aka", "also known as", "Wimblington, Cambridgeshire").unwrap();
        let kb = b.build(MissingObjectPolicy::RejectLine).0;
        let seeds: BTreeSet<EntityId> =
            [EntityId::new("Q_plasgran"), EntityId::new("Q_wimblington")].into();
        let sub = kb.subgraph(&seeds, 1);
        let result = augment_source(&kb, "Fire at Plasgran in Wimblington", &sub, &LinearizationConfig {
            category_filter: Some(Category::Location),
            ..LinearizationConfig::default()
        });
        assert_eq!(result.facts_used, 1);
        assert!(result.text.contains("Wimblington historic county Cambridgeshire"));
        assert!(!result.text.contains("industry"));
        assert!(!result.text.contains("also known as"));
    }

    #[test]
    fn subject_mention_order_sorts_by_source_position() {
        let kb = budget_kb();
        let seeds: BTreeSet<EntityId> = [EntityId::new("Q_s1"), EntityId::new("Q_s2")].into();
        let sub = kb.subgraph(&seeds, 1);
        // gamma (Q_s2) now appears before alpha beta (Q_s1)
        let result = augment_source(&kb, "gamma then alpha beta", &sub, &LinearizationConfig::default());
        let gamma_pos = result.text.find("gamma rel x").unwrap();
        let alpha_pos = result.text.find("alpha beta rel one two").unwrap();
        assert!(gamma_pos < alpha_pos);
    }

    #[test]
    fn lexicographic_ordering_sorts_by_label_triple() {
        let kb = budget_kb();
        let seeds: BTreeSet<EntityId> = [EntityId::new("Q_s1"), EntityId::new("Q_s2")].into();
        let sub = kb.subgraph(&seeds, 1);
        // mention order says gamma first; lexicographic says alpha beta first
        let result = augment_source(&kb, "gamma then alpha beta", &sub, &LinearizationConfig {
            ordering: FactOrdering::Lexicographic,
            ..LinearizationConfig::default()
        });
        let gamma_pos = result.text.find("gamma rel x").unwrap();
        let alpha_pos = result.text.find("alpha beta rel one two").unwrap();
        assert!(alpha_pos < gamma_pos);
    }

    #[test]
    fn random_words_is_deterministic_and_respects_n() {
        let dir = tempfile::tempdir().unwrap();
        let vocab = dir.path().join("vocab.txt");
        std::fs::write(&vocab, "apple\nbanana\ncherry\n").unwrap();
        assert_eq!(random_words(0, &vocab, 7).unwrap(), "");
        let a = random_words(5, &vocab, 7).unwrap();
        let b = random_words(5, &vocab, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(token_count(&a), 5);
        for word in a.split_whitespace() {
            assert!(["apple", "banana", "cherry"].contains(&word));
        }
    }

    #[test]
    fn random_words_rejects_an_empty_vocabulary() {
        let dir = tempfile::tempdir().unwrap();
        let vocab = dir.path().join("vocab.txt");
        std::fs::write(&vocab, "\n  \n").unwrap();
        assert!(matches!(random_words(3, &vocab, 0), Err(Error::EmptyVocabulary(_))));
    }

    #[test]
    fn random_word_frequencies_are_near_uniform() {
        let dir = tempfile::tempdir().unwrap();
        let vocab_path = dir.path().join("vocab.txt");
        let words: Vec<String> = (0..100).map(|i| format!("w{i:02}")).collect();
        std::fs::write(&vocab_path, words.join("\n")).unwrap();
        let sample = random_words(10_000, &vocab_path, 42).unwrap();
        let mut counts = std::collections::HashMap::new();
        for w in sample.split_whitespace() {
            *counts.entry(w.to_string()).or_insert(0usize) += 1;
        }
        // expected 100 per word; σ ≈ 9.9 for Binomial(10000, 0.01). A ±4σ band
        // across 100 words keeps the chance of a spurious failure below 1%
        // while still catching any systematic bias in the sampler.
        for word in &words {
            let c = *counts.get(word).unwrap_or(&0);
            assert!((60..=140).contains(&c), "{word} drawn {c} times");
        }
    }

    #[test]
    fn random_facts_sampling_contract() {
        let kb = budget_kb();
        assert!(random_facts(&kb, 0, None, 1).unwrap().is_empty());

        let a = random_facts(&kb, 2, None, 9).unwrap();
        let b = random_facts(&kb, 2, None, 9).unwrap();
        assert_eq!(a, b);
        // without replacement when n <= pool: all distinct
        assert_ne!(a[0], a[1]);
        for fact in &a {
            assert!(kb.facts().contains(fact));
        }

        // with replacement when n exceeds the pool
        let many = random_facts(&kb, 5, None, 9).unwrap();
        assert_eq!(many.len(), 5);

        // category filter restricts the pool by object category
        let others = random_facts(&kb, 1, Some(Category::Other), 3).unwrap();
        assert_eq!(others.len(), 1);
        assert!(matches!(&others[0].object, FactObject::Entity { .. }));

        // empty pool after filter is an error
        assert!(matches!(
            random_facts(&kb, 1, Some(Category::Person), 3),
            Err(Error::EmptySamplePool)
        ));
    }

    #[test]
    fn random_facts_from_samples_only_the_given_pool() {
        let kb = budget_kb();
        let pool: Vec<Fact> = kb.facts()[..1].to_vec();

        // only the pool (not the whole KB) is eligible
        for seed in 0..10 {
            let picked = random_facts_from(&kb, &pool, 1, None, seed).unwrap();
            assert_eq!(picked, pool);
        }

        // n beyond the pool size resamples with replacement from the pool
        let many = random_facts_from(&kb, &pool, 3, None, 4).unwrap();
        assert_eq!(many, vec![pool[0].clone(), pool[0].clone(), pool[0].clone()]);

        // deterministic per seed, and the whole-KB sampler is the same
        // routine applied to kb.facts()
        assert_eq!(
            random_facts_from(&kb, kb.facts(), 2, None, 9).unwrap(),
            random_facts(&kb, 2, None, 9).unwrap()
        );

        // an empty pool is an error even when the KB has facts
        assert!(matches!(
            random_facts_from(&kb, &[], 1, None, 0),
            Err(Error::EmptySamplePool)
        ));
    }
}
