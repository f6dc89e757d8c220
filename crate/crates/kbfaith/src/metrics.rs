//! Entity-ID faithfulness metrics and ROUGE-1.
//!
//! Correctness matches predicted entity ids against the reference summary's
//! ids; consistency matches them against the source's ids (an extractiveness
//! measure — a prediction can be correct yet inconsistent when it names a
//! true entity the article never mentions). Matching is by canonical id, so
//! surface variants of one entity agree.
//!
//! Headline correctness/consistency are precision-oriented (denominator =
//! predicted set); a recall-oriented variant (denominator = reference side)
//! is reported alongside, since either orientation is defensible. Corpus
//! aggregation is micro (sum of matched over sum of totals) with a macro
//! mean alongside.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::corpus::Document;
use crate::coverage::split_entities;
use crate::error::Result;
use crate::kb::KnowledgeBase;
use crate::linker::{entity_set, link, AliasTable};
use crate::revision::{revise, FillOrigin, RevisionConfig};
use crate::skeleton::mask_entities;
use crate::types::{Category, EntityId};

/// A matched/total ratio. `value()` is `None` when the denominator is zero
/// (the score is undefined, not zero).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EntityScore {
    pub matched: usize,
    pub total: usize,
}

impl EntityScore {
    pub fn new(matched: usize, total: usize) -> Self {
        debug_assert!(matched <= total);
        EntityScore { matched, total }
    }

    pub fn value(&self) -> Option<f64> {
        (self.total > 0).then(|| self.matched as f64 / self.total as f64)
    }

    pub fn is_defined(&self) -> bool {
        self.total > 0
    }

    pub fn add(&mut self, other: EntityScore) {
        self.matched += other.matched;
        self.total += other.total;
    }
}

impl Serialize for EntityScore {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EntityScore", 3)?;
        s.serialize_field("matched", &self.matched)?;
        s.serialize_field("total", &self.total)?;
        s.serialize_field("value", &self.value())?;
        s.end()
    }
}

/// Precision-oriented correctness: share of predicted ids found in the
/// target set.
pub fn entity_correctness(
    predicted: &BTreeSet<EntityId>,
    target: &BTreeSet<EntityId>,
) -> EntityScore {
    EntityScore::new(predicted.intersection(target).count(), predicted.len())
}

/// Recall-oriented correctness: share of target ids found in the prediction.
pub fn entity_correctness_recall(
    predicted: &BTreeSet<EntityId>,
    target: &BTreeSet<EntityId>,
) -> EntityScore {
    EntityScore::new(predicted.intersection(target).count(), target.len())
}

/// Consistency: share of predicted ids found among the source's ids.
pub fn entity_consistency(
    predicted: &BTreeSet<EntityId>,
    source_entities: &BTreeSet<EntityId>,
) -> EntityScore {
    EntityScore::new(predicted.intersection(source_entities).count(), predicted.len())
}

/// Unigram precision/recall/F1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn unigram_counts(text: &str) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for token in text.split_whitespace() {
        *counts.entry(token.to_lowercase()).or_insert(0) += 1;
    }
    counts
}

/// ROUGE-1 with clipped counts over case-folded whitespace tokens.
/// `None` when the reference has no tokens (undefined).
pub fn rouge1(candidate: &str, reference: &str) -> Option<RougeScore> {
    let cand = unigram_counts(candidate);
    let reference = unigram_counts(reference);
    let ref_total: usize = reference.values().sum();
    if ref_total == 0 {
        return None;
    }
    let cand_total: usize = cand.values().sum();
    let matched: usize = cand
        .iter()
        .map(|(token, count)| count.min(reference.get(token).unwrap_or(&0)))
        .sum();
    let precision = if cand_total == 0 { 0.0 } else { matched as f64 / cand_total as f64 };
    let recall = matched as f64 / ref_total as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Some(RougeScore { precision, recall, f1 })
}

/// Replace every linked mention with its entity id, collapsing surface-form
/// variants into one token before ROUGE comparison.
pub fn canonicalize_mentions(text: &str, aliases: &AliasTable) -> String {
    let mut out = String::new();
    let mut cursor = 0;
    for mention in link(text, aliases) {
        out.push_str(&text[cursor..mention.start]);
        out.push_str(mention.entity.as_str());
        cursor = mention.end;
    }
    out.push_str(&text[cursor..]);
    out
}

/// ROUGE-1 in canonical mode: both texts have linked mentions replaced by
/// entity-id tokens first.
pub fn rouge1_canonical(
    candidate: &str,
    reference: &str,
    aliases: &AliasTable,
) -> Option<RougeScore> {
    rouge1(
        &canonicalize_mentions(candidate, aliases),
        &canonicalize_mentions(reference, aliases),
    )
}

/// What the prediction side of the evaluation is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    /// Score provided prediction texts (system summaries) as sets of linked
    /// entity ids.
    Inference,
    /// Mask the gold reference, fill the masks with the reviser, and score
    /// each fill against the gold entity id it replaced — the upper-bound
    /// protocol for the filler alone.
    Oracle,
}

/// Parameters of a corpus evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub mode: EvalMode,
    pub hops: u32,
    /// Categories masked in oracle mode.
    pub mask_categories: BTreeSet<Category>,
    /// Reviser configuration for oracle mode.
    pub revision: RevisionConfig,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            mode: EvalMode::Inference,
            hops: 1,
            mask_categories: Category::ALL.iter().copied().collect(),
            revision: RevisionConfig::default(),
        }
    }
}

/// One entity metric aggregated over the corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EntityMetricReport {
    /// Σ matched / Σ total over every scored prediction unit.
    pub micro: EntityScore,
    /// Mean of per-document values (documents with defined scores only).
    pub macro_avg: Option<f64>,
    /// Same matches with the reference-side denominator.
    pub recall_oriented: EntityScore,
    pub by_category: BTreeMap<Category, EntityScore>,
    /// Predictions absent from the source entity set.
    pub abstractive: EntityScore,
    /// Predictions present in the source entity set.
    pub extractive: EntityScore,
}

/// Macro-averaged ROUGE-1 over documents with a defined score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RougeAverages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub documents: usize,
}

fn average_rouge(scores: &[RougeScore]) -> Option<RougeAverages> {
    if scores.is_empty() {
        return None;
    }
    let n = scores.len() as f64;
    Some(RougeAverages {
        precision: scores.iter().map(|s| s.precision).sum::<f64>() / n,
        recall: scores.iter().map(|s| s.recall).sum::<f64>() / n,
        f1: scores.iter().map(|s| s.f1).sum::<f64>() / n,
        documents: scores.len(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RougeReport {
    pub surface: Option<RougeAverages>,
    /// Computed after replacing linked mentions with entity ids in both
    /// texts, so surface-form variants of one entity count as matches.
    pub canonical: Option<RougeAverages>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EvalDiagnostics {
    /// Inference mode: documents with neither a predictions entry nor a
    /// candidate field.
    pub docs_missing_prediction: usize,
    /// Documents contributing zero scored units (no linked prediction
    /// entities, or no maskable slots in oracle mode); excluded from
    /// averages.
    pub docs_without_linked_predictions: usize,
    /// Documents whose reference had no tokens (ROUGE undefined there).
    pub docs_with_empty_reference: usize,
    /// Oracle mode: slots where nothing was fillable and the original
    /// surface was kept (these trivially match the gold id).
    pub slots_kept_original: usize,
}

/// Corpus evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub hops: u32,
    /// Documents that contributed at least one scored unit.
    pub documents_evaluated: usize,
    pub correctness: EntityMetricReport,
    pub consistency: EntityMetricReport,
    pub rouge1: RougeReport,
    pub diagnostics: EvalDiagnostics,
    /// Left for externally computed classifier scores; never filled here.
    pub factcc: Option<f64>,
}

#[derive(Default)]
struct MetricAccum {
    micro: EntityScore,
    recall_oriented: EntityScore,
    per_doc: Vec<f64>,
    by_category: BTreeMap<Category, EntityScore>,
    abstractive: EntityScore,
    extractive: EntityScore,
}

impl MetricAccum {
    fn doc(&mut self, doc_score: EntityScore, recall: EntityScore) {
        self.micro.add(doc_score);
        self.recall_oriented.add(recall);
        if let Some(v) = doc_score.value() {
            self.per_doc.push(v);
        }
    }

    fn category(&mut self, category: Category, score: EntityScore) {
        self.by_category.entry(category).or_default().add(score);
    }

    fn report(mut self) -> EntityMetricReport {
        for &cat in Category::ALL.iter() {
            self.by_category.entry(cat).or_default();
        }
        let macro_avg = if self.per_doc.is_empty() {
            None
        } else {
            Some(self.per_doc.iter().sum::<f64>() / self.per_doc.len() as f64)
        };
        EntityMetricReport {
            micro: self.micro,
            macro_avg,
            recall_oriented: self.recall_oriented,
            by_category: self.by_category,
            abstractive: self.abstractive,
            extractive: self.extractive,
        }
    }
}

/// Evaluate a corpus. In inference mode, prediction texts come from
/// `predictions` (joined by document id) with `doc.candidate` as fallback;
/// in oracle mode the reviser is run on masked gold references and
/// `predictions` is ignored.
pub fn evaluate_corpus(
    kb: &KnowledgeBase,
    aliases: &AliasTable,
    corpus: &[Document],
    predictions: &BTreeMap<String, String>,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let mut correctness = MetricAccum::default();
    let mut consistency = MetricAccum::default();
    let mut diagnostics = EvalDiagnostics::default();
    let mut rouge_surface = Vec::new();
    let mut rouge_canonical = Vec::new();
    let mut documents_evaluated = 0;

    for doc in corpus {
        let source_entities = entity_set(&link(&doc.source, aliases));
        let target_entities = entity_set(&link(&doc.target, aliases));

        match opts.mode {
            EvalMode::Inference => {
                let Some(prediction) = predictions
                    .get(&doc.id)
                    .map(String::as_str)
                    .or(doc.candidate.as_deref())
                else {
                    diagnostics.docs_missing_prediction += 1;
                    continue;
                };
                let pred_mentions = link(prediction, aliases);
                let predicted = entity_set(&pred_mentions);
                if predicted.is_empty() {
                    diagnostics.docs_without_linked_predictions += 1;
                    continue;
                }
                documents_evaluated += 1;

                correctness.doc(
                    entity_correctness(&predicted, &target_entities),
                    entity_correctness_recall(&predicted, &target_entities),
                );
                consistency.doc(
                    entity_consistency(&predicted, &source_entities),
                    EntityScore::new(
                        predicted.intersection(&source_entities).count(),
                        source_entities.len(),
                    ),
                );

                let (abstractive, extractive) = split_entities(&pred_mentions, &source_entities);
                correctness.abstractive.add(entity_correctness(&abstractive, &target_entities));
                correctness.extractive.add(entity_correctness(&extractive, &target_entities));
                consistency.abstractive.add(entity_consistency(&abstractive, &source_entities));
                consistency.extractive.add(entity_consistency(&extractive, &source_entities));

                let mut first_category: BTreeMap<&EntityId, Category> = BTreeMap::new();
                for m in &pred_mentions {
                    first_category.entry(&m.entity).or_insert(m.category);
                }
                for (entity, category) in first_category {
                    let in_target = target_entities.contains(entity) as usize;
                    let in_source = source_entities.contains(entity) as usize;
                    correctness.category(category, EntityScore::new(in_target, 1));
                    consistency.category(category, EntityScore::new(in_source, 1));
                }

                match rouge1(prediction, &doc.target) {
                    Some(score) => rouge_surface.push(score),
                    None => diagnostics.docs_with_empty_reference += 1,
                }
                if let Some(score) = rouge1_canonical(prediction, &doc.target, aliases) {
                    rouge_canonical.push(score);
                }
            }
            EvalMode::Oracle => {
                let skeleton = mask_entities(&doc.target, aliases, &opts.mask_categories);
                if skeleton.slots.is_empty() {
                    diagnostics.docs_without_linked_predictions += 1;
                    continue;
                }
                let revision = revise(kb, aliases, doc, &skeleton, &opts.revision, opts.hops)?;
                documents_evaluated += 1;

                let mut doc_correct = EntityScore::default();
                let mut doc_consistent = EntityScore::default();
                for (slot, revised) in skeleton.slots.iter().zip(&revision.slots) {
                    let gold = &slot.original.entity;
                    let chosen = &revised.chosen;
                    if revised.origin == FillOrigin::KeptOriginal {
                        diagnostics.slots_kept_original += 1;
                    }
                    let correct = EntityScore::new((chosen == gold) as usize, 1);
                    let consistent =
                        EntityScore::new(source_entities.contains(chosen) as usize, 1);
                    doc_correct.add(correct);
                    doc_consistent.add(consistent);
                    correctness.category(slot.category, correct);
                    consistency.category(slot.category, consistent);
                    if source_entities.contains(gold) {
                        correctness.extractive.add(correct);
                        consistency.extractive.add(consistent);
                    } else {
                        correctness.abstractive.add(correct);
                        consistency.abstractive.add(consistent);
                    }
                }
                correctness.doc(doc_correct, doc_correct);
                consistency.doc(doc_consistent, doc_consistent);

                match rouge1(&revision.final_text, &doc.target) {
                    Some(score) => rouge_surface.push(score),
                    None => diagnostics.docs_with_empty_reference += 1,
                }
                if let Some(score) = rouge1_canonical(&revision.final_text, &doc.target, aliases) {
                    rouge_canonical.push(score);
                }
            }
        }
    }

    Ok(EvalReport {
        mode: opts.mode,
        hops: opts.hops,
        documents_evaluated,
        correctness: correctness.report(),
        consistency: consistency.report(),
        rouge1: RougeReport {
            surface: average_rouge(&rouge_surface),
            canonical: average_rouge(&rouge_canonical),
        },
        diagnostics,
        factcc: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{KbBuilder, MissingObjectPolicy};

    fn ids(names: &[&str]) -> BTreeSet<EntityId> {
        names.iter().map(|n| EntityId::new(*n)).collect()
    }

    #[test]
    fn correctness_identity_and_precision_orientation() {
        let q30 = ids(&["Q30"]);
        assert_eq!(entity_correctness(&q30, &q30).value(), Some(1.0));

        let predicted = ids(&["Q30", "Q_london"]);
        let target = ids(&["Q30"]);
        assert_eq!(entity_correctness(&predicted, &target).value(), Some(0.5));
        assert_eq!(entity_correctness_recall(&predicted, &target).value(), Some(1.0));
    }

    #[test]
    fn corrected_fixture_scores_half_correct_and_zero_consistent() {
        let predicted = ids(&["Q_cambridgeshire", "Q_plastic_recycling"]);
        let target = ids(&["Q_cambridgeshire", "Q_plastics_factory"]);
        let source = ids(&["Q_plasgran", "Q_wimblington"]);
        assert_eq!(entity_correctness(&predicted, &target).value(), Some(0.5));
        assert_eq!(entity_consistency(&predicted, &source).value(), Some(0.0));
    }

    #[test]
    fn fully_extractive_prediction_is_fully_consistent() {
        let source = ids(&["Q1", "Q2", "Q3"]);
        let predicted = ids(&["Q1", "Q3"]);
        assert_eq!(entity_consistency(&predicted, &source).value(), Some(1.0));
        assert_eq!(entity_consistency(&source, &source).value(), Some(1.0));
    }

    #[test]
    fn empty_predicted_set_is_undefined_not_zero() {
        let score = entity_correctness(&BTreeSet::new(), &ids(&["Q1"]));
        assert!(!score.is_defined());
        assert_eq!(score.value(), None);
    }

    #[test]
    fn rouge1_identity_and_hand_computed_overlap() {
        let identity = rouge1("Some Text here", "some text HERE").unwrap();
        assert_eq!((identity.precision, identity.recall, identity.f1), (1.0, 1.0, 1.0));

        let score = rouge1("a b c", "a b d").unwrap();
        assert!((score.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((score.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((score.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rouge1_clips_repeated_tokens() {
        let score = rouge1("a a a", "a").unwrap();
        assert!((score.precision - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(score.recall, 1.0);
        assert!((score.f1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rouge1_empty_reference_is_undefined_and_empty_candidate_is_zero() {
        assert_eq!(rouge1("whatever", "   "), None);
        let score = rouge1("", "a b").unwrap();
        assert_eq!((score.precision, score.recall, score.f1), (0.0, 0.0, 0.0));
    }

    fn us_aliases() -> AliasTable {
        let mut t = AliasTable::new();
        t.insert("US", "Q30", Category::Location, 0).unwrap();
        t.insert("United States", "Q30", Category::Location, 0).unwrap();
        t
    }

    #[test]
    fn canonical_mode_collapses_surface_variants() {
        let aliases = us_aliases();
        assert_eq!(
            canonicalize_mentions("troops in US today", &aliases),
            "troops in Q30 today"
        );
        let surface = rouge1("troops in US today", "troops in United States today").unwrap();
        let canonical =
            rouge1_canonical("troops in US today", "troops in United States today", &aliases)
                .unwrap();
        assert_eq!((canonical.precision, canonical.recall, canonical.f1), (1.0, 1.0, 1.0));
        assert!(canonical.f1 > surface.f1);
        assert!(canonical.precision >= surface.precision);
        assert!(canonical.recall >= surface.recall);
    }

    fn fixture_kb() -> KnowledgeBase {
        let mut b = KbBuilder::new();
        b.add_entity("Q_plasgran", "Plasgran", Category::Organization).unwrap();
        b.add_entity("Q_wimblington", "Wimblington", Category::Location).unwrap();
        b.add_entity("Q_plastic_recycling", "plastic recycling", Category::Other).unwrap();
        b.add_entity("Q_cambridgeshire", "Cambridgeshire", Category::Location).unwrap();
        b.add_entity("Q_plastics_factory", "plastics factory", Category::Organization).unwrap();
        b.add_entity_triple("Q_plasgran", "P_industry", "industry", "Q_plastic_recycling").unwrap();
        b.add_entity_triple("Q_wimblington", "P_county", "historic county", "Q_cambridgeshire").unwrap();
        b.build(MissingObjectPolicy::RejectLine).0
    }

    fn fixture_aliases() -> AliasTable {
        let mut t = AliasTable::new();
        t.insert("Plasgran", "Q_plasgran", Category::Organization, 0).unwrap();
        t.insert("Wimblington", "Q_wimblington", Category::Location, 0).unwrap();
        t.insert("Cambridgeshire", "Q_cambridgeshire", Category::Location, 0).unwrap();
        t.insert("plastic recycling", "Q_plastic_recycling", Category::Other, 0).unwrap();
        t.insert("plastics factory", "Q_plastics_factory", Category::Organization, 0).unwrap();
        t
    }

    fn fixture_doc() -> Document {
        Document {
            id: "t1".into(),
            source: "A fire crew remains at Plasgran in Manea Road, Wimblington.".into(),
            target: "Fire crews remain at a plastics factory in Cambridgeshire.".into(),
            candidate: Some(
                "A fire at a plastic recycling centre in Cambridgeshire has been reported.".into(),
            ),
        }
    }

    #[test]
    fn inference_evaluation_matches_the_fixture_arithmetic() {
        let report = evaluate_corpus(
            &fixture_kb(),
            &fixture_aliases(),
            &[fixture_doc()],
            &BTreeMap::new(),
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.documents_evaluated, 1);
        // predicted {Q_plastic_recycling, Q_cambridgeshire}; target has one of them
        assert_eq!(report.correctness.micro, EntityScore::new(1, 2));
        assert_eq!(report.consistency.micro, EntityScore::new(0, 2));
        // both predictions are out-of-source, i.e. abstractive
        assert_eq!(report.correctness.abstractive, EntityScore::new(1, 2));
        assert_eq!(report.correctness.extractive, EntityScore::new(0, 0));
        assert_eq!(report.consistency.abstractive.value(), Some(0.0));
        assert_eq!(report.correctness.by_category[&Category::Location], EntityScore::new(1, 1));
        assert_eq!(report.correctness.by_category[&Category::Other], EntityScore::new(0, 1));
        assert!(report.rouge1.surface.is_some());
    }

    #[test]
    fn predictions_file_overrides_the_candidate_field() {
        let predictions =
            BTreeMap::from([("t1".to_string(), "Only Wimblington here.".to_string())]);
        let report = evaluate_corpus(
            &fixture_kb(),
            &fixture_aliases(),
            &[fixture_doc()],
            &predictions,
            &EvalOptions::default(),
        )
        .unwrap();
        // predicted {Q_wimblington}: wrong vs target, consistent vs source
        assert_eq!(report.correctness.micro, EntityScore::new(0, 1));
        assert_eq!(report.consistency.micro, EntityScore::new(1, 1));
    }

    #[test]
    fn documents_without_usable_predictions_are_counted_not_scored() {
        let mut no_candidate = fixture_doc();
        no_candidate.candidate = None;
        let mut unlinkable = fixture_doc();
        unlinkable.id = "t2".into();
        unlinkable.candidate = Some("no linkable entities".into());
        let report = evaluate_corpus(
            &fixture_kb(),
            &fixture_aliases(),
            &[no_candidate, unlinkable],
            &BTreeMap::new(),
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.documents_evaluated, 0);
        assert_eq!(report.diagnostics.docs_missing_prediction, 1);
        assert_eq!(report.diagnostics.docs_without_linked_predictions, 1);
        assert!(!report.correctness.micro.is_defined());
        assert_eq!(report.correctness.macro_avg, None);
    }

    #[test]
    fn micro_average_equals_external_summation() {
        let aliases = fixture_aliases();
        let kb = fixture_kb();
        let docs = vec![
            fixture_doc(),
            Document {
                id: "t2".into(),
                source: "Wimblington news.".into(),
                target: "About Wimblington.".into(),
                candidate: Some("Wimblington and Cambridgeshire both appear.".into()),
            },
        ];
        let report = evaluate_corpus(&kb, &aliases, &docs, &BTreeMap::new(), &EvalOptions::default()).unwrap();
        // doc1: matched 1 of 2; doc2: predicted {Q_wimblington, Q_cambridgeshire},
        // target {Q_wimblington} → matched 1 of 2
        assert_eq!(report.correctness.micro, EntityScore::new(2, 4));
        assert_eq!(report.correctness.micro.value(), Some(0.5));
        let expected_macro = (0.5 + 0.5) / 2.0;
        assert!((report.correctness.macro_avg.unwrap() - expected_macro).abs() < 1e-12);
    }

    #[test]
    fn oracle_mode_scores_slot_fills_against_gold_ids() {
        let kb = fixture_kb();
        let aliases = fixture_aliases();
        // gold target's only location is Cambridgeshire, reachable from
        // Wimblington at hop 1, so the reviser should restore it
        let doc = Document {
            id: "t1".into(),
            source: "A fire crew remains at Plasgran in Manea Road, Wimblington.".into(),
            target: "Fire crews remain in Cambridgeshire.".into(),
            candidate: None,
        };
        let opts = EvalOptions {
            mode: EvalMode::Oracle,
            mask_categories: BTreeSet::from([Category::Location]),
            ..EvalOptions::default()
        };
        let report =
            evaluate_corpus(&kb, &aliases, &[doc], &BTreeMap::new(), &opts).unwrap();
        assert_eq!(report.documents_evaluated, 1);
        assert_eq!(report.correctness.micro, EntityScore::new(1, 1));
        assert_eq!(report.correctness.micro.value(), Some(1.0));
        // the fill names an out-of-source entity: correct but inconsistent
        assert_eq!(report.consistency.micro, EntityScore::new(0, 1));
        // gold Cambridgeshire is not a source entity → abstractive slot
        assert_eq!(report.correctness.abstractive, EntityScore::new(1, 1));
        assert_eq!(report.diagnostics.slots_kept_original, 0);
    }

    #[test]
    fn oracle_mode_skips_documents_with_no_maskable_slots() {
        let kb = fixture_kb();
        let aliases = fixture_aliases();
        let doc = Document {
            id: "t1".into(),
            source: "Plasgran site.".into(),
            target: "nothing linkable in this target".into(),
            candidate: None,
        };
        let opts = EvalOptions { mode: EvalMode::Oracle, ..EvalOptions::default() };
        let report = evaluate_corpus(&kb, &aliases, &[doc], &BTreeMap::new(), &opts).unwrap();
        assert_eq!(report.documents_evaluated, 0);
        assert_eq!(report.diagnostics.docs_without_linked_predictions, 1);
    }

    #[test]
    fn report_serializes_undefined_scores_as_null() {
        let score = EntityScore::default();
        let json = serde_json::to_value(score).unwrap();
        assert_eq!(json["value"], serde_json::Value::Null);
        assert_eq!(json["total"], 0);
    }
}
