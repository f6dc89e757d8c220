//! Subcommand implementations and artifact I/O.
//!
//! Every artifact-producing command writes deterministic files under the
//! output directory, ordered by document id, plus a `run.json` manifest
//! recording the fully resolved settings (including the seed). Identical
//! settings therefore produce byte-identical artifacts.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use kbfaith::{
    augment_source, coverage_report, entity_set, evaluate_corpus, filter_abstractive_subset, link,
    load_aliases, load_corpus, load_kb, load_predictions, mask_entities, random_facts,
    random_facts_from, random_words, revise, token_count, AliasTable, Category, Document,
    EntityId, EvalMode,
    EvalOptions, Fact, FactOrdering, KnowledgeBase, LoadStats, MaskSlot, Mention,
    MissingObjectPolicy, SkeletonSummary,
};
use serde::{Deserialize, Serialize};

use crate::settings::{data, usage, AugmentMode, CliError, SamplePool, Settings};

// ---------------------------------------------------------------------------
// Artifact rows
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct AugmentRow {
    id: String,
    augmented_source: String,
    facts_used: usize,
    pruned: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct MaskSlotRow {
    index: usize,
    category: Category,
    surface: String,
    entity_id: EntityId,
}

#[derive(Debug, Serialize, Deserialize)]
struct MaskRow {
    id: String,
    skeleton: String,
    slots: Vec<MaskSlotRow>,
}

#[derive(Debug, Serialize)]
struct AlternateRow {
    id: EntityId,
    label: String,
    score: f64,
}

#[derive(Debug, Serialize)]
struct ReviseSlotRow {
    index: usize,
    chosen_id: EntityId,
    chosen_label: String,
    score: f64,
    origin: kbfaith::FillOrigin,
    supporting_facts: Vec<[String; 3]>,
    alternates: Vec<AlternateRow>,
}

#[derive(Debug, Serialize)]
struct ReviseRow {
    id: String,
    final_text: String,
    slots: Vec<ReviseSlotRow>,
}

/// The subset of a revised row that eval needs back.
#[derive(Debug, Deserialize)]
struct RevisedPrediction {
    id: String,
    final_text: String,
}

/// Resolved settings snapshot written next to every artifact set.
#[derive(Debug, Serialize)]
struct RunManifest {
    command: &'static str,
    seed: u64,
    hops: u32,
    oracle: bool,
    categories: Option<Vec<String>>,
    kb: Option<String>,
    labels: Option<String>,
    aliases: Option<String>,
    corpus: Option<String>,
    vocab: Option<String>,
    predictions: Option<String>,
    out: String,
    budget_tokens: usize,
    ordering: &'static str,
    mode: &'static str,
    pool: &'static str,
    top_k: usize,
    w_type: f64,
    w_context: f64,
    w_salience: f64,
    context_window: usize,
}

impl RunManifest {
    fn new(command: &'static str, s: &Settings) -> RunManifest {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        RunManifest {
            command,
            seed: s.seed,
            hops: s.hops,
            oracle: s.oracle,
            categories: s
                .categories
                .as_ref()
                .map(|set| set.iter().map(|c| c.to_string()).collect()),
            kb: path(&s.kb),
            labels: path(&s.labels),
            aliases: path(&s.aliases),
            corpus: path(&s.corpus),
            vocab: path(&s.vocab),
            predictions: path(&s.predictions),
            out: s.out_dir().display().to_string(),
            budget_tokens: s.budget_tokens,
            ordering: match s.ordering {
                FactOrdering::SubjectMentionOrder => "subject_mention_order",
                FactOrdering::Lexicographic => "lexicographic",
            },
            mode: s.mode.as_str(),
            pool: s.pool.as_str(),
            top_k: s.revision.top_k,
            w_type: s.revision.w_type,
            w_context: s.revision.w_context,
            w_salience: s.revision.w_salience,
            context_window: s.revision.context_window,
        }
    }
}

// ---------------------------------------------------------------------------
// Artifact I/O
// ---------------------------------------------------------------------------

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| data(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, content).map_err(|e| data(format!("cannot write {}: {e}", path.display())))
}

fn to_jsonl<T: Serialize>(rows: &[T]) -> String {
    let mut text = String::new();
    for row in rows {
        text.push_str(&serde_json::to_string(row).expect("artifact rows serialize"));
        text.push('\n');
    }
    text
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// Serialize a report with the run seed added as a top-level key.
fn with_seed<T: Serialize>(report: &T, seed: u64) -> serde_json::Value {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("seed".to_string(), serde_json::json!(seed));
    }
    value
}

fn write_manifest(out: &Path, command: &'static str, s: &Settings) -> Result<(), CliError> {
    write_file(&out.join("run.json"), &to_pretty_json(&RunManifest::new(command, s)))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(line)
            .map_err(|e| data(format!("{}:{}: {e}", path.display(), idx + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Shared loading
// ---------------------------------------------------------------------------

fn load_kb_from(s: &Settings) -> Result<(KnowledgeBase, LoadStats), CliError> {
    let triples = s.require("kb")?;
    let labels = s.require("labels")?;
    Ok(load_kb(triples, labels, MissingObjectPolicy::RejectLine)?)
}

fn load_aliases_from(s: &Settings) -> Result<AliasTable, CliError> {
    Ok(load_aliases(s.require("aliases")?)?)
}

fn load_corpus_from(s: &Settings) -> Result<Vec<Document>, CliError> {
    Ok(load_corpus(s.require("corpus")?)?)
}

// ---------------------------------------------------------------------------
// kb-stats
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct CorpusStats {
    documents: usize,
    /// Mean number of subgraph facts per document, for each hop depth
    /// 1..=hops.
    mean_subgraph_facts_by_hop: BTreeMap<u32, f64>,
}

#[derive(Debug, Serialize)]
struct KbStatsReport {
    seed: u64,
    facts: usize,
    entities: usize,
    relations: usize,
    duplicates_dropped: usize,
    aliases: Option<usize>,
    corpus: Option<CorpusStats>,
}

pub fn cmd_kb_stats(s: &Settings) -> Result<(), CliError> {
    let (kb, stats) = load_kb_from(s)?;
    let aliases = match &s.aliases {
        Some(_) => Some(load_aliases_from(s)?),
        None => None,
    };

    let corpus_stats = match &s.corpus {
        None => None,
        Some(_) => {
            let table = aliases.as_ref().ok_or_else(|| {
                usage("kb-stats with --corpus also needs --aliases to link source entities")
            })?;
            let corpus = load_corpus_from(s)?;
            let seeds_per_doc: Vec<BTreeSet<EntityId>> = corpus
                .iter()
                .map(|doc| entity_set(&link(&doc.source, table)))
                .collect();
            let mut means = BTreeMap::new();
            for k in 1..=s.hops {
                let total: usize = seeds_per_doc
                    .iter()
                    .map(|seeds| kb.subgraph(seeds, k).fact_count())
                    .sum();
                let mean = if corpus.is_empty() {
                    0.0
                } else {
                    total as f64 / corpus.len() as f64
                };
                means.insert(k, mean);
            }
            Some(CorpusStats {
                documents: corpus.len(),
                mean_subgraph_facts_by_hop: means,
            })
        }
    };

    let report = KbStatsReport {
        seed: s.seed,
        facts: kb.fact_count(),
        entities: kb.entity_count(),
        relations: kb.relation_count(),
        duplicates_dropped: stats.duplicates_dropped,
        aliases: aliases.as_ref().map(|t| t.len()),
        corpus: corpus_stats,
    };
    print!("{}", to_pretty_json(&report));
    if let Some(out) = &s.out {
        write_file(&out.join("kb_stats.json"), &to_pretty_json(&report))?;
        write_manifest(out, "kb-stats", s)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// coverage
// ---------------------------------------------------------------------------

pub fn cmd_coverage(s: &Settings) -> Result<(), CliError> {
    let (kb, _) = load_kb_from(s)?;
    let aliases = load_aliases_from(s)?;
    let corpus = load_corpus_from(s)?;
    let report = coverage_report(&kb, &aliases, &corpus, s.hops);
    let value = with_seed(&report, s.seed);
    print!("{}", to_pretty_json(&value));
    let out = s.out_dir();
    write_file(&out.join("coverage.json"), &to_pretty_json(&value))?;
    write_manifest(&out, "coverage", s)
}

// ---------------------------------------------------------------------------
// subset
// ---------------------------------------------------------------------------

pub fn cmd_subset(s: &Settings) -> Result<(), CliError> {
    let aliases = load_aliases_from(s)?;
    let corpus = load_corpus_from(s)?;
    let category = s
        .single_category("subset")?
        .ok_or_else(|| usage("subset needs one category, e.g. --categories location"))?;
    let mut kept = filter_abstractive_subset(&corpus, &aliases, category);
    kept.sort_by(|a, b| a.id.cmp(&b.id));
    eprintln!("subset: kept {} of {} documents", kept.len(), corpus.len());
    let out = s.out_dir();
    write_file(&out.join("subset.jsonl"), &to_jsonl(&kept))?;
    write_manifest(&out, "subset", s)
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

/// Stable per-document seed: FNV-1a of the id folded with the run seed, so
/// row order in the corpus file cannot change any document's sample.
fn doc_seed(seed: u64, id: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in id.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash ^ seed
}

fn augment_row(
    s: &Settings,
    kb: &KnowledgeBase,
    aliases: &AliasTable,
    doc: &Document,
    category: Option<Category>,
) -> Result<AugmentRow, CliError> {
    let seeds = entity_set(&link(&doc.source, aliases));
    let sub = kb.subgraph(&seeds, s.hops);
    let cfg = s.linearization(category);
    let reference = augment_source(kb, &doc.source, &sub, &cfg);
    if reference.source_truncated {
        eprintln!(
            "augment: {}: source exceeds the {}-token budget, truncated",
            doc.id, cfg.budget_tokens
        );
    }

    let row = match s.mode {
        AugmentMode::Facts => AugmentRow {
            id: doc.id.clone(),
            augmented_source: reference.text,
            facts_used: reference.facts_used,
            pruned: reference.pruned,
        },
        AugmentMode::RandomWords => {
            let block_tokens =
                token_count(&reference.text).saturating_sub(token_count(&doc.source));
            let total = reference.facts_used + reference.pruned;
            if reference.source_truncated || block_tokens == 0 {
                AugmentRow {
                    id: doc.id.clone(),
                    augmented_source: if reference.source_truncated {
                        reference.text
                    } else {
                        doc.source.clone()
                    },
                    facts_used: 0,
                    pruned: total,
                }
            } else {
                let vocab = s.require("vocab")?;
                let words = random_words(block_tokens, vocab, doc_seed(s.seed, &doc.id))?;
                AugmentRow {
                    id: doc.id.clone(),
                    augmented_source: format!("{} {}", doc.source, words),
                    facts_used: 0,
                    pruned: total,
                }
            }
        }
        AugmentMode::RandomFacts => {
            if reference.source_truncated || reference.facts_used == 0 {
                AugmentRow {
                    id: doc.id.clone(),
                    augmented_source: if reference.source_truncated {
                        reference.text
                    } else {
                        doc.source.clone()
                    },
                    facts_used: 0,
                    pruned: 0,
                }
            } else {
                let seed = doc_seed(s.seed, &doc.id);
                let sampled = match s.pool {
                    SamplePool::WholeKb => random_facts(kb, reference.facts_used, category, seed)?,
                    SamplePool::PerDocument => {
                        let pool: Vec<Fact> = sub.facts().cloned().collect();
                        random_facts_from(kb, &pool, reference.facts_used, category, seed)?
                    }
                };
                append_facts_within_budget(kb, &doc.source, &sampled, cfg.budget_tokens)
                    .with_id(&doc.id)
            }
        }
    };
    Ok(row)
}

struct AppendOutcome {
    text: String,
    facts_used: usize,
    pruned: usize,
}

impl AppendOutcome {
    fn with_id(self, id: &str) -> AugmentRow {
        AugmentRow {
            id: id.to_string(),
            augmented_source: self.text,
            facts_used: self.facts_used,
            pruned: self.pruned,
        }
    }
}

/// Greedy whole-fact append under the same token accounting as the
/// fact-retrieval mode: source + leading separator + per-fact labels and
/// trailing separator.
fn append_facts_within_budget(
    kb: &KnowledgeBase,
    source: &str,
    facts: &[Fact],
    budget_tokens: usize,
) -> AppendOutcome {
    let mut used = token_count(source) + 1;
    let mut kept = 0;
    for fact in facts {
        let [subject, relation, object] = fact.label_triple(kb);
        let cost =
            token_count(&subject) + token_count(&relation) + token_count(&object) + 1;
        if used + cost > budget_tokens {
            break;
        }
        used += cost;
        kept += 1;
    }
    if kept == 0 {
        return AppendOutcome {
            text: source.to_string(),
            facts_used: 0,
            pruned: facts.len(),
        };
    }
    let linearized = kbfaith::linearize(kb, &facts[..kept]);
    let text = if source.is_empty() {
        linearized
    } else {
        format!("{source} {linearized}")
    };
    AppendOutcome {
        text,
        facts_used: kept,
        pruned: facts.len() - kept,
    }
}

pub fn cmd_augment(s: &Settings) -> Result<(), CliError> {
    let (kb, _) = load_kb_from(s)?;
    let aliases = load_aliases_from(s)?;
    let corpus = load_corpus_from(s)?;
    let category = s.single_category("augment")?;

    let mut rows = Vec::new();
    for doc in &corpus {
        rows.push(augment_row(s, &kb, &aliases, doc, category)?);
    }
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    let out = s.out_dir();
    write_file(&out.join("augmented.jsonl"), &to_jsonl(&rows))?;
    write_manifest(&out, "augment", s)
}

// ---------------------------------------------------------------------------
// mask
// ---------------------------------------------------------------------------

/// Mask every document's working text (candidate, or target with --oracle).
/// Documents without a working text are logged and skipped.
fn mask_corpus(
    corpus: &[Document],
    aliases: &AliasTable,
    categories: &BTreeSet<Category>,
    oracle: bool,
) -> Vec<(String, SkeletonSummary)> {
    let mut skeletons = Vec::new();
    for doc in corpus {
        let text = if oracle {
            doc.target.as_str()
        } else {
            match doc.candidate.as_deref() {
                Some(text) => text,
                None => {
                    eprintln!("mask: skipping {}: document has no candidate summary", doc.id);
                    continue;
                }
            }
        };
        skeletons.push((doc.id.clone(), mask_entities(text, aliases, categories)));
    }
    skeletons.sort_by(|a, b| a.0.cmp(&b.0));
    skeletons
}

fn mask_row(id: &str, skeleton: &SkeletonSummary) -> MaskRow {
    MaskRow {
        id: id.to_string(),
        skeleton: skeleton.text.clone(),
        slots: skeleton
            .slots
            .iter()
            .map(|slot| MaskSlotRow {
                index: slot.index,
                category: slot.category,
                surface: slot.original.surface.clone(),
                entity_id: slot.original.entity.clone(),
            })
            .collect(),
    }
}

pub fn cmd_mask(s: &Settings) -> Result<(), CliError> {
    let aliases = load_aliases_from(s)?;
    let corpus = load_corpus_from(s)?;
    let categories = s.categories_or_all();
    let skeletons = mask_corpus(&corpus, &aliases, &categories, s.oracle);
    let rows: Vec<MaskRow> = skeletons
        .iter()
        .map(|(id, skeleton)| mask_row(id, skeleton))
        .collect();
    let out = s.out_dir();
    write_file(&out.join("skeletons.jsonl"), &to_jsonl(&rows))?;
    write_manifest(&out, "mask", s)
}

// ---------------------------------------------------------------------------
// revise
// ---------------------------------------------------------------------------

fn revise_row(kb: &KnowledgeBase, id: &str, result: &kbfaith::RevisionResult) -> ReviseRow {
    ReviseRow {
        id: id.to_string(),
        final_text: result.final_text.clone(),
        slots: result
            .slots
            .iter()
            .map(|slot| ReviseSlotRow {
                index: slot.index,
                chosen_id: slot.chosen.clone(),
                chosen_label: slot.chosen_label.clone(),
                score: slot.score,
                origin: slot.origin,
                supporting_facts: slot
                    .supporting_facts
                    .iter()
                    .map(|fact| fact.label_triple(kb))
                    .collect(),
                alternates: slot
                    .alternates
                    .iter()
                    .map(|alt| AlternateRow {
                        id: alt.entity.clone(),
                        label: alt.label.clone(),
                        score: alt.score,
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn revise_skeletons(
    s: &Settings,
    kb: &KnowledgeBase,
    aliases: &AliasTable,
    corpus: &[Document],
    skeletons: &[(String, SkeletonSummary)],
) -> Vec<ReviseRow> {
    let by_id: BTreeMap<&str, &Document> =
        corpus.iter().map(|doc| (doc.id.as_str(), doc)).collect();
    let mut rows = Vec::new();
    for (id, skeleton) in skeletons {
        let Some(doc) = by_id.get(id.as_str()) else {
            eprintln!("revise: skipping {id}: no such document in the corpus");
            continue;
        };
        match revise(kb, aliases, doc, skeleton, &s.revision, s.hops) {
            Ok(result) => rows.push(revise_row(kb, id, &result)),
            Err(err) => eprintln!("revise: skipping {id}: {err}"),
        }
    }
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    rows
}

/// Rebuild in-memory skeletons from a `skeletons.jsonl` artifact. The rows
/// carry no byte offsets and revision never reads them, so reconstructed
/// mentions use zeroed offsets.
fn skeletons_from_rows(rows: Vec<MaskRow>) -> Vec<(String, SkeletonSummary)> {
    rows.into_iter()
        .map(|row| {
            let slots = row
                .slots
                .into_iter()
                .map(|slot| MaskSlot {
                    index: slot.index,
                    category: slot.category,
                    original: Mention {
                        start: 0,
                        end: 0,
                        surface: slot.surface,
                        entity: slot.entity_id,
                        category: slot.category,
                    },
                })
                .collect();
            (
                row.id,
                SkeletonSummary {
                    text: row.skeleton,
                    slots,
                },
            )
        })
        .collect()
}

pub fn cmd_revise(s: &Settings) -> Result<(), CliError> {
    let (kb, _) = load_kb_from(s)?;
    let aliases = load_aliases_from(s)?;
    let corpus = load_corpus_from(s)?;
    let out = s.out_dir();
    let skeletons_path = out.join("skeletons.jsonl");
    if !skeletons_path.exists() {
        return Err(usage(format!(
            "revise reads {}; run the mask subcommand with the same --out first",
            skeletons_path.display()
        )));
    }
    let skeletons = skeletons_from_rows(read_jsonl(&skeletons_path)?);
    let rows = revise_skeletons(s, &kb, &aliases, &corpus, &skeletons);
    write_file(&out.join("revised.jsonl"), &to_jsonl(&rows))?;
    write_manifest(&out, "revise", s)
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

fn eval_options(s: &Settings) -> EvalOptions {
    EvalOptions {
        mode: if s.oracle { EvalMode::Oracle } else { EvalMode::Inference },
        hops: s.hops,
        mask_categories: s.categories_or_all(),
        revision: s.revision.clone(),
    }
}

fn prediction_map(s: &Settings, out: &Path) -> Result<BTreeMap<String, String>, CliError> {
    if let Some(path) = &s.predictions {
        if !path.exists() {
            return Err(usage(format!(
                "--predictions path {} does not exist",
                path.display()
            )));
        }
        return Ok(load_predictions(path)?);
    }
    let revised = out.join("revised.jsonl");
    if revised.exists() {
        let rows: Vec<RevisedPrediction> = read_jsonl(&revised)?;
        return Ok(rows.into_iter().map(|r| (r.id, r.final_text)).collect());
    }
    Ok(BTreeMap::new())
}

pub fn cmd_eval(s: &Settings) -> Result<(), CliError> {
    let (kb, _) = load_kb_from(s)?;
    let aliases = load_aliases_from(s)?;
    let corpus = load_corpus_from(s)?;
    let out = s.out_dir();
    let predictions = prediction_map(s, &out)?;
    let report = evaluate_corpus(&kb, &aliases, &corpus, &predictions, &eval_options(s))?;
    let value = with_seed(&report, s.seed);
    print!("{}", to_pretty_json(&value));
    write_file(&out.join("eval.json"), &to_pretty_json(&value))?;
    write_manifest(&out, "eval", s)
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

pub fn cmd_pipeline(s: &Settings) -> Result<(), CliError> {
    let (kb, _) = load_kb_from(s)?;
    let aliases = load_aliases_from(s)?;
    let corpus = load_corpus_from(s)?;
    let categories = s.categories_or_all();
    let out = s.out_dir();

    let skeletons = mask_corpus(&corpus, &aliases, &categories, s.oracle);
    let mask_rows: Vec<MaskRow> = skeletons
        .iter()
        .map(|(id, skeleton)| mask_row(id, skeleton))
        .collect();
    write_file(&out.join("skeletons.jsonl"), &to_jsonl(&mask_rows))?;

    let revise_rows = revise_skeletons(s, &kb, &aliases, &corpus, &skeletons);
    write_file(&out.join("revised.jsonl"), &to_jsonl(&revise_rows))?;

    let predictions: BTreeMap<String, String> = revise_rows
        .iter()
        .map(|row| (row.id.clone(), row.final_text.clone()))
        .collect();
    let report = evaluate_corpus(&kb, &aliases, &corpus, &predictions, &eval_options(s))?;
    let value = with_seed(&report, s.seed);
    print!("{}", to_pretty_json(&value));
    write_file(&out.join("eval.json"), &to_pretty_json(&value))?;
    write_manifest(&out, "pipeline", s)
}
