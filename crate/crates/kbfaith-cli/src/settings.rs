//! Run settings: command-line flags merged over an optional flat TOML config
//! file, with defaults underneath. Flags win over config values.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use kbfaith::{Category, FactOrdering, LinearizationConfig, RevisionConfig};
use serde::Deserialize;

/// Errors split by exit code: usage problems (bad invocation or config,
/// exit 1) vs data problems (unreadable or malformed inputs, exit 2).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

impl From<kbfaith::Error> for CliError {
    fn from(err: kbfaith::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

/// Flags shared by every subcommand.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Flat TOML config file; any command-line flag overrides its value.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Knowledge-base triples TSV.
    #[arg(long, value_name = "FILE")]
    pub kb: Option<PathBuf>,
    /// Entity/relation labels TSV.
    #[arg(long, value_name = "FILE")]
    pub labels: Option<PathBuf>,
    /// Alias dictionary TSV.
    #[arg(long, value_name = "FILE")]
    pub aliases: Option<PathBuf>,
    /// Corpus JSONL (id, source, target, optional candidate).
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Subgraph expansion depth.
    #[arg(long, value_name = "K")]
    pub hops: Option<u32>,
    /// Comma-separated entity categories (e.g. "location,person").
    #[arg(long, value_name = "LIST")]
    pub categories: Option<String>,
    /// Operate on gold reference summaries instead of system candidates.
    #[arg(long)]
    pub oracle: bool,
    /// Seed for all randomized operations; recorded in the run manifest.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Linearization flags (augment).
#[derive(Debug, Default, Args)]
pub struct LinArgs {
    /// Whitespace-token budget for the augmented input.
    #[arg(long, value_name = "N")]
    pub budget_tokens: Option<usize>,
    /// Fact order before pruning: "subject_mention_order" or "lexicographic".
    #[arg(long, value_name = "ORDER")]
    pub ordering: Option<String>,
    /// Augmentation content: "facts", "random-words", or "random-facts".
    #[arg(long, value_name = "MODE")]
    pub mode: Option<String>,
    /// Vocabulary file for the random-words mode (one word per line).
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
    /// Sampling pool for the random-facts mode: "whole-kb" (default) or
    /// "per-document" (the document's own subgraph facts).
    #[arg(long, value_name = "POOL")]
    pub pool: Option<String>,
}

/// Revision scoring flags (revise, eval, pipeline).
#[derive(Debug, Default, Args)]
pub struct RevArgs {
    /// Number of fact-memory keys retained per slot.
    #[arg(long, value_name = "N")]
    pub top_k: Option<usize>,
    /// Weight of the category (type) match component.
    #[arg(long, value_name = "W")]
    pub w_type: Option<f64>,
    /// Weight of the context word-overlap component.
    #[arg(long, value_name = "W")]
    pub w_context: Option<f64>,
    /// Weight of the subject-salience component.
    #[arg(long, value_name = "W")]
    pub w_salience: Option<f64>,
    /// Context window half-width in tokens around the mask.
    #[arg(long, value_name = "N")]
    pub context_window: Option<usize>,
}

/// Prediction input flag (eval).
#[derive(Debug, Default, Args)]
pub struct PredArgs {
    /// Predictions JSONL ({id, prediction}); defaults to <out>/revised.jsonl
    /// when that file exists, else each document's candidate field.
    #[arg(long, value_name = "FILE")]
    pub predictions: Option<PathBuf>,
}

/// The flat config file: every key mirrors a command-line flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    kb: Option<PathBuf>,
    labels: Option<PathBuf>,
    aliases: Option<PathBuf>,
    corpus: Option<PathBuf>,
    vocab: Option<PathBuf>,
    predictions: Option<PathBuf>,
    hops: Option<u32>,
    categories: Option<String>,
    oracle: Option<bool>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    budget_tokens: Option<usize>,
    ordering: Option<String>,
    mode: Option<String>,
    pool: Option<String>,
    top_k: Option<usize>,
    w_type: Option<f64>,
    w_context: Option<f64>,
    w_salience: Option<f64>,
    context_window: Option<usize>,
}

/// What the augment subcommand appends to each source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugmentMode {
    /// Linearized subgraph facts (the default).
    Facts,
    /// Uniformly sampled vocabulary words of the same token count as the
    /// fact block — the content-free control.
    RandomWords,
    /// Uniformly sampled whole-KB facts instead of retrieved ones.
    RandomFacts,
}

impl AugmentMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AugmentMode::Facts => "facts",
            AugmentMode::RandomWords => "random-words",
            AugmentMode::RandomFacts => "random-facts",
        }
    }
}

/// Where the random-facts mode samples from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplePool {
    /// Every fact in the knowledge base (the default).
    WholeKb,
    /// Only the facts of the document's own k-hop subgraph.
    PerDocument,
}

impl SamplePool {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplePool::WholeKb => "whole-kb",
            SamplePool::PerDocument => "per-document",
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub kb: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub hops: u32,
    /// `None` when the flag/config key was not given (commands interpret the
    /// absence, e.g. mask defaults to all categories).
    pub categories: Option<BTreeSet<Category>>,
    pub oracle: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub budget_tokens: usize,
    pub ordering: FactOrdering,
    pub mode: AugmentMode,
    pub pool: SamplePool,
    pub revision: RevisionConfig,
}

impl Settings {
    /// Merge flags over the config file over defaults.
    pub fn resolve(
        common: &CommonArgs,
        lin: Option<&LinArgs>,
        rev: Option<&RevArgs>,
        pred: Option<&PredArgs>,
    ) -> Result<Settings, CliError> {
        let file = match &common.config {
            None => FileConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    usage(format!("cannot read config file {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    usage(format!("invalid config file {}: {e}", path.display()))
                })?
            }
        };

        let lin_default = LinearizationConfig::default();
        let rev_default = RevisionConfig::default();

        let categories = match common.categories.as_deref().or(file.categories.as_deref()) {
            None => None,
            Some(list) => Some(parse_categories(list)?),
        };
        let ordering = match lin
            .and_then(|l| l.ordering.as_deref())
            .or(file.ordering.as_deref())
        {
            None => lin_default.ordering,
            Some("subject_mention_order") => FactOrdering::SubjectMentionOrder,
            Some("lexicographic") => FactOrdering::Lexicographic,
            Some(other) => {
                return Err(usage(format!(
                    "unknown ordering {other:?} (expected \"subject_mention_order\" or \"lexicographic\")"
                )))
            }
        };
        let mode = match lin.and_then(|l| l.mode.as_deref()).or(file.mode.as_deref()) {
            None => AugmentMode::Facts,
            Some("facts") => AugmentMode::Facts,
            Some("random-words") => AugmentMode::RandomWords,
            Some("random-facts") => AugmentMode::RandomFacts,
            Some(other) => {
                return Err(usage(format!(
                    "unknown augment mode {other:?} (expected \"facts\", \"random-words\", or \"random-facts\")"
                )))
            }
        };
        let pool = match lin.and_then(|l| l.pool.as_deref()).or(file.pool.as_deref()) {
            None => SamplePool::WholeKb,
            Some("whole-kb") => SamplePool::WholeKb,
            Some("per-document") => SamplePool::PerDocument,
            Some(other) => {
                return Err(usage(format!(
                    "unknown sampling pool {other:?} (expected \"whole-kb\" or \"per-document\")"
                )))
            }
        };

        let revision = RevisionConfig {
            top_k: pick(rev.and_then(|r| r.top_k), file.top_k, rev_default.top_k),
            w_type: pick(rev.and_then(|r| r.w_type), file.w_type, rev_default.w_type),
            w_context: pick(rev.and_then(|r| r.w_context), file.w_context, rev_default.w_context),
            w_salience: pick(
                rev.and_then(|r| r.w_salience),
                file.w_salience,
                rev_default.w_salience,
            ),
            context_window: pick(
                rev.and_then(|r| r.context_window),
                file.context_window,
                rev_default.context_window,
            ),
        };
        revision.validate().map_err(|e| usage(e.to_string()))?;

        Ok(Settings {
            kb: common.kb.clone().or(file.kb),
            labels: common.labels.clone().or(file.labels),
            aliases: common.aliases.clone().or(file.aliases),
            corpus: common.corpus.clone().or(file.corpus),
            vocab: lin.and_then(|l| l.vocab.clone()).or(file.vocab),
            predictions: pred.and_then(|p| p.predictions.clone()).or(file.predictions),
            hops: pick(common.hops, file.hops, 1),
            categories,
            oracle: common.oracle || file.oracle.unwrap_or(false),
            seed: pick(common.seed, file.seed, 0),
            out: common.out.clone().or(file.out),
            budget_tokens: pick(
                lin.and_then(|l| l.budget_tokens),
                file.budget_tokens,
                lin_default.budget_tokens,
            ),
            ordering,
            mode,
            pool,
            revision,
        })
    }

    /// A required input path: present and existing on disk, else usage error.
    pub fn require(&self, flag: &str) -> Result<&Path, CliError> {
        let value = match flag {
            "kb" => &self.kb,
            "labels" => &self.labels,
            "aliases" => &self.aliases,
            "corpus" => &self.corpus,
            "vocab" => &self.vocab,
            other => unreachable!("unknown required flag {other}"),
        };
        let path = value.as_deref().ok_or_else(|| {
            usage(format!(
                "missing --{flag} (pass the flag or set \"{flag}\" in the config file)"
            ))
        })?;
        if !path.exists() {
            return Err(usage(format!("--{flag} path {} does not exist", path.display())));
        }
        Ok(path)
    }

    /// Output directory, defaulting to `out`.
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// The category set for masking/evaluation: all categories when the flag
    /// was not given.
    pub fn categories_or_all(&self) -> BTreeSet<Category> {
        self.categories
            .clone()
            .unwrap_or_else(|| Category::ALL.iter().copied().collect())
    }

    /// The single category some commands need (subset; augment's filter).
    pub fn single_category(&self, command: &str) -> Result<Option<Category>, CliError> {
        match &self.categories {
            None => Ok(None),
            Some(set) if set.len() == 1 => Ok(set.iter().next().copied()),
            Some(set) => Err(usage(format!(
                "{command} accepts at most one category, got {}",
                set.len()
            ))),
        }
    }

    pub fn linearization(&self, category_filter: Option<Category>) -> LinearizationConfig {
        LinearizationConfig {
            budget_tokens: self.budget_tokens,
            category_filter,
            ordering: self.ordering,
            ..LinearizationConfig::default()
        }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn parse_categories(list: &str) -> Result<BTreeSet<Category>, CliError> {
    let mut set = BTreeSet::new();
    for token in list.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        set.insert(Category::from_str(token).map_err(|e| usage(e.to_string()))?);
    }
    if set.is_empty() {
        return Err(usage("--categories given but names no category".to_string()));
    }
    Ok(set)
}
