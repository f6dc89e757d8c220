//! Document corpus and prediction I/O.
//!
//! Corpora are JSON-lines files: one object per line with `id`, `source`,
//! `target`, and an optional `candidate` summary. Predictions are JSON-lines
//! with `id` and `prediction`. Parse errors carry the 1-based line number.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One source article with its reference summary and, optionally, a system
/// candidate summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<String>,
}

#[derive(Debug, Deserialize)]
struct PredictionRecord {
    id: String,
    prediction: String,
}

fn parse_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(line).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            line: lineno,
            message: e.to_string(),
        })?;
        records.push((lineno, record));
    }
    Ok(records)
}

/// Load a corpus, preserving file order. Duplicate document ids are an error.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let records: Vec<(usize, Document)> = parse_jsonl(path)?;
    let mut seen = BTreeMap::new();
    for (lineno, doc) in &records {
        if let Some(first) = seen.insert(doc.id.clone(), *lineno) {
            return Err(Error::Json {
                path: path.to_path_buf(),
                line: *lineno,
                message: format!("duplicate document id {:?} (first seen on line {first})", doc.id),
            });
        }
    }
    Ok(records.into_iter().map(|(_, doc)| doc).collect())
}

/// Load predictions as an id → text map. Duplicate ids are an error.
pub fn load_predictions(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let records: Vec<(usize, PredictionRecord)> = parse_jsonl(path)?;
    let mut map = BTreeMap::new();
    for (lineno, record) in records {
        if map.contains_key(&record.id) {
            return Err(Error::Json {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("duplicate prediction id {:?}", record.id),
            });
        }
        map.insert(record.id, record.prediction);
    }
    Ok(map)
}
