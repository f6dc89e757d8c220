//! Dictionary-based entity linking.
//!
//! Linking matches surface text against an alias table under a light
//! normalization (case folding, whitespace collapsing) while reporting
//! mention offsets in the *original* byte string. Matches are longest-first,
//! must not split an alphanumeric run on either side, and scanning resumes
//! after each match, so mentions never overlap.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{Category, EntityId};

/// One linked occurrence of an entity in a text.
///
/// `start`/`end` are byte offsets into the original text; `surface` is the
/// exact original slice (not the normalized form).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub entity: EntityId,
    pub category: Category,
}

/// Resolution target of one alias.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasEntry {
    pub entity: EntityId,
    pub category: Category,
    pub priority: i64,
}

/// Alias dictionary keyed by normalized surface form.
///
/// When several rows share a normalized alias, the higher-priority row wins;
/// ties break toward the lexicographically smaller entity id, so the table is
/// a function from surface form to entity regardless of row order.
#[derive(Debug, Clone, Default)]
pub struct AliasTable {
    entries: HashMap<String, AliasEntry>,
    /// Distinct normalized-alias lengths in chars, used for longest-first
    /// matching.
    lengths: BTreeSet<usize>,
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register one alias row. Aliases that normalize to the empty string are
    /// rejected.
    pub fn insert(
        &mut self,
        alias: &str,
        entity: impl Into<String>,
        category: Category,
        priority: i64,
    ) -> Result<()> {
        let key = normalize(alias);
        if key.is_empty() {
            return Err(Error::InvalidInput(format!(
                "alias {alias:?} normalizes to the empty string"
            )));
        }
        let entity = EntityId::new(entity);
        if entity.as_str().is_empty() {
            return Err(Error::InvalidInput(format!("empty entity id for alias {alias:?}")));
        }
        let candidate = AliasEntry { entity, category, priority };
        match self.entries.get_mut(&key) {
            Some(existing) => {
                let better = candidate.priority > existing.priority
                    || (candidate.priority == existing.priority
                        && candidate.entity < existing.entity);
                if better {
                    *existing = candidate;
                }
            }
            None => {
                self.lengths.insert(key.chars().count());
                self.entries.insert(key, candidate);
            }
        }
        Ok(())
    }

    /// Number of distinct normalized aliases.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entry a surface form resolves to, if any (exact normalized match).
    pub fn resolve(&self, surface: &str) -> Option<&AliasEntry> {
        self.entries.get(&normalize(surface))
    }
}

/// Load an alias table from TSV: `alias<TAB>entity_id<TAB>category<TAB>priority`.
/// Blank lines and `#` comments are ignored.
pub fn load_aliases(path: impl AsRef<Path>) -> Result<AliasTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table = AliasTable::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [alias, entity, category, priority] = fields[..] else {
            return Err(Error::malformed(
                path,
                lineno,
                format!("expected 4 tab-separated fields, got {}", fields.len()),
            ));
        };
        let category: Category = category
            .parse()
            .map_err(|e: Error| Error::malformed(path, lineno, e.to_string()))?;
        let priority: i64 = priority.parse().map_err(|_| {
            Error::malformed(path, lineno, format!("priority must be an integer, got {priority:?}"))
        })?;
        table
            .insert(alias, entity, category, priority)
            .map_err(|e| Error::malformed(path, lineno, e.to_string()))?;
    }
    Ok(table)
}

/// One normalized char with the byte span of the original char(s) it came
/// from. A lowercase expansion (one original char becoming several normalized
/// chars) repeats the same span; a collapsed whitespace run spans the whole
/// run.
#[derive(Debug, Clone, Copy)]
struct NormChar {
    ch: char,
    orig_start: usize,
    orig_end: usize,
}

fn normalize_chars(text: &str) -> Vec<NormChar> {
    let mut out: Vec<NormChar> = Vec::new();
    let mut pending_ws: Option<(usize, usize)> = None;
    for (i, c) in text.char_indices() {
        let end = i + c.len_utf8();
        if c.is_whitespace() {
            pending_ws = Some(match pending_ws {
                Some((s, _)) => (s, end),
                None => (i, end),
            });
        } else {
            if let Some((s, e)) = pending_ws.take() {
                if !out.is_empty() {
                    out.push(NormChar { ch: ' ', orig_start: s, orig_end: e });
                }
            }
            for lc in c.to_lowercase() {
                out.push(NormChar { ch: lc, orig_start: i, orig_end: end });
            }
        }
    }
    out
}

/// Case-fold and collapse internal whitespace to single spaces; leading and
/// trailing whitespace is dropped. This is the key space of [`AliasTable`].
pub fn normalize(text: &str) -> String {
    normalize_chars(text).iter().map(|n| n.ch).collect()
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric()
}

/// True when a match may begin at `pos`: it must not split an alphanumeric
/// run nor start in the middle of a case-folding expansion.
fn starts_at_boundary(norm: &[NormChar], pos: usize) -> bool {
    if pos == 0 {
        return true;
    }
    let prev = norm[pos - 1];
    let cur = norm[pos];
    if is_word(prev.ch) && is_word(cur.ch) && prev.orig_end == cur.orig_start {
        return false;
    }
    // starting inside an expansion of a single original char
    cur.orig_start >= prev.orig_end
}

/// True when a match may end just before `end` (exclusive), mirroring
/// [`starts_at_boundary`].
fn ends_at_boundary(norm: &[NormChar], end: usize) -> bool {
    if end == norm.len() {
        return true;
    }
    let last = norm[end - 1];
    let next = norm[end];
    if is_word(last.ch) && is_word(next.ch) && last.orig_end == next.orig_start {
        return false;
    }
    next.orig_start >= last.orig_end
}

/// Link all alias occurrences in `text`, left to right.
///
/// At each position the longest matching alias wins; after a match, scanning
/// resumes at its end. Returned mentions are ordered by start offset and do
/// not overlap.
pub fn link(text: &str, table: &AliasTable) -> Vec<Mention> {
    let norm = normalize_chars(text);
    let chars: Vec<char> = norm.iter().map(|n| n.ch).collect();
    let n = chars.len();
    let mut mentions = Vec::new();
    let mut pos = 0;
    'scan: while pos < n {
        if chars[pos] == ' ' || !starts_at_boundary(&norm, pos) {
            pos += 1;
            continue;
        }
        for &len in table.lengths.iter().rev() {
            let end = pos + len;
            if end > n || !ends_at_boundary(&norm, end) {
                continue;
            }
            let key: String = chars[pos..end].iter().collect();
            if let Some(entry) = table.entries.get(&key) {
                let start = norm[pos].orig_start;
                let stop = norm[end - 1].orig_end;
                mentions.push(Mention {
                    start,
                    end: stop,
                    surface: text[start..stop].to_string(),
                    entity: entry.entity.clone(),
                    category: entry.category,
                });
                pos = end;
                continue 'scan;
            }
        }
        pos += 1;
    }
    mentions
}

/// The distinct entity ids among `mentions`.
pub fn entity_set(mentions: &[Mention]) -> BTreeSet<EntityId> {
    mentions.iter().map(|m| m.entity.clone()).collect()
}
