//! Entity masking: turn a summary into a skeleton with typed, indexed
//! placeholder slots, and reassemble text from slot fills.
//!
//! Placeholders look like `[MASK:location:0]`. They carry the entity
//! category (the revision scorer needs the type) and a dense index, and the
//! bracketed form can never collide with a linked alias.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linker::{link, AliasTable, Mention};
use crate::types::Category;

/// One masked-out mention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaskSlot {
    /// Dense ordinal within the skeleton, in text order from 0.
    pub index: usize,
    pub category: Category,
    /// The mention that was replaced, including its surface and entity id.
    pub original: Mention,
}

/// A summary with entity mentions replaced by placeholders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkeletonSummary {
    pub text: String,
    pub slots: Vec<MaskSlot>,
}

impl SkeletonSummary {
    /// The placeholder token for a slot.
    pub fn placeholder(category: Category, index: usize) -> String {
        format!("[MASK:{category}:{index}]")
    }

    /// Slot-index → original-surface map (the identity fills).
    pub fn original_fills(&self) -> BTreeMap<usize, String> {
        self.slots
            .iter()
            .map(|slot| (slot.index, slot.original.surface.clone()))
            .collect()
    }
}

/// Mask every linked mention whose category is in `categories`, left to
/// right. Text outside the chosen mentions is untouched; slot indices are
/// dense from 0 in text order.
pub fn mask_entities(
    summary: &str,
    aliases: &AliasTable,
    categories: &BTreeSet<Category>,
) -> SkeletonSummary {
    let mut text = String::new();
    let mut slots = Vec::new();
    let mut cursor = 0;
    for mention in link(summary, aliases) {
        if !categories.contains(&mention.category) {
            continue;
        }
        let index = slots.len();
        text.push_str(&summary[cursor..mention.start]);
        text.push_str(&SkeletonSummary::placeholder(mention.category, index));
        cursor = mention.end;
        slots.push(MaskSlot { index, category: mention.category, original: mention });
    }
    text.push_str(&summary[cursor..]);
    SkeletonSummary { text, slots }
}

/// Replace each placeholder with its fill. Every slot index must have a
/// fill; nothing else in the text changes.
pub fn unmask(skeleton: &SkeletonSummary, fills: &BTreeMap<usize, String>) -> Result<String> {
    let mut text = skeleton.text.clone();
    for slot in &skeleton.slots {
        let fill = fills.get(&slot.index).ok_or(Error::MissingFill(slot.index))?;
        let placeholder = SkeletonSummary::placeholder(slot.category, slot.index);
        match text.find(&placeholder) {
            Some(pos) => text.replace_range(pos..pos + placeholder.len(), fill),
            None => return Err(Error::MissingPlaceholder(slot.index)),
        }
    }
    Ok(text)
}
