//! Shared domain primitives: entity and relation identifiers, entity categories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Canonical identifier of a real-world entity (e.g. `"Q30"`).
///
/// Equality is exact string equality; one ID stands for one entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        EntityId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId::new(s)
    }
}

/// Opaque relation identifier (e.g. `"P131"`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelationId(String);

impl RelationId {
    pub fn new(id: impl Into<String>) -> Self {
        RelationId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RelationId {
    fn from(s: &str) -> Self {
        RelationId::new(s)
    }
}

/// A relation identifier together with its human-readable label.
///
/// The label is what linearization emits (e.g. `"historic county"`); the KB
/// guarantees one label per relation id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub id: RelationId,
    pub label: String,
}

impl Relation {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Relation {
            id: RelationId::new(id),
            label: label.into(),
        }
    }
}

/// Entity type category. Closed set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Location,
    Person,
    Organization,
    Event,
    Art,
    ConsumerGood,
    Other,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Location,
        Category::Person,
        Category::Organization,
        Category::Event,
        Category::Art,
        Category::ConsumerGood,
        Category::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Location => "location",
            Category::Person => "person",
            Category::Organization => "organization",
            Category::Event => "event",
            Category::Art => "art",
            Category::ConsumerGood => "consumer_good",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "location" => Ok(Category::Location),
            "person" => Ok(Category::Person),
            "organization" => Ok(Category::Organization),
            "event" => Ok(Category::Event),
            "art" => Ok(Category::Art),
            "consumer_good" => Ok(Category::ConsumerGood),
            "other" => Ok(Category::Other),
            other => Err(Error::UnknownCategory(other.to_string())),
        }
    }
}
