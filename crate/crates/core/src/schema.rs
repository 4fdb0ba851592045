use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A relational schema: relation names with fixed arities.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema {
    relations: BTreeMap<String, usize>,
}

pub(crate) fn is_relation_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a schema from `(name, arity)` pairs, rejecting duplicates and bad names.
    pub fn from_relations<I, S>(relations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut schema = Schema::new();
        for (name, arity) in relations {
            schema.add(name, arity)?;
        }
        Ok(schema)
    }

    pub fn add(&mut self, name: impl Into<String>, arity: usize) -> Result<()> {
        let name = name.into();
        if !is_relation_name(&name) {
            return Err(Error::InvalidIdentifier(name));
        }
        if self.relations.contains_key(&name) {
            return Err(Error::DuplicateRelation(name));
        }
        self.relations.insert(name, arity);
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Relations in name order.
    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    /// Sub-schema restricted to the given names.
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<Schema> {
        let mut out = Schema::new();
        for name in names {
            let arity = self
                .arity(name)
                .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
            if !out.contains(name) {
                out.relations.insert(name.to_string(), arity);
            }
        }
        Ok(out)
    }

    /// Total arity over all relations.
    pub fn arity_sum(&self) -> usize {
        self.relations.values().sum()
    }
}

/// Renders as `R/2 L/1`, the same form the schema file uses (one entry per line there).
impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, arity)) in self.relations.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}/{arity}")?;
        }
        Ok(())
    }
}
