use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::query::is_lower_identifier;
use crate::schema::{is_relation_name, Schema};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Constant(String);

impl Constant {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if is_lower_identifier(&name) {
            Ok(Constant(name))
        } else {
            Err(Error::InvalidIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Fact {
    pub relation: String,
    pub args: Vec<Constant>,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, c) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(").")
    }
}

/// A finite set of ground facts. Each relation name is used with one arity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Instance {
    facts: BTreeSet<Fact>,
    #[serde(skip)]
    arities: BTreeMap<String, usize>,
}

impl Instance {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a fact; returns whether it was new.
    pub fn insert(&mut self, relation: impl Into<String>, args: Vec<Constant>) -> Result<bool> {
        let relation = relation.into();
        if !is_relation_name(&relation) {
            return Err(Error::InvalidIdentifier(relation));
        }
        match self.arities.get(&relation) {
            Some(&expected) if expected != args.len() => {
                return Err(Error::ArityMismatch {
                    relation,
                    expected,
                    found: args.len(),
                })
            }
            Some(_) => {}
            None => {
                self.arities.insert(relation.clone(), args.len());
            }
        }
        Ok(self.facts.insert(Fact { relation, args }))
    }

    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.arities.get(relation).copied()
    }

    /// Active domain in sorted order.
    pub fn constants(&self) -> BTreeSet<&Constant> {
        self.facts.iter().flat_map(|f| f.args.iter()).collect()
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains(fact)
    }

    pub fn is_subset(&self, other: &Instance) -> bool {
        self.facts.is_subset(&other.facts)
    }

    /// Errors if a fact disagrees with the schema.
    pub fn check_schema(&self, schema: &Schema) -> Result<()> {
        for (relation, &found) in &self.arities {
            match schema.arity(relation) {
                None => return Err(Error::UnknownRelation(relation.clone())),
                Some(expected) if expected != found => {
                    return Err(Error::ArityMismatch {
                        relation: relation.clone(),
                        expected,
                        found,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, fact) in self.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{fact}")?;
        }
        Ok(())
    }
}

/// The canonical database of a query: its body with every variable turned into a constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrozenQuery {
    pub instance: Instance,
    pub head_tuple: Vec<Constant>,
}
