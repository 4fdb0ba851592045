//! Conjunctive queries: variables, atoms, rules, and their well-formedness checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{is_relation_name, Schema};

pub(crate) fn is_lower_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A query variable. Names begin with a lowercase letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if is_lower_identifier(&name) {
            Ok(Variable(name))
        } else {
            Err(Error::InvalidIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Variable {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Variable::new(value)
    }
}

impl From<Variable> for String {
    fn from(v: Variable) -> String {
        v.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<Variable>,
}

impl Atom {
    pub fn new(relation: impl Into<String>, args: Vec<Variable>) -> Result<Self> {
        let relation = relation.into();
        if !is_relation_name(&relation) {
            return Err(Error::InvalidIdentifier(relation));
        }
        Ok(Atom { relation, args })
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, v) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// A conjunctive query `(z1, ..., zm) <- S1(x1), ..., Sn(xn)`.
///
/// The body is a set: duplicate atoms are dropped on construction, keeping the
/// first occurrence. Atom order carries no meaning.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ConjunctiveQuery {
    head: Vec<Variable>,
    body: Vec<Atom>,
}

impl ConjunctiveQuery {
    /// Builds a query, enforcing the structural invariants: nonempty body, every head
    /// variable occurs in the body, and each relation name is used with a single arity.
    pub fn new(head: Vec<Variable>, body: Vec<Atom>) -> Result<Self> {
        if let Some(v) = intrinsic_violations(&head, &body).into_iter().next() {
            return Err(v.into_error());
        }
        Ok(Self::from_parts(head, body))
    }

    /// Caller guarantees the invariants checked by [`ConjunctiveQuery::new`].
    pub(crate) fn from_parts(head: Vec<Variable>, body: Vec<Atom>) -> Self {
        let mut seen = BTreeSet::new();
        let body = body
            .into_iter()
            .filter(|a| seen.insert(a.clone()))
            .collect();
        ConjunctiveQuery { head, body }
    }

    pub fn head(&self) -> &[Variable] {
        &self.head
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    /// Number of head positions.
    pub fn arity(&self) -> usize {
        self.head.len()
    }

    pub fn is_boolean(&self) -> bool {
        self.head.is_empty()
    }

    /// Variables in order of first occurrence (head first, then body).
    pub fn variables(&self) -> Vec<Variable> {
        let mut seen = BTreeSet::new();
        self.head
            .iter()
            .chain(self.body.iter().flat_map(|a| a.args.iter()))
            .filter(|v| seen.insert((*v).clone()))
            .cloned()
            .collect()
    }

    pub fn is_distinguished(&self, v: &Variable) -> bool {
        self.head.contains(v)
    }

    /// Relation names used in the body.
    pub fn relations(&self) -> BTreeSet<&str> {
        self.body.iter().map(|a| a.relation.as_str()).collect()
    }

    /// Occurrence count of each relation name in the body.
    pub fn relation_counts(&self) -> BTreeMap<&str, usize> {
        let mut counts = BTreeMap::new();
        for a in &self.body {
            *counts.entry(a.relation.as_str()).or_insert(0) += 1;
        }
        counts
    }

    /// Each relation name occurs at most twice.
    pub fn is_2cq(&self) -> bool {
        self.relation_counts().values().all(|&c| c <= 2)
    }

    /// `α + n + Σ|x̄_i|`.
    pub fn size(&self) -> usize {
        self.head.len() + self.body.len() + self.body.iter().map(Atom::arity).sum::<usize>()
    }

    /// Applies a variable substitution to head and body; unmapped variables stay put.
    pub fn substitute(&self, map: &BTreeMap<Variable, Variable>) -> ConjunctiveQuery {
        let sub = |v: &Variable| map.get(v).unwrap_or(v).clone();
        let head = self.head.iter().map(sub).collect();
        let body = self
            .body
            .iter()
            .map(|a| Atom {
                relation: a.relation.clone(),
                args: a.args.iter().map(sub).collect(),
            })
            .collect();
        ConjunctiveQuery::from_parts(head, body)
    }

    /// The same head with one extra set of atoms appended to the body.
    pub(crate) fn with_atoms(&self, extra: impl IntoIterator<Item = Atom>) -> ConjunctiveQuery {
        let body = self.body.iter().cloned().chain(extra).collect();
        ConjunctiveQuery::from_parts(self.head.clone(), body)
    }

    /// Drops the atom at `index`, or returns `None` when that would strand a head variable
    /// or empty the body.
    pub(crate) fn without_atom(&self, index: usize) -> Option<ConjunctiveQuery> {
        if self.body.len() <= 1 {
            return None;
        }
        let body: Vec<Atom> = self
            .body
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, a)| a.clone())
            .collect();
        let covered: BTreeSet<&Variable> = body.iter().flat_map(|a| a.args.iter()).collect();
        if self.head.iter().all(|v| covered.contains(v)) {
            Some(ConjunctiveQuery {
                head: self.head.clone(),
                body,
            })
        } else {
            None
        }
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(") <- ")?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyBody,
    HeadVariableNotInBody {
        variable: String,
    },
    UnknownRelation {
        relation: String,
    },
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    /// Soft violation: the query is well-formed but some relation occurs more than twice.
    NotTwoCq {
        relation: String,
        count: usize,
    },
}

impl Violation {
    /// Hard violations make a query ill-formed; `NotTwoCq` only excludes it from the 2CQ class.
    pub fn is_hard(&self) -> bool {
        !matches!(self, Violation::NotTwoCq { .. })
    }

    pub fn into_error(self) -> Error {
        match self {
            Violation::EmptyBody => Error::EmptyBody,
            Violation::HeadVariableNotInBody { variable } => Error::HeadVariableNotInBody(variable),
            Violation::UnknownRelation { relation } => Error::UnknownRelation(relation),
            Violation::ArityMismatch {
                relation,
                expected,
                found,
            } => Error::ArityMismatch {
                relation,
                expected,
                found,
            },
            Violation::NotTwoCq { relation, count } => Error::NotTwoCq { relation, count },
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotTwoCq { relation, count } => {
                write!(f, "not a 2CQ: `{relation}` occurs {count} times")
            }
            other => write!(f, "{}", other.clone().into_error()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// No hard violations.
    pub fn is_valid(&self) -> bool {
        self.violations.iter().all(|v| !v.is_hard())
    }

    pub fn is_2cq(&self) -> bool {
        self.is_valid() && self.violations.is_empty()
    }

    pub fn first_error(&self) -> Option<Error> {
        self.violations
            .iter()
            .find(|v| v.is_hard())
            .cloned()
            .map(Violation::into_error)
    }
}

fn intrinsic_violations(head: &[Variable], body: &[Atom]) -> Vec<Violation> {
    let mut out = Vec::new();
    if body.is_empty() {
        out.push(Violation::EmptyBody);
    }
    let body_vars: BTreeSet<&Variable> = body.iter().flat_map(|a| a.args.iter()).collect();
    let mut reported = BTreeSet::new();
    for v in head {
        if !body_vars.contains(v) && reported.insert(v) {
            out.push(Violation::HeadVariableNotInBody {
                variable: v.to_string(),
            });
        }
    }
    let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
    for a in body {
        match arities.get(a.relation.as_str()) {
            Some(&expected) if expected != a.arity() => out.push(Violation::ArityMismatch {
                relation: a.relation.clone(),
                expected,
                found: a.arity(),
            }),
            Some(_) => {}
            None => {
                arities.insert(&a.relation, a.arity());
            }
        }
    }
    out
}

/// Validates a raw head/body pair against a schema.
pub fn validate_rule(head: &[Variable], body: &[Atom], schema: &Schema) -> ValidationReport {
    let mut violations = intrinsic_violations(head, body);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut reported = BTreeSet::new();
    for a in body {
        *counts.entry(&a.relation).or_insert(0) += 1;
        match schema.arity(&a.relation) {
            None => {
                if reported.insert(a.relation.as_str()) {
                    violations.push(Violation::UnknownRelation {
                        relation: a.relation.clone(),
                    });
                }
            }
            Some(expected) if expected != a.arity() => {
                let v = Violation::ArityMismatch {
                    relation: a.relation.clone(),
                    expected,
                    found: a.arity(),
                };
                if !violations.contains(&v) {
                    violations.push(v);
                }
            }
            Some(_) => {}
        }
    }
    // Duplicates in a raw body collapse, so count distinct atoms only.
    let distinct: BTreeSet<&Atom> = body.iter().collect();
    let mut distinct_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for a in distinct {
        *distinct_counts.entry(&a.relation).or_insert(0) += 1;
    }
    for (relation, count) in distinct_counts {
        if count > 2 {
            violations.push(Violation::NotTwoCq {
                relation: relation.to_string(),
                count,
            });
        }
    }
    ValidationReport { violations }
}

/// Checks a query against a schema; non-2CQ bodies are reported separately from hard errors.
pub fn validate(q: &ConjunctiveQuery, schema: &Schema) -> ValidationReport {
    validate_rule(&q.head, &q.body, schema)
}

/// Size measure `α + n + Σ|x̄_i|`.
pub fn query_size(q: &ConjunctiveQuery) -> usize {
    q.size()
}

/// Errors unless `q` is well-formed over `schema` and a 2CQ.
pub(crate) fn require_2cq(q: &ConjunctiveQuery, schema: &Schema) -> Result<()> {
    let report = validate(q, schema);
    if let Some(e) = report.first_error() {
        return Err(e);
    }
    match report.violations.into_iter().next() {
        Some(v) => Err(v.into_error()),
        None => Ok(()),
    }
}

/// Errors unless both queries have the same number of head positions.
pub(crate) fn require_same_arity(q1: &ConjunctiveQuery, q2: &ConjunctiveQuery) -> Result<()> {
    if q1.arity() == q2.arity() {
        Ok(())
    } else {
        Err(Error::QueryArityMismatch {
            left: q1.arity(),
            right: q2.arity(),
        })
    }
}
