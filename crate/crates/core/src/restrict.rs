//! Restriction operators on 2CQs, the reduced set of restrictions `RR(Q)`, and the
//! maximal-containment test derived from it.
//!
//! For minimal 2CQs `R` and `Q`, `R` is maximally contained in `Q` exactly when `R`
//! is (up to renaming) a member of `RR(Q)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::canon::{canonical_form, canonicalize};
use crate::error::{Error, Result};
use crate::hom::{core, holds};
use crate::query::{require_2cq, require_same_arity, Atom, ConjunctiveQuery, Variable};
use crate::schema::Schema;

const FRESH_PREFIX: &str = "y_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RestrictionType {
    /// Identify one variable with another.
    Type1,
    /// Add an atom over a relation name the query does not use.
    Type2,
    /// Add a second atom for a once-used relation, constraining one of its variables.
    Type3,
    /// Add one atom each for two once-used relations, linked by a shared variable.
    Type4,
}

impl RestrictionType {
    pub const ALL: [RestrictionType; 4] = [
        RestrictionType::Type1,
        RestrictionType::Type2,
        RestrictionType::Type3,
        RestrictionType::Type4,
    ];

    pub fn number(self) -> u8 {
        match self {
            RestrictionType::Type1 => 1,
            RestrictionType::Type2 => 2,
            RestrictionType::Type3 => 3,
            RestrictionType::Type4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        RestrictionType::ALL.into_iter().find(|t| t.number() == n)
    }
}

impl fmt::Display for RestrictionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type-{}", self.number())
    }
}

/// How a restriction was produced. Positions are zero-based within the added atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RestrictionKind {
    /// `variable` was replaced by `image` everywhere.
    Type1 { variable: Variable, image: Variable },
    /// An atom over `relation` with distinct fresh variables was added.
    Type2 { relation: String },
    /// A second `relation` atom was added whose `position` holds `image`, either a
    /// variable of the parent or another fresh variable of the new atom.
    Type3 {
        relation: String,
        position: usize,
        image: Variable,
    },
    /// Atoms over `first` and `second` were added, sharing `shared` at the given positions.
    Type4 {
        first: String,
        second: String,
        first_position: usize,
        second_position: usize,
        shared: Variable,
    },
}

impl RestrictionKind {
    pub fn restriction_type(&self) -> RestrictionType {
        match self {
            RestrictionKind::Type1 { .. } => RestrictionType::Type1,
            RestrictionKind::Type2 { .. } => RestrictionType::Type2,
            RestrictionKind::Type3 { .. } => RestrictionType::Type3,
            RestrictionKind::Type4 { .. } => RestrictionType::Type4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictionResult {
    pub query: ConjunctiveQuery,
    pub kind: RestrictionKind,
    pub parent: ConjunctiveQuery,
}

struct Fresh {
    used: BTreeSet<String>,
    counter: usize,
}

impl Fresh {
    fn new(q: &ConjunctiveQuery) -> Self {
        Fresh {
            used: q.variables().into_iter().map(String::from).collect(),
            counter: 0,
        }
    }

    fn take(&mut self, n: usize) -> Vec<Variable> {
        (0..n)
            .map(|_| loop {
                self.counter += 1;
                let name = format!("{FRESH_PREFIX}{}", self.counter);
                if self.used.insert(name.clone()) {
                    break Variable::new(name).expect("fresh names are valid variables");
                }
            })
            .collect()
    }
}

fn type1(q: &ConjunctiveQuery) -> Vec<(ConjunctiveQuery, RestrictionKind)> {
    let vars = q.variables();
    let mut out = Vec::new();
    for y in &vars {
        for target in &vars {
            if y == target || (q.is_distinguished(y) && !q.is_distinguished(target)) {
                continue;
            }
            let map = BTreeMap::from([(y.clone(), target.clone())]);
            out.push((
                q.substitute(&map),
                RestrictionKind::Type1 {
                    variable: y.clone(),
                    image: target.clone(),
                },
            ));
        }
    }
    out
}

fn type2(q: &ConjunctiveQuery, schema: &Schema) -> Vec<(ConjunctiveQuery, RestrictionKind)> {
    let used = q.relations();
    schema
        .relations()
        .filter(|(name, _)| !used.contains(name))
        .map(|(name, arity)| {
            let args = Fresh::new(q).take(arity);
            (
                q.with_atoms([Atom {
                    relation: name.to_string(),
                    args,
                }]),
                RestrictionKind::Type2 {
                    relation: name.to_string(),
                },
            )
        })
        .collect()
}

fn once_used(q: &ConjunctiveQuery) -> Vec<(String, usize)> {
    q.relation_counts()
        .into_iter()
        .filter(|&(_, count)| count == 1)
        .map(|(name, _)| {
            let arity = q
                .body()
                .iter()
                .find(|a| a.relation == name)
                .map(Atom::arity)
                .expect("counted relation occurs");
            (name.to_string(), arity)
        })
        .collect()
}

fn type3(q: &ConjunctiveQuery) -> Vec<(ConjunctiveQuery, RestrictionKind)> {
    let vars = q.variables();
    let mut out = Vec::new();
    for (relation, arity) in once_used(q) {
        let fresh = Fresh::new(q).take(arity);
        for position in 0..arity {
            let targets = vars.iter().chain(
                fresh
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != position)
                    .map(|(_, v)| v),
            );
            for image in targets {
                let mut args = fresh.clone();
                args[position] = image.clone();
                out.push((
                    q.with_atoms([Atom {
                        relation: relation.clone(),
                        args,
                    }]),
                    RestrictionKind::Type3 {
                        relation: relation.clone(),
                        position,
                        image: image.clone(),
                    },
                ));
            }
        }
    }
    out
}

fn type4(q: &ConjunctiveQuery) -> Vec<(ConjunctiveQuery, RestrictionKind)> {
    let once = once_used(q);
    let mut out = Vec::new();
    for (i, (first, a1)) in once.iter().enumerate() {
        for (second, a2) in &once[i + 1..] {
            for p1 in 0..*a1 {
                for p2 in 0..*a2 {
                    let mut fresh = Fresh::new(q);
                    let mut y1 = fresh.take(*a1);
                    let y2 = fresh.take(*a2);
                    y1[p1] = y2[p2].clone();
                    out.push((
                        q.with_atoms([
                            Atom {
                                relation: first.clone(),
                                args: y1,
                            },
                            Atom {
                                relation: second.clone(),
                                args: y2.clone(),
                            },
                        ]),
                        RestrictionKind::Type4 {
                            first: first.clone(),
                            second: second.clone(),
                            first_position: p1,
                            second_position: p2,
                            shared: y2[p2].clone(),
                        },
                    ));
                }
            }
        }
    }
    out
}

fn raw_restrictions(
    q: &ConjunctiveQuery,
    schema: &Schema,
    kind: RestrictionType,
) -> Vec<(ConjunctiveQuery, RestrictionKind)> {
    match kind {
        RestrictionType::Type1 => type1(q),
        RestrictionType::Type2 => type2(q, schema),
        RestrictionType::Type3 => type3(q),
        RestrictionType::Type4 => type4(q),
    }
}

/// Every restriction of `q` of the requested type, deduplicated up to renaming (first
/// occurrence kept).
pub fn generate_restrictions(
    q: &ConjunctiveQuery,
    schema: &Schema,
    kind: RestrictionType,
) -> Result<Vec<RestrictionResult>> {
    require_2cq(q, schema)?;
    let mut seen = BTreeSet::new();
    Ok(raw_restrictions(q, schema, kind)
        .into_iter()
        .filter(|(r, _)| seen.insert(canonicalize(r)))
        .map(|(query, kind)| RestrictionResult {
            query,
            kind,
            parent: q.clone(),
        })
        .collect())
}

/// `RR(q)` for a query already known to be a minimal 2CQ over `schema`. Members are
/// canonical cores, sorted by canonical text.
pub(crate) fn reduced_of_core(q: &ConjunctiveQuery, schema: &Schema) -> Vec<ConjunctiveQuery> {
    let mut members: BTreeMap<String, ConjunctiveQuery> = BTreeMap::new();
    for (r, _) in type2(q, schema) {
        let r = canonical_form(&r);
        members.insert(r.to_string(), r);
    }

    // Cores of type-1/3/4 restrictions strictly below q, deduplicated up to equivalence.
    // Equivalent cores are isomorphic, so canonical text is an exact key.
    let mut candidates: BTreeMap<String, ConjunctiveQuery> = BTreeMap::new();
    for kind in [
        RestrictionType::Type1,
        RestrictionType::Type3,
        RestrictionType::Type4,
    ] {
        for (r, _) in raw_restrictions(q, schema, kind) {
            let c = core(&r);
            let key = c.to_string();
            if candidates.contains_key(&key) {
                continue;
            }
            if !holds(q, &c) {
                candidates.insert(key, c);
            }
        }
    }

    // Keep the maximal candidates. Distinct candidates are inequivalent, so plain
    // containment in another candidate is proper containment.
    let list: Vec<&ConjunctiveQuery> = candidates.values().collect();
    for (i, c) in list.iter().enumerate() {
        let dominated = list
            .iter()
            .enumerate()
            .any(|(j, other)| i != j && holds(c, other));
        if !dominated {
            members.insert(c.to_string(), (*c).clone());
        }
    }
    members.into_values().collect()
}

/// The reduced set of restrictions of a minimal 2CQ: its type-2 restrictions plus the
/// maximal cores among its type-1/3/4 restrictions that are strictly contained in it.
///
/// The result is exactly the set of queries maximally contained in `q`.
pub fn reduced_restrictions(
    q: &ConjunctiveQuery,
    schema: &Schema,
) -> Result<Vec<ConjunctiveQuery>> {
    require_2cq(q, schema)?;
    let c = core(q);
    if c.body().len() != q.body().len() {
        return Err(Error::NotMinimal {
            atoms: q.body().len(),
            core_atoms: c.body().len(),
        });
    }
    Ok(reduced_of_core(&c, schema))
}

/// `q1 ⊑m q2` for 2CQs over `schema`: after taking cores, `q1` is equivalent to a member
/// of `RR(q2)`.
pub fn is_maximally_contained(
    q1: &ConjunctiveQuery,
    q2: &ConjunctiveQuery,
    schema: &Schema,
) -> Result<bool> {
    require_same_arity(q1, q2)?;
    require_2cq(q1, schema)?;
    require_2cq(q2, schema)?;
    let target = core(q1);
    Ok(reduced_of_core(&core(q2), schema).contains(&target))
}
