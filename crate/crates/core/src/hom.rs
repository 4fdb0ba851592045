//! Homomorphisms between queries, and the containment, equivalence and core
//! computations built on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::canon::canonical_form;
use crate::error::Result;
use crate::query::{require_same_arity, ConjunctiveQuery, Variable};
use crate::solver::Problem;

/// A finite map between variables, used as a homomorphism witness.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct VarMapping {
    entries: BTreeMap<Variable, Variable>,
}

impl VarMapping {
    pub fn get(&self, v: &Variable) -> Option<&Variable> {
        self.entries.get(v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Variable)> {
        self.entries.iter()
    }

    pub fn as_map(&self) -> &BTreeMap<Variable, Variable> {
        &self.entries
    }

    /// Whether this mapping is a homomorphism from `from` to `to`.
    pub fn is_homomorphism(&self, from: &ConjunctiveQuery, to: &ConjunctiveQuery) -> bool {
        let image = |v: &Variable| self.entries.get(v).cloned();
        let head: Option<Vec<Variable>> = from.head().iter().map(image).collect();
        if head.as_deref() != Some(to.head()) {
            return false;
        }
        from.body().iter().all(|a| {
            let args: Option<Vec<Variable>> = a.args.iter().map(image).collect();
            args.is_some_and(|args| {
                to.body()
                    .iter()
                    .any(|b| b.relation == a.relation && b.args == args)
            })
        })
    }
}

impl FromIterator<(Variable, Variable)> for VarMapping {
    fn from_iter<T: IntoIterator<Item = (Variable, Variable)>>(iter: T) -> Self {
        VarMapping {
            entries: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for VarMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} -> {v}")?;
        }
        f.write_str("}")
    }
}

fn search(from: &ConjunctiveQuery, to: &ConjunctiveQuery) -> Option<VarMapping> {
    if from.arity() != to.arity() {
        return None;
    }
    let from_vars = from.variables();
    let to_vars = to.variables();
    let from_idx: HashMap<&Variable, usize> =
        from_vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let to_idx: HashMap<&Variable, usize> =
        to_vars.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut target: HashMap<&str, Vec<Vec<usize>>> = HashMap::new();
    for a in to.body() {
        target
            .entry(a.relation.as_str())
            .or_default()
            .push(a.args.iter().map(|v| to_idx[v]).collect());
    }
    let atoms = from.body().iter().map(|a| {
        (
            a.relation.as_str(),
            a.args.iter().map(|v| from_idx[v]).collect::<Vec<_>>(),
        )
    });
    let mut problem = Problem::new(from_vars.len(), to_vars.len(), atoms, &target);
    for (z, w) in from.head().iter().zip(to.head()) {
        problem.fix(from_idx[z], to_idx[w]);
    }
    let solution = problem.solve()?;
    Some(
        solution
            .into_iter()
            .enumerate()
            .map(|(i, j)| (from_vars[i].clone(), to_vars[j].clone()))
            .collect(),
    )
}

/// A homomorphism from `from` to `to`: every body atom maps onto a body atom of `to` and
/// the head maps positionally onto the head of `to`. The search is complete.
pub fn find_homomorphism(
    from: &ConjunctiveQuery,
    to: &ConjunctiveQuery,
) -> Result<Option<VarMapping>> {
    require_same_arity(from, to)?;
    Ok(search(from, to))
}

/// `q1 ⊑ q2`: holds iff there is a homomorphism from `q2` to `q1`.
pub fn contains(q1: &ConjunctiveQuery, q2: &ConjunctiveQuery) -> Result<bool> {
    require_same_arity(q1, q2)?;
    Ok(search(q2, q1).is_some())
}

pub fn equivalent(q1: &ConjunctiveQuery, q2: &ConjunctiveQuery) -> Result<bool> {
    require_same_arity(q1, q2)?;
    Ok(holds(q1, q2) && holds(q2, q1))
}

/// Containment for queries already known to have equal arity.
pub(crate) fn holds(q1: &ConjunctiveQuery, q2: &ConjunctiveQuery) -> bool {
    search(q2, q1).is_some()
}

/// The core of `q`, in canonical form.
///
/// Atoms are dropped one at a time, in canonical order, whenever the remainder is still
/// equivalent; the fixpoint has no redundant atom and is therefore the core.
pub fn core(q: &ConjunctiveQuery) -> ConjunctiveQuery {
    let mut current = canonical_form(q);
    'outer: loop {
        for i in 0..current.body().len() {
            if let Some(smaller) = current.without_atom(i) {
                // `current ⊑ smaller` always holds; equivalence needs `current → smaller`.
                if search(&current, &smaller).is_some() {
                    current = smaller;
                    continue 'outer;
                }
            }
        }
        break;
    }
    canonical_form(&current)
}

/// Whether `q` is its own core up to renaming.
pub fn is_minimal(q: &ConjunctiveQuery) -> bool {
    core(q).body().len() == q.body().len()
}
