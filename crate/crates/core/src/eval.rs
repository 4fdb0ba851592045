use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::instance::{Constant, FrozenQuery, Instance};
use crate::query::{ConjunctiveQuery, Variable};
use crate::solver::Problem;

/// A query answer: one constant per head position.
pub type Tuple = Vec<Constant>;

/// Evaluates `q` on `instance`: the set of head images over all embeddings.
///
/// Boolean queries yield either the empty set (false) or `{()}` (true).
pub fn evaluate(q: &ConjunctiveQuery, instance: &Instance) -> Result<BTreeSet<Tuple>> {
    for atom in q.body() {
        if let Some(expected) = instance.arity(&atom.relation) {
            if expected != atom.arity() {
                return Err(Error::ArityMismatch {
                    relation: atom.relation.clone(),
                    expected,
                    found: atom.arity(),
                });
            }
        }
    }

    let constants: Vec<&Constant> = instance.constants().into_iter().collect();
    let const_index: HashMap<&Constant, usize> =
        constants.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut target: HashMap<&str, Vec<Vec<usize>>> = HashMap::new();
    for fact in instance.facts() {
        target
            .entry(fact.relation.as_str())
            .or_default()
            .push(fact.args.iter().map(|c| const_index[c]).collect());
    }

    let vars = q.variables();
    let var_index: HashMap<&Variable, usize> =
        vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let atoms = q.body().iter().map(|a| {
        (
            a.relation.as_str(),
            a.args.iter().map(|v| var_index[v]).collect::<Vec<_>>(),
        )
    });
    let problem = Problem::new(vars.len(), constants.len(), atoms, &target);
    let head: Vec<usize> = q.head().iter().map(|v| var_index[v]).collect();

    Ok(problem
        .project_all(&head)
        .into_iter()
        .map(|image| image.into_iter().map(|i| constants[i].clone()).collect())
        .collect())
}

/// Name of the constant that stands for `v` in a frozen query.
pub fn frozen_constant(v: &Variable) -> Constant {
    Constant::new(format!("c_{v}")).expect("prefixing a variable keeps it a valid identifier")
}

/// The canonical database of `q`: each variable `x` becomes the constant `c_x`.
pub fn freeze(q: &ConjunctiveQuery) -> FrozenQuery {
    let mut instance = Instance::new();
    let consts: BTreeMap<Variable, Constant> = q
        .variables()
        .into_iter()
        .map(|v| {
            let c = frozen_constant(&v);
            (v, c)
        })
        .collect();
    for atom in q.body() {
        instance
            .insert(
                atom.relation.clone(),
                atom.args.iter().map(|v| consts[v].clone()).collect(),
            )
            .expect("a valid query has consistent arities");
    }
    FrozenQuery {
        instance,
        head_tuple: q.head().iter().map(|v| consts[v].clone()).collect(),
    }
}
