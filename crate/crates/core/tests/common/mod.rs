#![allow(dead_code)]

use std::collections::BTreeMap;

use cqdist_core::{canonicalize, evaluate, freeze, Atom, ConjunctiveQuery, Schema, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(text: &str) -> ConjunctiveQuery {
    cqdist_core::parse_query(text).unwrap()
}

pub fn schema(text: &str) -> Schema {
    cqdist_core::parse_schema(text).unwrap()
}

fn var(i: usize) -> Variable {
    Variable::new(format!("w{i}")).unwrap()
}

/// Containment decided on the canonical database of `q1`, without any homomorphism search.
pub fn frozen_contains(q1: &ConjunctiveQuery, q2: &ConjunctiveQuery) -> bool {
    let fz = freeze(q1);
    evaluate(q2, &fz.instance).unwrap().contains(&fz.head_tuple)
}

pub fn frozen_equivalent(q1: &ConjunctiveQuery, q2: &ConjunctiveQuery) -> bool {
    frozen_contains(q1, q2) && frozen_contains(q2, q1)
}

/// No single atom can be dropped without changing the answers.
pub fn frozen_minimal(q: &ConjunctiveQuery) -> bool {
    (0..q.body().len()).all(|i| {
        let mut body = q.body().to_vec();
        body.remove(i);
        match ConjunctiveQuery::new(q.head().to_vec(), body) {
            Ok(smaller) => !frozen_equivalent(q, &smaller),
            Err(_) => true,
        }
    })
}

/// Set partitions of `0..n` as restricted growth strings.
fn growth_strings(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for v in 0..=limit {
            cur.push(v);
            go(n, cur, max.max(v), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, &mut Vec::new(), 0, &mut out);
    out
}

fn head_sequences(vars: usize, alpha: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..alpha {
        out = out
            .into_iter()
            .flat_map(|h| {
                (0..vars).map(move |v| {
                    let mut h = h.clone();
                    h.push(v);
                    h
                })
            })
            .collect();
    }
    out
}

/// Every 2CQ over `schema` with `alpha` head positions, up to renaming, possibly with
/// redundant atoms and repeats.
pub fn enumerate_2cqs(schema: &Schema, alpha: usize) -> Vec<ConjunctiveQuery> {
    let rels: Vec<(String, usize)> = schema
        .relations()
        .map(|(n, a)| (n.to_string(), a))
        .collect();
    let mut counts = vec![vec![]];
    for _ in &rels {
        counts = counts
            .into_iter()
            .flat_map(|c: Vec<usize>| {
                (0..=2).map(move |k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for count in counts {
        if count.iter().all(|&c| c == 0) {
            continue;
        }
        let slots: Vec<(&str, usize)> = rels
            .iter()
            .zip(&count)
            .flat_map(|((n, a), &c)| std::iter::repeat_n((n.as_str(), *a), c))
            .collect();
        let positions: usize = slots.iter().map(|(_, a)| a).sum();
        for rgs in growth_strings(positions) {
            let nvars = rgs.iter().max().map_or(0, |m| m + 1);
            let mut body = Vec::new();
            let mut at = 0;
            for (name, arity) in &slots {
                body.push(
                    Atom::new(*name, rgs[at..at + arity].iter().map(|&v| var(v)).collect())
                        .unwrap(),
                );
                at += arity;
            }
            for head in head_sequences(nvars, alpha) {
                let head = head.into_iter().map(var).collect();
                if let Ok(q) = ConjunctiveQuery::new(head, body.clone()) {
                    out.push(q);
                }
            }
        }
    }
    out
}

/// All minimal 2CQs over `schema` of arity `alpha`, keyed by canonical text.
pub fn oracle_nodes(schema: &Schema, alpha: usize) -> BTreeMap<String, ConjunctiveQuery> {
    let mut out = BTreeMap::new();
    for q in enumerate_2cqs(schema, alpha) {
        if q.is_2cq() && frozen_minimal(&q) {
            out.entry(canonicalize(&q)).or_insert(q);
        }
    }
    out
}

/// Hasse diagram of strict containment among `nodes`: `(u, v)` when `v ⊏ u` with no
/// node strictly between.
pub fn oracle_edges(nodes: &[ConjunctiveQuery]) -> Vec<(usize, usize)> {
    let n = nodes.len();
    let le: Vec<Vec<bool>> = nodes
        .iter()
        .map(|a| nodes.iter().map(|b| frozen_contains(a, b)).collect())
        .collect();
    let lt = |a: usize, b: usize| le[a][b] && !le[b][a];
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if lt(v, u) && !(0..n).any(|m| lt(v, m) && lt(m, u)) {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn random_2cq<R: Rng>(
    rng: &mut R,
    schema: &Schema,
    alpha: usize,
    max_vars: usize,
) -> ConjunctiveQuery {
    let rels: Vec<(&str, usize)> = schema.relations().collect();
    loop {
        let mut body = Vec::new();
        for &(name, arity) in &rels {
            for _ in 0..rng.random_range(0..=2) {
                let args = (0..arity)
                    .map(|_| var(rng.random_range(0..max_vars)))
                    .collect();
                body.push(Atom::new(name, args).unwrap());
            }
        }
        if body.is_empty() {
            continue;
        }
        let mut used: Vec<Variable> = body.iter().flat_map(|a| a.args.clone()).collect();
        used.sort();
        used.dedup();
        if used.is_empty() && alpha > 0 {
            continue;
        }
        let head = (0..alpha)
            .map(|_| used[rng.random_range(0..used.len())].clone())
            .collect();
        return ConjunctiveQuery::new(head, body).unwrap();
    }
}

/// Applies a random injective renaming and shuffles the body.
pub fn rename_and_shuffle<R: Rng>(rng: &mut R, q: &ConjunctiveQuery) -> ConjunctiveQuery {
    let vars = q.variables();
    let mut codes: Vec<usize> = (0..vars.len()).collect();
    codes.shuffle(rng);
    let map: BTreeMap<Variable, Variable> = vars
        .into_iter()
        .zip(codes)
        .map(|(v, c)| (v, Variable::new(format!("r{c}")).unwrap()))
        .collect();
    let renamed = q.substitute(&map);
    let mut body = renamed.body().to_vec();
    body.shuffle(rng);
    ConjunctiveQuery::new(renamed.head().to_vec(), body).unwrap()
}

/// Adds a redundant copy of an atom whose relation is used once, with its
/// non-distinguished variables made fresh. The result is equivalent and still a 2CQ.
pub fn pad(q: &ConjunctiveQuery) -> ConjunctiveQuery {
    let counts = q.relation_counts();
    let Some(atom) = q.body().iter().find(|a| counts[a.relation.as_str()] == 1) else {
        return q.clone();
    };
    let args = atom
        .args
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if q.is_distinguished(v) {
                v.clone()
            } else {
                Variable::new(format!("pad{i}")).unwrap()
            }
        })
        .collect();
    let mut body = q.body().to_vec();
    body.push(Atom::new(atom.relation.clone(), args).unwrap());
    ConjunctiveQuery::new(q.head().to_vec(), body).unwrap()
}
