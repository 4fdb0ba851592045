//! Canonical forms up to variable renaming and atom reordering.
//!
//! The encoding of a query under a given atom order numbers variables by first
//! occurrence (head, then body left to right). The canonical form is the
//! lexicographically least encoding over all atom orders. Since atoms of one relation
//! have the same width, the least concatenation is built greedily: at each step take
//! the least next-atom encoding, branching only over atoms that tie for it.

use std::collections::HashMap;

use crate::query::{Atom, ConjunctiveQuery, Variable};

type Encoded<'a> = (&'a str, Vec<usize>);

struct Search<'a> {
    atoms: Vec<(&'a str, Vec<usize>)>,
    best: Option<(Vec<Encoded<'a>>, Vec<usize>)>,
}

impl<'a> Search<'a> {
    fn encode(&self, atom: usize, numbering: &[Option<usize>], next: usize) -> Vec<usize> {
        let mut fresh: Vec<(usize, usize)> = Vec::new();
        let mut n = next;
        self.atoms[atom]
            .1
            .iter()
            .map(|&v| match numbering[v] {
                Some(code) => code,
                None => match fresh.iter().find(|(var, _)| *var == v) {
                    Some(&(_, code)) => code,
                    None => {
                        fresh.push((v, n));
                        n += 1;
                        n - 1
                    }
                },
            })
            .collect()
    }

    fn run(
        &mut self,
        numbering: &mut Vec<Option<usize>>,
        next: usize,
        remaining: &mut Vec<usize>,
        prefix: &mut Vec<Encoded<'a>>,
        order: &mut Vec<usize>,
    ) {
        if remaining.is_empty() {
            let better = match &self.best {
                None => true,
                Some((best, _)) => prefix.as_slice() < best.as_slice(),
            };
            if better {
                self.best = Some((prefix.clone(), order.clone()));
            }
            return;
        }

        let candidates: Vec<(usize, Encoded<'a>)> = remaining
            .iter()
            .map(|&i| (i, (self.atoms[i].0, self.encode(i, numbering, next))))
            .collect();
        let least = candidates
            .iter()
            .map(|(_, e)| e)
            .min()
            .expect("remaining is nonempty")
            .clone();

        if let Some((best, _)) = &self.best {
            let depth = prefix.len();
            if best[..depth] == prefix[..] && least > best[depth] {
                return;
            }
        }

        let tied: Vec<usize> = candidates
            .iter()
            .filter(|(_, e)| *e == least)
            .map(|(i, _)| *i)
            .collect();
        for atom in tied {
            let mut assigned = Vec::new();
            let mut n = next;
            for &v in &self.atoms[atom].1 {
                if numbering[v].is_none() {
                    numbering[v] = Some(n);
                    assigned.push(v);
                    n += 1;
                }
            }
            let pos = remaining
                .iter()
                .position(|&i| i == atom)
                .expect("atom is remaining");
            remaining.remove(pos);
            prefix.push(least.clone());
            order.push(atom);

            self.run(numbering, n, remaining, prefix, order);

            order.pop();
            prefix.pop();
            remaining.insert(pos, atom);
            for v in assigned {
                numbering[v] = None;
            }
        }
    }
}

fn canonical_name(code: usize) -> Variable {
    Variable::new(format!("v{code}")).expect("generated name is a valid variable")
}

/// The query renamed to `v0, v1, …` with atoms in canonical order.
///
/// Two queries get the same canonical form iff a variable bijection maps one onto the
/// other, head to head and body onto body.
pub fn canonical_form(q: &ConjunctiveQuery) -> ConjunctiveQuery {
    let vars = q.variables();
    let index: HashMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut numbering: Vec<Option<usize>> = vec![None; vars.len()];
    let mut next = 0;
    let mut head_codes = Vec::with_capacity(q.arity());
    for v in q.head() {
        let i = index[v];
        let code = *numbering[i].get_or_insert_with(|| {
            next += 1;
            next - 1
        });
        head_codes.push(code);
    }

    let mut search = Search {
        atoms: q
            .body()
            .iter()
            .map(|a| {
                (
                    a.relation.as_str(),
                    a.args.iter().map(|v| index[v]).collect(),
                )
            })
            .collect(),
        best: None,
    };
    let mut remaining: Vec<usize> = (0..q.body().len()).collect();
    search.run(
        &mut numbering,
        next,
        &mut remaining,
        &mut Vec::new(),
        &mut Vec::new(),
    );
    let (encoding, _) = search.best.expect("search visits at least one order");

    let head = head_codes.into_iter().map(canonical_name).collect();
    let body = encoding
        .into_iter()
        .map(|(relation, codes)| Atom {
            relation: relation.to_string(),
            args: codes.into_iter().map(canonical_name).collect(),
        })
        .collect();
    ConjunctiveQuery::from_parts(head, body)
}

/// Canonical text: equal for queries that differ only by renaming and atom order.
pub fn canonicalize(q: &ConjunctiveQuery) -> String {
    canonical_form(q).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_query;

    fn canon(s: &str) -> String {
        canonicalize(&parse_query(s).unwrap())
    }

    #[test]
    fn renaming_is_erased() {
        assert_eq!(canon("(y,x) <- R(y,x)"), canon("(a,b) <- R(a,b)"));
        assert_eq!(canon("(a,b) <- R(a,b)"), "(v0, v1) <- R(v0, v1)");
    }

    #[test]
    fn reordering_and_renaming() {
        assert_eq!(canon("() <- R(x,y), L(x)"), canon("() <- L(u), R(u,v)"));
        assert_ne!(canon("() <- R(x,y), L(x)"), canon("() <- R(x,y), L(y)"));
    }

    #[test]
    fn head_order_matters() {
        assert_ne!(canon("(x,y) <- R(x,y)"), canon("(y,x) <- R(x,y)"));
    }

    #[test]
    fn idempotent() {
        for s in [
            "(x, y) <- R(x, y), R(y, x), L(x), L(y)",
            "() <- E(a,b), E(c,b), E(c,d), E(d,e)",
            "(x, x) <- R(x, x), L(x)",
        ] {
            let once = canon(s);
            assert_eq!(canonicalize(&parse_query(&once).unwrap()), once);
        }
    }

    #[test]
    fn path_orientations_distinguished() {
        // 100 reads 110 right to left; 011 and 101 are different shapes.
        let o110 = canon("() <- E(z1,z2), E(z2,z3), E(z4,z3)");
        let o011 = canon("() <- E(z2,z1), E(z2,z3), E(z3,z4)");
        let o101 = canon("() <- E(z1,z2), E(z3,z2), E(z3,z4)");
        assert_ne!(o110, o011);
        assert_ne!(o110, o101);
        let o100 = canon("() <- E(z1,z2), E(z3,z2), E(z4,z3)");
        assert_eq!(o110, o100);
    }
}
