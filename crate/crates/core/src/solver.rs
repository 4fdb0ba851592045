//! Backtracking search for mappings from pattern atoms into a finite relational target,
//! with generalized arc consistency maintained at every node.
//!
//! Both query homomorphisms (target = atoms of another query) and embeddings into an
//! instance (target = facts) reduce to this problem.

use std::collections::{BTreeSet, HashMap};

#[derive(Clone, PartialEq, Eq)]
struct Domain {
    words: Vec<u64>,
}

impl Domain {
    fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        Domain { words }
    }

    fn empty(n: usize) -> Self {
        Domain {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn singleton(n: usize, value: usize) -> Self {
        let mut d = Domain::empty(n);
        d.insert(value);
        d
    }

    fn contains(&self, value: usize) -> bool {
        self.words[value / 64] & (1 << (value % 64)) != 0
    }

    fn insert(&mut self, value: usize) {
        self.words[value / 64] |= 1 << (value % 64);
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Intersects in place; returns whether anything was removed.
    fn retain(&mut self, other: &Domain) -> bool {
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let next = *a & *b;
            changed |= next != *a;
            *a = next;
        }
        changed
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + bit)
                }
            })
        })
    }

    fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

/// One pattern atom: its variables and the target tuples of the same relation that are
/// consistent with the atom's own variable repetitions.
struct Constraint {
    args: Vec<usize>,
    vars: Vec<usize>,
    tuples: Vec<Vec<usize>>,
}

/// A compiled search problem.
pub(crate) struct Problem {
    num_vars: usize,
    num_values: usize,
    constraints: Vec<Constraint>,
    fixed: Vec<(usize, usize)>,
    /// Set when the initial bindings conflict.
    infeasible: bool,
}

impl Problem {
    /// `atoms` are `(relation, variable indices)` over `0..num_vars`; `target` maps
    /// relation names to value tuples over `0..num_values`.
    pub(crate) fn new<'a>(
        num_vars: usize,
        num_values: usize,
        atoms: impl IntoIterator<Item = (&'a str, Vec<usize>)>,
        target: &HashMap<&str, Vec<Vec<usize>>>,
    ) -> Self {
        let constraints = atoms
            .into_iter()
            .map(|(relation, args)| {
                let mut vars: Vec<usize> = args.clone();
                vars.sort_unstable();
                vars.dedup();
                let tuples = target
                    .get(relation)
                    .map(|ts| {
                        ts.iter()
                            .filter(|t| t.len() == args.len() && respects_repeats(&args, t))
                            .cloned()
                            .collect()
                    })
                    .unwrap_or_default();
                Constraint { args, vars, tuples }
            })
            .collect();
        Problem {
            num_vars,
            num_values,
            constraints,
            fixed: Vec::new(),
            infeasible: false,
        }
    }

    /// Pins `var` to `value`. Conflicting pins make the problem infeasible.
    pub(crate) fn fix(&mut self, var: usize, value: usize) {
        match self.fixed.iter().find(|(v, _)| *v == var) {
            Some(&(_, existing)) if existing != value => self.infeasible = true,
            Some(_) => {}
            None => self.fixed.push((var, value)),
        }
    }

    fn initial_domains(&self) -> Option<Vec<Domain>> {
        if self.infeasible || (self.num_values == 0 && self.num_vars > 0) {
            return None;
        }
        let mut doms = vec![Domain::full(self.num_values); self.num_vars];
        for &(var, value) in &self.fixed {
            if value >= self.num_values {
                return None;
            }
            doms[var] = Domain::singleton(self.num_values, value);
        }
        // Constraints with no tuples at all are unsatisfiable even over zero variables.
        if self.constraints.iter().any(|c| c.tuples.is_empty()) {
            return None;
        }
        Some(doms)
    }

    /// Generalized arc consistency; `false` on a wipe-out.
    fn propagate(&self, doms: &mut [Domain]) -> bool {
        loop {
            let mut changed = false;
            for c in &self.constraints {
                let mut support: Vec<Domain> = c
                    .vars
                    .iter()
                    .map(|_| Domain::empty(self.num_values))
                    .collect();
                let mut any = false;
                for t in &c.tuples {
                    if c.args.iter().zip(t).all(|(&v, &val)| doms[v].contains(val)) {
                        any = true;
                        for (&v, &val) in c.args.iter().zip(t) {
                            let slot = c.vars.binary_search(&v).expect("var listed");
                            support[slot].insert(val);
                        }
                    }
                }
                if !any {
                    return false;
                }
                for (slot, &v) in c.vars.iter().enumerate() {
                    if doms[v].retain(&support[slot]) {
                        if doms[v].is_empty() {
                            return false;
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn branch_var(doms: &[Domain], among: impl Iterator<Item = usize>) -> Option<usize> {
        among
            .map(|v| (doms[v].len(), v))
            .filter(|&(n, _)| n > 1)
            .min()
            .map(|(_, v)| v)
    }

    fn search_one(&self, mut doms: Vec<Domain>) -> Option<Vec<Domain>> {
        if !self.propagate(&mut doms) {
            return None;
        }
        let Some(var) = Self::branch_var(&doms, 0..self.num_vars) else {
            return Some(doms);
        };
        for value in doms[var].iter().collect::<Vec<_>>() {
            let mut next = doms.clone();
            next[var] = Domain::singleton(self.num_values, value);
            if let Some(found) = self.search_one(next) {
                return Some(found);
            }
        }
        None
    }

    /// One total assignment, if any exists.
    pub(crate) fn solve(&self) -> Option<Vec<usize>> {
        let doms = self.initial_domains()?;
        let solved = self.search_one(doms)?;
        Some(
            solved
                .iter()
                .map(|d| d.first().expect("nonempty domain"))
                .collect(),
        )
    }

    /// Every distinct image of `project` over all solutions.
    pub(crate) fn project_all(&self, project: &[usize]) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        if let Some(doms) = self.initial_domains() {
            self.project_rec(doms, project, &mut out);
        }
        out
    }

    fn project_rec(
        &self,
        mut doms: Vec<Domain>,
        project: &[usize],
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        if !self.propagate(&mut doms) {
            return;
        }
        match Self::branch_var(&doms, project.iter().copied()) {
            Some(var) => {
                for value in doms[var].iter().collect::<Vec<_>>() {
                    let mut next = doms.clone();
                    next[var] = Domain::singleton(self.num_values, value);
                    self.project_rec(next, project, out);
                }
            }
            None => {
                let image: Vec<usize> = project
                    .iter()
                    .map(|&v| doms[v].first().expect("nonempty domain"))
                    .collect();
                if !out.contains(&image) && self.search_one(doms).is_some() {
                    out.insert(image);
                }
            }
        }
    }
}

fn respects_repeats(args: &[usize], tuple: &[usize]) -> bool {
    for i in 0..args.len() {
        for j in i + 1..args.len() {
            if args[i] == args[j] && tuple[i] != tuple[j] {
                return false;
            }
        }
    }
    true
}
