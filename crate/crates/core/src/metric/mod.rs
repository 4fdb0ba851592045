//! The maximal-containment graph over minimal 2CQs of a fixed schema and arity, and the
//! semantic distance defined as undirected shortest-path length in it.

mod dot;
mod persist;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::hom::core;
use crate::query::{require_2cq, Atom, ConjunctiveQuery, Variable};
use crate::restrict::reduced_of_core;
use crate::schema::Schema;

pub use dot::to_dot;
pub use persist::{default_cache_name, load_graph, load_graph_expecting, save_graph};

pub const DEFAULT_MAX_NODES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Construction fails once more than this many nodes have been discovered.
    pub max_nodes: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// Nodes are canonical minimal 2CQs sorted by canonical text; node ids are positions in
/// that order. Edge `(u, v)` means `v` is maximally contained in `u`.
#[derive(Debug, Clone)]
pub struct McGraph {
    schema: Schema,
    arity: usize,
    nodes: Vec<ConjunctiveQuery>,
    texts: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
    out_degree: Vec<usize>,
}

impl PartialEq for McGraph {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.arity == other.arity
            && self.texts == other.texts
            && self.edges == other.edges
    }
}

impl Eq for McGraph {}

impl McGraph {
    /// Assembles a graph from canonical node queries and directed edges between them.
    pub(crate) fn from_parts(
        schema: Schema,
        arity: usize,
        nodes: Vec<ConjunctiveQuery>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let texts: Vec<String> = nodes.iter().map(ToString::to_string).collect();
        let index = texts
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut neighbours = vec![Vec::new(); nodes.len()];
        let mut out_degree = vec![0; nodes.len()];
        for &(u, v) in &edges {
            neighbours[u].push(v);
            neighbours[v].push(u);
            out_degree[u] += 1;
        }
        for list in &mut neighbours {
            list.sort_unstable();
            list.dedup();
        }
        McGraph {
            schema,
            arity,
            nodes,
            texts,
            index,
            edges,
            neighbours,
            out_degree,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[ConjunctiveQuery] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &ConjunctiveQuery {
        &self.nodes[id]
    }

    /// Canonical text of a node.
    pub fn text(&self, id: usize) -> &str {
        &self.texts[id]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }

    /// Nodes joined to `id` by an edge in either direction.
    pub fn neighbours(&self, id: usize) -> &[usize] {
        &self.neighbours[id]
    }

    pub fn find_text(&self, canonical: &str) -> Option<usize> {
        self.index.get(canonical).copied()
    }

    /// Nodes without outgoing edges.
    pub fn bottoms(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.out_degree[i] == 0)
            .collect()
    }

    /// Nodes without incoming edges.
    pub fn tops(&self) -> Vec<usize> {
        let mut has_parent = vec![false; self.nodes.len()];
        for &(_, v) in &self.edges {
            has_parent[v] = true;
        }
        (0..self.nodes.len()).filter(|&i| !has_parent[i]).collect()
    }

    /// The unique bottom node, if there is exactly one.
    pub fn bottom(&self) -> Option<usize> {
        match self.bottoms().as_slice() {
            [b] => Some(*b),
            _ => None,
        }
    }

    /// Locates the node of a 2CQ by its core.
    pub fn node_of(&self, q: &ConjunctiveQuery) -> Result<usize> {
        if q.arity() != self.arity {
            return Err(Error::GraphArityMismatch {
                expected: self.arity,
                found: q.arity(),
            });
        }
        require_2cq(q, &self.schema)?;
        let c = core(q);
        let text = c.to_string();
        self.find_text(&text).ok_or(Error::NotInGraph(text))
    }

    /// Undirected BFS distances from `source`; `None` for unreachable nodes.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        self.bfs(source).0
    }

    fn bfs(&self, source: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut dist = vec![None; self.nodes.len()];
        let mut parent = vec![None; self.nodes.len()];
        let mut queue = VecDeque::from([source]);
        dist[source] = Some(0);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            for &w in &self.neighbours[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    parent[w] = Some(u);
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Shortest undirected path between two nodes, endpoints included.
    pub fn path_between(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let (_, parent) = self.bfs(from);
        let mut path = vec![to];
        let mut at = to;
        while at != from {
            at = parent[at]?;
            path.push(at);
        }
        path.reverse();
        Some(path)
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.distances_from(0).iter().all(Option::is_some)
    }
}

/// The single-variable query with one all-`x` atom per relation and an `α`-fold `x` head.
pub fn bottom_query(schema: &Schema, alpha: usize) -> Result<ConjunctiveQuery> {
    if schema.is_empty() {
        return Err(Error::EmptySchema);
    }
    if alpha > 0 && schema.relations().all(|(_, a)| a == 0) {
        return Err(Error::NoQueriesOfArity(alpha));
    }
    let x = Variable::new("x").expect("valid name");
    let body = schema
        .relations()
        .map(|(name, arity)| Atom {
            relation: name.to_string(),
            args: vec![x.clone(); arity],
        })
        .collect();
    ConjunctiveQuery::new(vec![x; alpha], body)
}

fn injective_heads(vars: &[Variable], alpha: usize) -> Vec<Vec<Variable>> {
    fn go(
        vars: &[Variable],
        alpha: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<Variable>,
        out: &mut Vec<Vec<Variable>>,
    ) {
        if cur.len() == alpha {
            out.push(cur.clone());
            return;
        }
        for i in 0..vars.len() {
            if !used[i] {
                used[i] = true;
                cur.push(vars[i].clone());
                go(vars, alpha, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(
        vars,
        alpha,
        &mut vec![false; vars.len()],
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// Length-`alpha` sequences over `vars` using every variable at least once.
fn surjective_heads(vars: &[Variable], alpha: usize) -> Vec<Vec<Variable>> {
    fn go(vars: &[Variable], alpha: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<Variable>>) {
        if cur.len() == alpha {
            let covered: BTreeSet<usize> = cur.iter().copied().collect();
            if covered.len() == vars.len() {
                out.push(cur.iter().map(|&i| vars[i].clone()).collect());
            }
            return;
        }
        for i in 0..vars.len() {
            cur.push(i);
            go(vars, alpha, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if !vars.is_empty() {
        go(vars, alpha, &mut Vec::new(), &mut out);
    }
    out
}

/// `tq(ρ)`: cores of the queries with two all-fresh atoms per relation in `rho` and a head
/// of `alpha` distinct body variables (repeating variables only when the body has fewer
/// than `alpha`). Deduplicated and sorted by canonical text.
pub fn top_queries<'a>(
    rho: impl IntoIterator<Item = &'a str>,
    schema: &Schema,
    alpha: usize,
) -> Result<Vec<ConjunctiveQuery>> {
    let rho: BTreeSet<&str> = rho.into_iter().collect();
    if rho.is_empty() {
        return Err(Error::EmptyRelationSet);
    }
    let sub = schema.restrict(rho.iter().copied())?;

    let mut counter = 0;
    let mut fresh = |n: usize| -> Vec<Variable> {
        (0..n)
            .map(|_| {
                counter += 1;
                Variable::new(format!("x{counter}")).expect("valid name")
            })
            .collect()
    };
    let mut body = Vec::new();
    for (name, arity) in sub.relations() {
        for _ in 0..2 {
            body.push(Atom {
                relation: name.to_string(),
                args: fresh(arity),
            });
        }
    }
    let vars: Vec<Variable> = body.iter().flat_map(|a| a.args.iter().cloned()).collect();
    let heads = if vars.len() >= alpha {
        injective_heads(&vars, alpha)
    } else {
        surjective_heads(&vars, alpha)
    };

    let mut out = BTreeMap::new();
    for head in heads {
        let c = core(&ConjunctiveQuery::from_parts(head, body.clone()));
        out.entry(c.to_string()).or_insert(c);
    }
    Ok(out.into_values().collect())
}

fn nonempty_subsets(schema: &Schema) -> Vec<Vec<&str>> {
    let names: Vec<&str> = schema.names().collect();
    (1u64..(1 << names.len()))
        .map(|mask| {
            names
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| *n)
                .collect()
        })
        .collect()
}

pub fn build_mc_graph(schema: &Schema, alpha: usize) -> Result<McGraph> {
    build_mc_graph_with(schema, alpha, &BuildOptions::default())
}

/// Builds `G_{σ,α}`: seeds with `tq(σ')` for every nonempty `σ' ⊆ σ`, then closes the node
/// set under reduced restrictions, level by level in canonical text order.
pub fn build_mc_graph_with(
    schema: &Schema,
    alpha: usize,
    options: &BuildOptions,
) -> Result<McGraph> {
    bottom_query(schema, alpha)?;
    if schema.len() >= 63 {
        return Err(Error::NodeCapExceeded {
            cap: options.max_nodes,
            discovered: 0,
        });
    }

    let mut nodes: BTreeMap<String, ConjunctiveQuery> = BTreeMap::new();
    let check_cap = |n: usize| {
        if n > options.max_nodes {
            Err(Error::NodeCapExceeded {
                cap: options.max_nodes,
                discovered: n,
            })
        } else {
            Ok(())
        }
    };

    for subset in nonempty_subsets(schema) {
        for top in top_queries(subset, schema, alpha)? {
            nodes.entry(top.to_string()).or_insert(top);
            check_cap(nodes.len())?;
        }
    }

    let mut edges_by_text: Vec<(String, String)> = Vec::new();
    let mut level: Vec<String> = nodes.keys().cloned().collect();
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for text in &level {
            let q = &nodes[text];
            let children = reduced_of_core(q, schema);
            for child in children {
                let child_text = child.to_string();
                if !nodes.contains_key(&child_text) {
                    nodes.insert(child_text.clone(), child);
                    check_cap(nodes.len())?;
                    next.insert(child_text.clone());
                }
                edges_by_text.push((text.clone(), child_text));
            }
        }
        level = next.into_iter().collect();
    }

    let ids: HashMap<&str, usize> = nodes
        .keys()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let edges: Vec<(usize, usize)> = edges_by_text
        .iter()
        .map(|(u, v)| (ids[u.as_str()], ids[v.as_str()]))
        .collect();
    Ok(McGraph::from_parts(
        schema.clone(),
        alpha,
        nodes.into_values().collect(),
        edges,
    ))
}

/// Semantic distance: undirected shortest-path length between the nodes of the cores.
pub fn distance(g: &McGraph, q1: &ConjunctiveQuery, q2: &ConjunctiveQuery) -> Result<usize> {
    Ok(distance_path(g, q1, q2)?.len() - 1)
}

/// One shortest path from the node of `q1` to the node of `q2`, as canonical queries.
pub fn distance_path(
    g: &McGraph,
    q1: &ConjunctiveQuery,
    q2: &ConjunctiveQuery,
) -> Result<Vec<ConjunctiveQuery>> {
    let a = g.node_of(q1)?;
    let b = g.node_of(q2)?;
    let path = g
        .path_between(a, b)
        .ok_or_else(|| Error::Disconnected(g.text(a).to_string(), g.text(b).to_string()))?;
    Ok(path.into_iter().map(|i| g.node(i).clone()).collect())
}

/// Canonical core text, the node key of a query.
pub fn node_key(q: &ConjunctiveQuery) -> String {
    canonical_form(&core(q)).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::syntax::{parse_query, parse_schema};

    fn canon(s: &str) -> String {
        canonicalize(&parse_query(s).unwrap())
    }

    #[test]
    fn bottom_construction() {
        let s = parse_schema("R/2 L/1").unwrap();
        assert_eq!(
            canonicalize(&bottom_query(&s, 2).unwrap()),
            canon("(x,x) <- R(x,x), L(x)")
        );
        let s = parse_schema("E/2").unwrap();
        assert_eq!(bottom_query(&s, 0).unwrap().to_string(), "() <- E(x, x)");
        assert!(matches!(
            bottom_query(&Schema::new(), 0),
            Err(Error::EmptySchema)
        ));
    }

    #[test]
    fn top_queries_small_cases() {
        let s = parse_schema("R/2 L/1").unwrap();
        let tops: Vec<String> = top_queries(["R"], &s, 0)
            .unwrap()
            .iter()
            .map(canonicalize)
            .collect();
        assert_eq!(tops, vec![canon("() <- R(x,y)")]);
        let tops: Vec<String> = top_queries(["L"], &s, 1)
            .unwrap()
            .iter()
            .map(canonicalize)
            .collect();
        assert_eq!(tops, vec![canon("(x) <- L(x)")]);
        assert!(matches!(
            top_queries([], &s, 0),
            Err(Error::EmptyRelationSet)
        ));
        assert!(matches!(
            top_queries(["S"], &s, 0),
            Err(Error::UnknownRelation(_))
        ));
    }

    #[test]
    fn top_heads_repeat_only_when_forced() {
        let s = parse_schema("L/1").unwrap();
        let tops: BTreeSet<String> = top_queries(["L"], &s, 3)
            .unwrap()
            .iter()
            .map(canonicalize)
            .collect();
        let expected: BTreeSet<String> = [
            "(x,x,y) <- L(x), L(y)",
            "(x,y,x) <- L(x), L(y)",
            "(x,y,y) <- L(x), L(y)",
        ]
        .into_iter()
        .map(canon)
        .collect();
        assert_eq!(tops, expected);
    }

    #[test]
    fn single_binary_relation_boolean_graph() {
        let s = parse_schema("R/2").unwrap();
        let g = build_mc_graph(&s, 0).unwrap();
        let nodes: BTreeSet<&str> = (0..g.node_count()).map(|i| g.text(i)).collect();
        let expected: BTreeSet<String> = [
            "() <- R(x,y)",
            "() <- R(x,y), R(y,z)",
            "() <- R(x,y), R(y,x)",
            "() <- R(x,x)",
        ]
        .into_iter()
        .map(canon)
        .collect();
        assert_eq!(nodes, expected.iter().map(String::as_str).collect());
        assert_eq!(g.edge_count(), 3);
        let bottom = g.bottom().expect("unique bottom");
        assert_eq!(g.text(bottom), canon("() <- R(x,x)"));
    }

    #[test]
    fn unary_schema_has_single_node() {
        let s = parse_schema("L/1").unwrap();
        let g = build_mc_graph(&s, 0).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
    }

    #[test]
    fn node_cap_is_enforced() {
        let s = parse_schema("R/2").unwrap();
        let err = build_mc_graph_with(&s, 0, &BuildOptions { max_nodes: 2 }).unwrap_err();
        assert!(matches!(
            err,
            Error::NodeCapExceeded {
                cap: 2,
                discovered: 3
            }
        ));
    }

    #[test]
    fn distance_on_path_graph() {
        let s = parse_schema("R/2").unwrap();
        let g = build_mc_graph(&s, 0).unwrap();
        let q = |t: &str| parse_query(t).unwrap();
        assert_eq!(
            distance(&g, &q("() <- R(x,y)"), &q("() <- R(a,a)")).unwrap(),
            3
        );
        assert_eq!(
            distance(&g, &q("() <- R(x,y), R(u,w)"), &q("() <- R(x,y)")).unwrap(),
            0
        );
        assert!(matches!(
            distance(&g, &q("(x) <- R(x,y)"), &q("() <- R(x,y)")),
            Err(Error::GraphArityMismatch { .. })
        ));
        assert!(matches!(
            distance(&g, &q("() <- S(x,y)"), &q("() <- R(x,y)")),
            Err(Error::UnknownRelation(_))
        ));
    }
}
