use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::McGraph;
use crate::canon::canonicalize;
use crate::error::{Error, Result};
use crate::schema::Schema;
use crate::syntax::parse_query_with_schema;

const FORMAT: &str = "cqdist-mc-graph";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NodeEntry {
    id: usize,
    query: String,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    format: String,
    version: u32,
    schema: Schema,
    arity: usize,
    node_count: usize,
    edge_count: usize,
    nodes: Vec<NodeEntry>,
    edges: Vec<[usize; 2]>,
}

/// File name used for a cached graph when no explicit path is given.
pub fn default_cache_name(schema: &Schema, arity: usize) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{schema}|{arity}|v{VERSION}").as_bytes());
    let digest = hasher.finalize();
    let hex: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("mcgraph-{hex}.json")
}

impl McGraph {
    /// Serialized form. Identical graphs always produce identical bytes.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            format: FORMAT.to_string(),
            version: VERSION,
            schema: self.schema.clone(),
            arity: self.arity,
            node_count: self.node_count(),
            edge_count: self.edge_count(),
            nodes: self
                .texts
                .iter()
                .enumerate()
                .map(|(id, t)| NodeEntry {
                    id,
                    query: t.clone(),
                })
                .collect(),
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("graph serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<McGraph> {
        let malformed = |m: String| Error::MalformedGraph(m);
        let file: GraphFile = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        if file.format != FORMAT {
            return Err(malformed(format!(
                "unexpected format tag `{}`",
                file.format
            )));
        }
        if file.version != VERSION {
            return Err(malformed(format!("unsupported version {}", file.version)));
        }
        if file.nodes.len() != file.node_count {
            return Err(malformed(format!(
                "node_count is {} but {} nodes are listed",
                file.node_count,
                file.nodes.len()
            )));
        }
        if file.edges.len() != file.edge_count {
            return Err(malformed(format!(
                "edge_count is {} but {} edges are listed",
                file.edge_count,
                file.edges.len()
            )));
        }

        let mut nodes = Vec::with_capacity(file.nodes.len());
        for (expected, entry) in file.nodes.iter().enumerate() {
            if entry.id != expected {
                return Err(malformed(format!("node id {} out of sequence", entry.id)));
            }
            let q = parse_query_with_schema(&entry.query, &file.schema)
                .map_err(|e| malformed(format!("node {}: {e}", entry.id)))?;
            if q.arity() != file.arity {
                return Err(malformed(format!(
                    "node {} has arity {}",
                    entry.id,
                    q.arity()
                )));
            }
            if canonicalize(&q) != entry.query {
                return Err(malformed(format!(
                    "node {} is not in canonical form",
                    entry.id
                )));
            }
            if expected > 0 && file.nodes[expected - 1].query >= entry.query {
                return Err(malformed(format!(
                    "node {} breaks canonical order",
                    entry.id
                )));
            }
            nodes.push(q);
        }
        let n = nodes.len();
        if let Some([u, v]) = file.edges.iter().find(|[u, v]| *u >= n || *v >= n) {
            return Err(malformed(format!(
                "edge ({u}, {v}) references a missing node"
            )));
        }
        Ok(McGraph::from_parts(
            file.schema,
            file.arity,
            nodes,
            file.edges.into_iter().map(|[u, v]| (u, v)),
        ))
    }
}

pub fn save_graph(g: &McGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, g.to_json()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<McGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    McGraph::from_json(&text)
}

/// Loads a cached graph and checks it was built for `schema` and `arity`.
pub fn load_graph_expecting(
    path: impl AsRef<Path>,
    schema: &Schema,
    arity: usize,
) -> Result<McGraph> {
    let g = load_graph(path)?;
    if g.schema() != schema || g.arity() != arity {
        return Err(Error::GraphHeaderMismatch(format!(
            "file holds schema `{}` with arity {}, expected `{schema}` with arity {arity}",
            g.schema(),
            g.arity()
        )));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::build_mc_graph;
    use crate::syntax::parse_schema;

    #[test]
    fn round_trip_is_byte_stable() {
        let s = parse_schema("R/2").unwrap();
        let g = build_mc_graph(&s, 0).unwrap();
        let text = g.to_json();
        let back = McGraph::from_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn rejects_truncated_and_inconsistent_files() {
        let s = parse_schema("R/2").unwrap();
        let text = build_mc_graph(&s, 0).unwrap().to_json();
        assert!(matches!(
            McGraph::from_json(&text[..text.len() / 2]),
            Err(Error::MalformedGraph(_))
        ));
        let bad = text.replace("\"node_count\": 4", "\"node_count\": 5");
        assert!(matches!(
            McGraph::from_json(&bad),
            Err(Error::MalformedGraph(_))
        ));
    }

    #[test]
    fn header_mismatch_is_reported() {
        let s = parse_schema("R/2").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(default_cache_name(&s, 0));
        save_graph(&build_mc_graph(&s, 0).unwrap(), &path).unwrap();
        assert!(load_graph_expecting(&path, &s, 0).is_ok());
        assert!(matches!(
            load_graph_expecting(&path, &s, 1),
            Err(Error::GraphHeaderMismatch(_))
        ));
    }
}
