use std::fmt::Write;

use super::McGraph;

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering with edges pointing from a query to the queries maximally
/// contained in it, so more specific queries sit lower in the layout.
pub fn to_dot(g: &McGraph) -> String {
    let mut out = String::from(
        "digraph mc_graph {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n",
    );
    for id in 0..g.node_count() {
        writeln!(out, "  n{id} [label=\"{}\"];", escape(g.text(id))).unwrap();
    }
    for &(u, v) in g.edges() {
        writeln!(out, "  n{u} -> n{v};").unwrap();
    }
    out.push_str("}\n");
    out
}
