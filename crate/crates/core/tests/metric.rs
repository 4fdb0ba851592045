mod common;

use common::{pad, q, rename_and_shuffle, schema};
use cqdist_core::metric::{default_cache_name, load_graph, save_graph, to_dot};
use cqdist_core::{
    bottom_query, build_mc_graph, canonicalize, distance, distance_path, is_maximally_contained,
    Error, McGraph,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn all_pairs(g: &McGraph) -> Vec<Vec<usize>> {
    (0..g.node_count())
        .map(|i| {
            g.distances_from(i)
                .into_iter()
                .map(|d| d.expect("graph is connected"))
                .collect()
        })
        .collect()
}

#[test]
fn metric_axioms_on_desk_scale_graphs() {
    for (text, alpha) in [
        ("R/2", 0),
        ("R/2", 1),
        ("R/2", 2),
        ("R/2 L/1", 0),
        ("R/2 L/1", 1),
        ("T/3", 1),
    ] {
        let g = build_mc_graph(&schema(text), alpha).unwrap();
        let d = all_pairs(&g);
        let n = g.node_count();
        for a in 0..n {
            assert_eq!(d[a][a], 0);
            for b in 0..n {
                assert_eq!(d[a][b], d[b][a]);
                if a != b {
                    assert!(d[a][b] > 0);
                }
                for c in 0..n {
                    assert!(d[a][c] <= d[a][b] + d[b][c]);
                }
            }
        }
    }
}

#[test]
fn graph_shape() {
    for (text, alpha) in [("R/2", 1), ("R/2 L/1", 2), ("T/3", 0)] {
        let s = schema(text);
        let g = build_mc_graph(&s, alpha).unwrap();
        assert!(g.is_connected());
        let bottom = g.bottom().expect("unique bottom");
        assert_eq!(
            g.text(bottom),
            canonicalize(&bottom_query(&s, alpha).unwrap())
        );
        for &(u, v) in g.edges() {
            assert!(is_maximally_contained(g.node(v), g.node(u), &s).unwrap());
        }
    }
}

#[test]
fn distance_ignores_renaming_and_padding() {
    let s = schema("R/2 L/1");
    let g = build_mc_graph(&s, 1).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for a in (0..g.node_count()).step_by(7) {
        for b in (0..g.node_count()).step_by(5) {
            let (qa, qb) = (g.node(a), g.node(b));
            let base = distance(&g, qa, qb).unwrap();
            let qa2 = pad(&rename_and_shuffle(&mut rng, qa));
            let qb2 = rename_and_shuffle(&mut rng, &pad(qb));
            assert_eq!(distance(&g, &qa2, &qb2).unwrap(), base);
        }
    }
}

#[test]
fn witness_paths_are_shortest_and_connected() {
    let s = schema("R/2 L/1");
    let g = build_mc_graph(&s, 2).unwrap();
    let q1 = q("(x,y) <- R(x,y), R(y,x), L(x), L(y)");
    let q2 = q("(x,y) <- R(x,z), L(y), L(z)");
    let path = distance_path(&g, &q1, &q2).unwrap();
    assert_eq!(path.len() - 1, distance(&g, &q1, &q2).unwrap());
    for w in path.windows(2) {
        let (a, b) = (g.node_of(&w[0]).unwrap(), g.node_of(&w[1]).unwrap());
        assert!(g.has_edge(a, b) || g.has_edge(b, a));
    }
}

#[test]
fn queries_outside_the_class_are_rejected() {
    let s = schema("R/2 L/1");
    let g = build_mc_graph(&s, 0).unwrap();
    let base = q("() <- R(x,y)");
    assert!(matches!(
        distance(&g, &q("() <- R(x,y), R(y,z), R(z,w)"), &base),
        Err(Error::NotTwoCq { .. })
    ));
    assert!(matches!(
        distance(&g, &q("() <- R(x,y,z)"), &base),
        Err(Error::ArityMismatch { .. })
    ));
}

#[test]
fn persistence_round_trip() {
    let s = schema("R/2 L/1");
    let g = build_mc_graph(&s, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(default_cache_name(&s, 1));
    save_graph(&g, &path).unwrap();
    let first = std::fs::read(&path).unwrap();
    let back = load_graph(&path).unwrap();
    assert_eq!(back, g);
    save_graph(&back, &path).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);

    let rebuilt = build_mc_graph(&s, 1).unwrap();
    assert_eq!(rebuilt.to_json(), g.to_json());
    assert_eq!(to_dot(&rebuilt), to_dot(&g));
}
