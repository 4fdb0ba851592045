"""Smoke test for the cqdist extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml` or
`pip install` of a wheel from `maturin build -m crates/py/Cargo.toml`.
"""

import cqdist

Q1 = "(x, y) <- R(x, y), R(y, x), L(x), L(y)"
Q2 = "(x, y) <- R(x, z), L(y), L(z)"


def main():
    schema = cqdist.Schema("R/2 L/1")
    q1, q2 = cqdist.Query(Q1, schema), cqdist.Query(Q2, schema)

    assert cqdist.contains(q1, q2)
    assert not cqdist.contains(q2, q1)
    assert cqdist.find_homomorphism(q2, q1) == {"x": "x", "y": "y", "z": "y"}

    padded = cqdist.Query("(x, y) <- R(x, y), R(y, x), R(y, z), L(x), L(y)")
    assert cqdist.equivalent(padded, q1)
    assert padded.core() == q1
    assert not padded.is_minimal()

    instance = cqdist.Instance("R(a,b). R(a,c). R(b,a). R(c,c). L(a). L(b). L(c).")
    assert cqdist.evaluate(q1, instance) == [["a", "b"], ["b", "a"], ["c", "c"]]
    assert len(cqdist.evaluate(q2, instance)) == 9

    edge = cqdist.Schema("R/2")
    top = cqdist.Query("() <- R(x, y)")
    assert [str(r) for r in cqdist.reduced_restrictions(top, edge)] == ["() <- R(v0, v1), R(v1, v2)"]
    assert cqdist.is_maximally_contained(cqdist.Query("() <- R(x, y), R(y, x)"),
                                         cqdist.Query("() <- R(x, y), R(y, z)"), edge)

    graph = cqdist.build_graph(edge, 0)
    assert (graph.node_count(), graph.edge_count()) == (4, 3)
    assert graph.bottom() == "() <- R(v0, v0)"
    assert graph.distance(top, cqdist.Query("() <- R(x, x)")) == 3

    g2 = cqdist.build_graph(schema, 2)
    d = g2.distance(q1, q2)
    assert len(g2.path(q1, q2)) == d + 1

    passed, rows = cqdist.verify_opq_table()
    assert passed and len(rows) == 17
    passed, steps = cqdist.check_chain(5)
    assert passed and len(steps) == 6
    assert cqdist.reverse_opq("110") == "100"
    assert str(cqdist.opq_query("0")) == "() <- E(z2, z1)"
    assert cqdist.pumped_query(1) == cqdist.opq_query("11011")

    try:
        cqdist.Query("(x) <- R(y)")
    except cqdist.CqdistError:
        pass
    else:
        raise AssertionError("head variable outside the body was accepted")

    try:
        cqdist.build_graph(edge, 1, max_nodes=2)
    except RuntimeError:
        pass
    else:
        raise AssertionError("node cap was not enforced")

    print(f"cqdist smoke test passed (distance Q1..Q2 = {d})")


if __name__ == "__main__":
    main()
