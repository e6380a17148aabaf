import itertools

import pytest

from gwprod.curves import CurveClass, DegreeMonoid
from gwprod.graphs import (
    GraphStructureError,
    MarkedGraph,
    ModularGraph,
    UnstableGraphError,
    automorphism_count,
    canonical_key,
    canonicalize,
    contract_edge,
    marked_graph_from_json,
    marked_graph_to_json,
    moduli_dimension,
    validate,
)

RANK1 = DegreeMonoid(1, ("a",), (2,))
RANK2 = DegreeMonoid(2, ("a", "b"), (2, 2))


def star(n_tails, genus=0, beta=(0,), monoid=RANK1, vertex="v"):
    flags = {f"t{i}": vertex for i in range(n_tails)}
    inv = {f: f for f in flags}
    labels = {f: str(i + 1) for i, f in enumerate(sorted(flags))}
    graph = ModularGraph((vertex,), {vertex: genus}, flags, inv, labels)
    return MarkedGraph(graph, monoid, {vertex: CurveClass(beta)})


def two_vertex(beta1=(0,), beta2=(0,), genus1=0, genus2=0, tails1=2, tails2=1, monoid=RANK1):
    vof = {"a": "v1", "b": "v2"}
    inv = {"a": "b", "b": "a"}
    labels = {}
    for i in range(tails1):
        f = f"s{i}"
        vof[f] = "v1"
        inv[f] = f
        labels[f] = str(i + 1)
    for i in range(tails2):
        f = f"u{i}"
        vof[f] = "v2"
        inv[f] = f
        labels[f] = str(tails1 + i + 1)
    graph = ModularGraph(("v1", "v2"), {"v1": genus1, "v2": genus2}, vof, inv, labels)
    return MarkedGraph(graph, monoid, {"v1": CurveClass(beta1), "v2": CurveClass(beta2)})


# ---------------------------------------------------------------------------
# validation


def test_stability_examples():
    assert validate(star(3)).stable
    report = validate(star(2))
    assert not report.stable and report.unstable_vertices == ("v",)
    assert validate(star(1, genus=1)).stable


def test_marked_vertices_unconstrained():
    assert validate(star(1, beta=(1,))).stable
    assert validate(star(0, beta=(2,))).stable


def test_malformed_graphs_raise():
    with pytest.raises(GraphStructureError):
        ModularGraph(("v",), {"v": 0}, {"f": "v"}, {"f": "g"}, {})
    with pytest.raises(GraphStructureError):
        ModularGraph(("v",), {"v": 0}, {"f": "w"}, {"f": "f"}, {"f": "1"})
    with pytest.raises(GraphStructureError):
        # non-injective tail labels
        ModularGraph(
            ("v",), {"v": 0}, {"f": "v", "g": "v"}, {"f": "f", "g": "g"}, {"f": "1", "g": "1"}
        )


# ---------------------------------------------------------------------------
# contraction


def test_contract_edge_merges_genus_and_marking():
    g = two_vertex(beta1=(1,), beta2=(0,), genus1=0, genus2=1)
    merged = contract_edge(g, ("a", "b"))
    assert merged.graph.vertices == ("v1",)
    assert merged.graph.genus["v1"] == 1
    assert merged.marking["v1"] == CurveClass((1,))
    # all five tails survive
    assert len(merged.graph.tails()) == 3


def test_contract_loop_increases_genus():
    vof = {"a": "v", "b": "v", "t0": "v"}
    inv = {"a": "b", "b": "a", "t0": "t0"}
    graph = ModularGraph(("v",), {"v": 0}, vof, inv, {"t0": "1"})
    g = MarkedGraph(graph, RANK1, {"v": CurveClass((1,))})
    out = contract_edge(g, ("a", "b"))
    assert out.graph.genus["v"] == 1
    assert out.marking["v"] == CurveClass((1,))


def test_contract_preserves_totals():
    g = two_vertex(beta1=(1,), beta2=(2,), genus1=1, genus2=2, tails1=3, tails2=2)
    out = contract_edge(g, ("a", "b"))
    assert len(out.graph.edges()) == len(g.graph.edges()) - 1
    assert out.graph.total_genus() == g.graph.total_genus()
    assert sum(out.marking.values(), RANK1.zero()) == sum(g.marking.values(), RANK1.zero())


def test_contract_non_edge_raises():
    g = two_vertex()
    with pytest.raises(GraphStructureError):
        contract_edge(g, ("s0", "u0"))


# ---------------------------------------------------------------------------
# moduli dimension


def test_moduli_dimension_examples():
    assert moduli_dimension(star(5).graph) == 2  # cross-ratio count for 5 points
    two_tripods = two_vertex(tails1=2, tails2=2)
    assert moduli_dimension(two_tripods.graph) == 0
    assert moduli_dimension(star(1, genus=1).graph) == 1


def test_moduli_dimension_rejects_unstable():
    with pytest.raises(UnstableGraphError):
        moduli_dimension(star(2).graph)
    # markings do not rescue pure modular stability
    with pytest.raises(UnstableGraphError):
        moduli_dimension(star(2, beta=(1,)).graph)


# ---------------------------------------------------------------------------
# canonical forms


def brute_force_flag_automorphisms(g: MarkedGraph) -> int:
    """Oracle: count flag bijections commuting with everything directly."""
    graph = g.graph
    flags = sorted(graph.vertex_of)
    count = 0
    for perm in itertools.permutations(flags):
        phi = dict(zip(flags, perm))
        induced: dict[str, str] = {}
        ok = True
        for f in flags:
            v, w = graph.vertex_of[f], graph.vertex_of[phi[f]]
            if v in induced and induced[v] != w:
                ok = False
                break
            induced[v] = w
        if not ok or len(set(induced.values())) != len(induced):
            continue
        if any(graph.genus[v] != graph.genus[induced[v]] for v in induced):
            continue
        if any(g.marking[v] != g.marking[induced[v]] for v in induced):
            continue
        if any(phi[graph.involution[f]] != graph.involution[phi[f]] for f in flags):
            continue
        if any(
            graph.tail_labels.get(f) != graph.tail_labels.get(phi[f]) for f in flags
        ):
            continue
        count += 1
    return count


def parallel_edges_graph():
    vof = {"a1": "u", "a2": "u", "b1": "w", "b2": "w", "s": "u", "t": "w"}
    inv = {"a1": "b1", "b1": "a1", "a2": "b2", "b2": "a2", "s": "s", "t": "t"}
    graph = ModularGraph(("u", "w"), {"u": 0, "w": 0}, vof, inv, {"s": "x", "t": "y"})
    return MarkedGraph(graph, RANK1, {"u": CurveClass((0,)), "w": CurveClass((0,))})


def loop_graph():
    vof = {"a": "v", "b": "v", "t0": "v"}
    inv = {"a": "b", "b": "a", "t0": "t0"}
    graph = ModularGraph(("v",), {"v": 1}, vof, inv, {"t0": "1"})
    return MarkedGraph(graph, RANK1, {"v": CurveClass((0,))})


def test_automorphism_counts_against_brute_force():
    cases = [
        star(3),
        two_vertex(),
        parallel_edges_graph(),
        loop_graph(),
        two_vertex(beta1=(1,), beta2=(1,), tails1=0, tails2=0),
    ]
    for g in cases:
        assert automorphism_count(g) == brute_force_flag_automorphisms(g)


def test_parallel_edge_automorphisms():
    assert automorphism_count(parallel_edges_graph()) == 2


def test_canonical_form_relabeling_invariance():
    g = two_vertex(beta1=(1,), beta2=(0,), tails1=2, tails2=2)
    renamed_vof = {"x" + f: v for f, v in g.graph.vertex_of.items()}
    renamed_inv = {"x" + f: "x" + h for f, h in g.graph.involution.items()}
    renamed_labels = {"x" + f: lab for f, lab in g.graph.tail_labels.items()}
    h = MarkedGraph(
        ModularGraph(g.graph.vertices, dict(g.graph.genus), renamed_vof, renamed_inv, renamed_labels),
        g.monoid,
        dict(g.marking),
    )
    assert canonical_key(g) == canonical_key(h)
    assert canonicalize(g)[0] == canonicalize(h)[0]


def test_canonical_form_distinguishes_genus():
    g1 = two_vertex(genus1=0, genus2=0)
    g2 = two_vertex(genus1=1, genus2=0)
    assert canonical_key(g1) != canonical_key(g2)


def test_canonicalize_idempotent():
    for g in (two_vertex(beta1=(2,), beta2=(1,)), parallel_edges_graph(), loop_graph()):
        canon, _ = canonicalize(g)
        again, _ = canonicalize(canon)
        assert canon == again


# ---------------------------------------------------------------------------
# JSON


def test_json_round_trip():
    g = two_vertex(beta1=(2,), beta2=(1,))
    data = marked_graph_to_json(g)
    back = marked_graph_from_json(data)
    assert canonical_key(back) == canonical_key(g)


def test_json_matches_documented_shape():
    g = star(3, beta=(2,))
    data = marked_graph_to_json(g)
    assert set(data) == {"monoid", "vertices", "edges", "flags", "tails"}
    assert data["vertices"] == [{"id": "v", "genus": 0, "marking": [2]}]
    assert data["edges"] == []
    assert {t["label"] for t in data["tails"]} == {"1", "2", "3"}


def test_json_single_vertex_loop_inference():
    data = {
        "vertices": [{"id": "v1", "genus": 0, "marking": [1]}],
        "edges": [["f1", "f2"]],
        "tails": [{"label": "x3", "vertex": "v1"}],
    }
    g = marked_graph_from_json(data)
    assert g.graph.is_loop(("f1", "f2"))
    assert g.graph.tail_labels[g.graph.tails()[0]] == "x3"
