import random

import pytest

from gwprod.curves import (
    CurveClass,
    DegreeMonoid,
    compose,
    decompositions,
    identity_map,
    projection_map,
)
from gwprod.functors import (
    CompositionError,
    EmptyStabilizationError,
    StabilizingMorphism,
    absolute_stabilization,
    add_tails,
    compose_stabilizations,
    glue_tails,
    identity_stabilization,
    psi_image,
    pushforward_stabilize,
    splitting_pullback,
)
from gwprod.graphs import (
    GraphStructureError,
    MarkedGraph,
    ModularGraph,
    UnstableGraphError,
    canonical_key,
    contract_edge,
    validate,
)
from gwprod.suite import RANK1, RANK2, random_monoid_map, random_stable_marked_graph

P1MAP = projection_map(RANK2, (0,), RANK1)
P2MAP = projection_map(RANK2, (1,), RANK1)


def two_vertex_product(beta1, beta2, tails1=("1", "2"), tails2=("3",)):
    vof = {"a": "v1", "b": "v2"}
    inv = {"a": "b", "b": "a"}
    labels = {}
    for i, lab in enumerate(tails1):
        f = f"s{i}"
        vof[f], inv[f], labels[f] = "v1", f, lab
    for i, lab in enumerate(tails2):
        f = f"u{i}"
        vof[f], inv[f], labels[f] = "v2", f, lab
    graph = ModularGraph(("v1", "v2"), {"v1": 0, "v2": 0}, vof, inv, labels)
    return MarkedGraph(
        graph, RANK2, {"v1": CurveClass(beta1), "v2": CurveClass(beta2)}
    )


def three_chain(beta1=(1, 0), beta2=(0, 1), beta3=(1, 1)):
    vof = {
        "a": "v1", "f1": "v2", "f2": "v2", "b": "v3",
        "t1": "v1", "t2": "v1", "t3": "v3", "t4": "v3",
    }
    inv = {"a": "f1", "f1": "a", "f2": "b", "b": "f2"}
    for t in ("t1", "t2", "t3", "t4"):
        inv[t] = t
    labels = {"t1": "1", "t2": "2", "t3": "3", "t4": "4"}
    graph = ModularGraph(("v1", "v2", "v3"), {"v1": 0, "v2": 0, "v3": 0}, vof, inv, labels)
    return MarkedGraph(
        graph,
        RANK2,
        {"v1": CurveClass(beta1), "v2": CurveClass(beta2), "v3": CurveClass(beta3)},
    )


# ---------------------------------------------------------------------------
# pushforward stabilization


def test_tail_slides_when_vertex_collapses():
    g = two_vertex_product((1, 1), (0, 1))
    stabilized, morphism = pushforward_stabilize(g, P1MAP)
    assert stabilized.graph.vertices == ("v1",)
    assert sorted(stabilized.graph.tail_labels.values()) == ["1", "2", "3"]
    assert stabilized.marking["v1"] == CurveClass((1,))
    # tail 3 records a long tail through the removed vertex
    t3 = stabilized.graph.tail_with_label("3")
    assert morphism.tail_chains[t3] == (("a", "b"),)
    assert morphism.flag_map[t3] == "a"
    morphism.check()


def test_identity_map_is_fixed_point():
    g = three_chain()
    stabilized, morphism = pushforward_stabilize(g, identity_map(RANK2))
    assert stabilized == g
    assert morphism.vertex_map == {v: v for v in g.graph.vertices}
    assert all(len(c) == 1 for c in morphism.edge_chains.values())
    assert all(c == () for c in morphism.tail_chains.values())
    # the orbit map is total and bijective on edges and tails
    for e in g.graph.edges():
        assert morphism.orbit(e) == ("edge", e)
    for t in g.graph.tails():
        assert morphism.orbit(t) == ("tail", t)


def test_chain_splice_builds_long_edge():
    g = three_chain()
    stabilized, morphism = pushforward_stabilize(g, P1MAP)
    assert stabilized.graph.vertices == ("v1", "v3")
    assert stabilized.graph.edges() == (("a", "b"),)
    assert morphism.edge_chains[("a", "b")] == (("a", "f1"), ("f2", "b"))
    assert morphism.orbit(("a", "f1")) == ("edge", ("a", "b"))
    assert morphism.orbit(("f2", "b")) == ("edge", ("a", "b"))
    morphism.check()


def test_one_flag_vertex_is_pruned():
    vof = {"a": "v1", "c": "v2", "t1": "v1", "t2": "v1", "t3": "v1"}
    inv = {"a": "c", "c": "a", "t1": "t1", "t2": "t2", "t3": "t3"}
    labels = {"t1": "1", "t2": "2", "t3": "3"}
    graph = ModularGraph(("v1", "v2"), {"v1": 0, "v2": 0}, vof, inv, labels)
    g = MarkedGraph(graph, RANK2, {"v1": CurveClass((1, 0)), "v2": CurveClass((0, 1))})
    stabilized, morphism = pushforward_stabilize(g, P1MAP)
    assert stabilized.graph.vertices == ("v1",)
    assert stabilized.graph.edges() == ()
    # the pruned edge survives into no long edge or tail
    assert morphism.orbit(("a", "c")) is None


def test_input_must_be_stable():
    vof = {"t1": "v", "t2": "v"}
    inv = {"t1": "t1", "t2": "t2"}
    graph = ModularGraph(("v",), {"v": 0}, vof, inv, {"t1": "1", "t2": "2"})
    g = MarkedGraph(graph, RANK2, {"v": CurveClass((0, 0))})
    with pytest.raises(UnstableGraphError):
        pushforward_stabilize(g, P1MAP)


def test_empty_stabilization_reported():
    vof = {"t1": "v", "t2": "v"}
    inv = {"t1": "t1", "t2": "t2"}
    graph = ModularGraph(("v",), {"v": 0}, vof, inv, {"t1": "1", "t2": "2"})
    g = MarkedGraph(graph, RANK2, {"v": CurveClass((0, 1))})
    with pytest.raises(EmptyStabilizationError):
        pushforward_stabilize(g, P1MAP)


# ---------------------------------------------------------------------------
# absolute stabilization


def test_absolute_stabilization_drops_marking():
    g = two_vertex_product((1, 1), (0, 1), tails1=("1", "2"), tails2=("3", "4"))
    tau, morphism = absolute_stabilization(g)
    assert tau == g.graph
    assert morphism.source.marking["v1"].is_zero()


def test_absolute_stabilization_error_case():
    vof = {"t1": "v", "t2": "v"}
    inv = {"t1": "t1", "t2": "t2"}
    graph = ModularGraph(("v",), {"v": 0}, vof, inv, {"t1": "1", "t2": "2"})
    g = MarkedGraph(graph, RANK1, {"v": CurveClass((1,))})
    with pytest.raises(EmptyStabilizationError):
        absolute_stabilization(g)


def test_absolute_matches_tail_slide_example():
    g = two_vertex_product((1, 0), (0, 0), tails1=("1", "2"), tails2=("3",))
    # v2 with zero marking and two flags is unstable already for the marking;
    # make it stable first by marking, then forget
    g = MarkedGraph(g.graph, g.monoid, {"v1": CurveClass((1, 0)), "v2": CurveClass((0, 1))})
    tau, _ = absolute_stabilization(g)
    assert len(tau.vertices) == 1
    assert sorted(tau.tail_labels.values()) == ["1", "2", "3"]


# ---------------------------------------------------------------------------
# composition and the two-projection image


def test_psi_image_identity_case():
    g = three_chain(beta1=(1, 1), beta2=(1, 1), beta3=(1, 1))
    morphism = identity_stabilization(g)
    left, right = psi_image(g.graph, [(g, morphism)], (P1MAP, P2MAP))
    (s1, c1), = left
    (s2, c2), = right
    # nothing destabilizes, so both images keep the shape
    assert s1.graph == g.graph
    assert s2.graph == g.graph
    assert s1.marking["v1"] == CurveClass((1,))
    c1.check()
    c2.check()


def test_psi_image_collapse_selects_surviving_factor():
    g = three_chain()  # middle vertex dies absolutely and under the first projection
    tau, morphism = absolute_stabilization(g)
    left, right = psi_image(tau, [(g, morphism)], (P1MAP, P2MAP))
    (s1, c1), = left
    (s2, c2), = right
    assert s1.graph.edges() == (("a", "b"),)
    assert c1.edge_chains[("a", "b")] == (("a", "b"),)
    # the second projection keeps the middle vertex, so the composed chain
    # still has both factors
    assert s2.graph.vertices == ("v1", "v2", "v3")
    assert c2.edge_chains[("a", "b")] == (("a", "f1"), ("f2", "b"))
    c1.check()
    c2.check()


def test_psi_image_empty_list():
    g = three_chain()
    left, right = psi_image(g.graph, [], (P1MAP, P2MAP))
    assert left == [] and right == []


def test_compose_requires_common_target():
    g = three_chain()
    h = two_vertex_product((1, 1), (1, 1))
    with pytest.raises(CompositionError):
        compose_stabilizations(identity_stabilization(g), identity_stabilization(h))


# ---------------------------------------------------------------------------
# splitting pullbacks


def split_star(n, beta, left_tails, right_tails, monoid=RANK1):
    """sigma: two vertices joined by edge (e0,e1); tau: its contraction."""
    vof = {"e0": "w1", "e1": "w2"}
    inv = {"e0": "e1", "e1": "e0"}
    labels = {}
    for i in left_tails:
        f = f"t{i}"
        vof[f], inv[f], labels[f] = "w1", f, str(i)
    for i in right_tails:
        f = f"t{i}"
        vof[f], inv[f], labels[f] = "w2", f, str(i)
    sigma = ModularGraph(("w1", "w2"), {"w1": 0, "w2": 0}, vof, inv, labels)
    tau_vof = {f: "w1" for f in vof if f not in ("e0", "e1")}
    tau_inv = {f: f for f in tau_vof}
    tau = ModularGraph(("w1",), {"w1": 0}, tau_vof, tau_inv, labels)
    marked = MarkedGraph(tau, monoid, {"w1": CurveClass(beta)})
    return sigma, marked


def test_splitting_pullback_rank1():
    sigma, marked = split_star(4, (2,), (1, 2), (3, 4))
    outs = splitting_pullback(sigma, ("e0", "e1"), marked)
    markings = [(o.marking["w1"].coords, o.marking["w2"].coords) for o in outs]
    assert markings == [((0,), (2,)), ((1,), (1,)), ((2,), (0,))]


def test_splitting_pullback_rank2():
    sigma, marked = split_star(4, (1, 1), (1, 2), (3, 4), monoid=RANK2)
    outs = splitting_pullback(sigma, ("e0", "e1"), marked)
    assert len(outs) == 4


def test_splitting_pullback_stability_filter():
    # right vertex has only 2 flags, so the assignment with zero there drops
    sigma, marked = split_star(3, (2,), (1, 2), (3,))
    outs = splitting_pullback(sigma, ("e0", "e1"), marked)
    markings = [(o.marking["w1"].coords, o.marking["w2"].coords) for o in outs]
    assert ((1,), (1,)) in markings and ((0,), (2,)) in markings
    assert ((2,), (0,)) not in markings


def test_splitting_pullback_adjoint():
    sigma, marked = split_star(5, (2,), (1, 2, 5), (3, 4))
    for pb in splitting_pullback(sigma, ("e0", "e1"), marked):
        assert contract_edge(pb, ("e0", "e1")) == marked


def test_splitting_pullback_rejects_wrong_contraction():
    sigma, marked = split_star(4, (2,), (1, 2), (3, 4))
    other = MarkedGraph(sigma, marked.monoid, {"w1": CurveClass((1,)), "w2": CurveClass((1,))})
    with pytest.raises(GraphStructureError):
        splitting_pullback(sigma, ("t1", "t2"), marked)
    with pytest.raises(GraphStructureError):
        splitting_pullback(sigma, ("e0", "e1"), other)


# ---------------------------------------------------------------------------
# tails


def test_add_tails():
    g = two_vertex_product((1, 1), (0, 1))
    out = add_tails(g, {"9": "v1"})
    assert len(out.graph.tails()) == len(g.graph.tails()) + 1
    assert validate(out).stable
    assert add_tails(g, {}) == g


def test_add_tail_stabilizes():
    # v2 carries an edge flag and one tail: unstable with zero marking
    vof = {"a": "v1", "b": "v2", "t1": "v1", "t2": "v1", "u1": "v2"}
    inv = {"a": "b", "b": "a", "t1": "t1", "t2": "t2", "u1": "u1"}
    labels = {"t1": "1", "t2": "2", "u1": "3"}
    graph = ModularGraph(("v1", "v2"), {"v1": 0, "v2": 0}, vof, inv, labels)
    g = MarkedGraph(graph, RANK1, {"v1": CurveClass((1,)), "v2": CurveClass((0,))})
    assert not validate(g).stable
    out = add_tails(g, {"4": "v2"})
    assert validate(out).stable


def test_add_tails_collision():
    g = two_vertex_product((1, 1), (0, 1))
    with pytest.raises(GraphStructureError):
        add_tails(g, {"1": "v1"})


def test_glue_tails_record():
    g = two_vertex_product((1, 1), (0, 1), tails1=("1", "2"), tails2=("3", "4"))
    record = glue_tails(g, "2", "3")
    assert record.before == g
    assert len(record.after.graph.edges()) == len(g.graph.edges()) + 1
    assert sorted(record.after.graph.tail_labels.values()) == ["1", "4"]
    assert record.glued_labels == ("2", "3")


# ---------------------------------------------------------------------------
# seeded property checks (small scale; the acceptance suite runs 10^3)


def test_functoriality_random():
    rng = random.Random(101)
    checked = 0
    while checked < 60:
        g = random_stable_marked_graph(rng)
        m1 = random_monoid_map(rng, RANK2, RANK2)
        m2 = random_monoid_map(rng, RANK2, RANK1)
        try:
            twice = pushforward_stabilize(pushforward_stabilize(g, m1)[0], m2)[0]
            once = pushforward_stabilize(g, compose(m2, m1))[0]
        except EmptyStabilizationError:
            continue
        assert canonical_key(twice) == canonical_key(once)
        checked += 1


def test_confluence_random():
    rng = random.Random(102)
    checked = 0
    while checked < 60:
        g = random_stable_marked_graph(rng)
        try:
            base = pushforward_stabilize(g, P1MAP)[0]
        except EmptyStabilizationError:
            continue
        for _ in range(4):
            shuffled = pushforward_stabilize(g, P1MAP, pick=lambda vs: rng.choice(vs))[0]
            assert canonical_key(shuffled) == canonical_key(base)
        checked += 1


def test_idempotence_random():
    rng = random.Random(103)
    for _ in range(60):
        g = random_stable_marked_graph(rng)
        out = pushforward_stabilize(g, identity_map(RANK2))[0]
        assert canonical_key(out) == canonical_key(g)


def test_adjointness_random():
    rng = random.Random(104)
    checked = 0
    while checked < 60:
        g = random_stable_marked_graph(rng)
        nonloop = [e for e in g.graph.edges() if not g.graph.is_loop(e)]
        if not nonloop:
            continue
        e = rng.choice(nonloop)
        contracted = contract_edge(g, e)
        pullbacks = splitting_pullback(g.graph, e, contracted)
        assert any(pb.marking == g.marking for pb in pullbacks)
        for pb in pullbacks:
            assert contract_edge(pb, e) == contracted
        checked += 1


def test_splitting_counts_exhaustive_small():
    # counts equal the raw splitting count minus the stability-filtered ones,
    # for every class with coordinates up to 3
    import itertools as it

    sigma, marked0 = split_star(3, (0,), (1, 2), (3,))
    for coords in it.product(range(4), repeat=1):
        marked = MarkedGraph(marked0.graph, RANK1, {"w1": CurveClass(coords)})
        outs = splitting_pullback(sigma, ("e0", "e1"), marked)
        expected = 0
        for b1, b2 in decompositions(CurveClass(coords)):
            trial = MarkedGraph(
                sigma, RANK1, {"w1": b1, "w2": b2}
            )
            if validate(trial).stable:
                expected += 1
        assert len(outs) == expected
