"""Functorial operations on marked graphs.

Pushing a marking forward along a monoid map can destabilize vertices;
stabilization contracts them away and leaves a record of how edges and
tails of the original graph collapse onto the result (long edges and
long tails).  These records compose, pull back along single-edge
contractions, and drive the two-projection image of product-marked
graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .curves import (
    CurveClass,
    DegreeMonoid,
    MonoidMap,
    POINT_MONOID,
    decompositions,
    pushforward,
    zero_map,
)
from .graphs import (
    EdgeKey,
    GraphStructureError,
    MarkedGraph,
    ModularGraph,
    UnstableGraphError,
    contract_modular_edge,
    edge_key,
    validate,
)


class EmptyStabilizationError(RuntimeError):
    """Stabilization removed every vertex; there is no stable model."""


class CompositionError(RuntimeError):
    """Orbit-map composition hit an inconsistency (indicates a bug)."""


OrientedEdge = tuple[str, str]  # (near flag, far flag) in the target graph


@dataclass(frozen=True)
class StabilizingMorphism:
    """Record of a stabilization: source is the stabilized graph, target
    the original.

    vertex_map and flag_map embed the source into the target (a tail that
    slid along a collapsed chain maps to the edge flag where the chain
    attached).  edge_chains[e] lists the target edges forming the long
    edge of e, oriented from the flag_map image of e's smaller flag;
    tail_chains[t] lists the target edges swallowed by the long tail of
    t, oriented away from the surviving vertex.  Target edges and tails
    in no chain were removed outright and have no orbit image.
    """

    source: MarkedGraph
    target: MarkedGraph
    vertex_map: dict[str, str]
    flag_map: dict[str, str]
    edge_chains: dict[EdgeKey, tuple[OrientedEdge, ...]]
    tail_chains: dict[str, tuple[OrientedEdge, ...]]

    def orbit(self, item: EdgeKey | str) -> tuple[str, EdgeKey | str] | None:
        """Image of a target edge (key) or tail (flag) under the orbit map.

        Returns ("edge", key) or ("tail", flag) in the source, or None if
        the item was removed.
        """
        lookup = self._orbit_lookup()
        if isinstance(item, tuple):
            return lookup.get(edge_key(*item))
        # target tail: identified with the source tail of the same label
        label = self.target.graph.tail_labels.get(item)
        if label is None:
            raise GraphStructureError(f"{item!r} is not a tail of the target")
        for t, lab in self.source.graph.tail_labels.items():
            if lab == label:
                return ("tail", t)
        return None

    def _orbit_lookup(self) -> dict[EdgeKey, tuple[str, EdgeKey | str]]:
        lookup: dict[EdgeKey, tuple[str, EdgeKey | str]] = {}
        for e, chain in self.edge_chains.items():
            for near, far in chain:
                lookup[edge_key(near, far)] = ("edge", e)
        for t, chain in self.tail_chains.items():
            for near, far in chain:
                lookup[edge_key(near, far)] = ("tail", t)
        return lookup

    def check(self) -> None:
        """Validate commutation, label respect and chain connectivity."""
        src, tgt = self.source.graph, self.target.graph
        for f, v in src.vertex_of.items():
            fm = self.flag_map[f]
            if tgt.vertex_of[fm] != self.vertex_map[v]:
                raise CompositionError(f"flag map does not commute with vertex map at {f!r}")
        for t in src.tails():
            fm = self.flag_map[t]
            if fm in tgt.tail_labels and tgt.tail_labels[fm] != src.tail_labels[t]:
                raise CompositionError(f"tail {t!r} maps to a tail with a different label")
        for e, chain in self.edge_chains.items():
            if not chain:
                raise CompositionError(f"edge {e} has an empty chain")
            self._check_chain(chain)
            if chain[0][0] != self.flag_map[e[0]] or chain[-1][1] != self.flag_map[e[1]]:
                raise CompositionError(f"chain of {e} does not end at its flag images")
        for t, chain in self.tail_chains.items():
            self._check_chain(chain)
            if chain and chain[0][0] != self.flag_map[t]:
                raise CompositionError(f"tail chain of {t!r} does not start at its flag image")

    def _check_chain(self, chain: tuple[OrientedEdge, ...]) -> None:
        tgt = self.target.graph
        for near, far in chain:
            if tgt.involution.get(near) != far:
                raise CompositionError(f"chain element {(near, far)} is not a target edge")
        for (_, far), (near2, _) in zip(chain, chain[1:]):
            if tgt.vertex_of[far] != tgt.vertex_of[near2]:
                raise CompositionError("chain is not a connected path")


def identity_stabilization(g: MarkedGraph) -> StabilizingMorphism:
    """The trivial record of a graph over itself."""
    return StabilizingMorphism(
        source=g,
        target=g,
        vertex_map={v: v for v in g.graph.vertices},
        flag_map={f: f for f in g.graph.vertex_of},
        edge_chains={e: ((e[0], e[1]),) for e in g.graph.edges()},
        tail_chains={t: () for t in g.graph.tails()},
    )


def _oriented(chain: Sequence[OrientedEdge], reverse: bool) -> list[OrientedEdge]:
    if not reverse:
        return list(chain)
    return [(far, near) for near, far in reversed(chain)]


def pushforward_stabilize(
    g: MarkedGraph,
    mmap: MonoidMap,
    pick: Callable[[list[str]], str] | None = None,
) -> tuple[MarkedGraph, StabilizingMorphism]:
    """Push the marking forward and contract until stable.

    Repeatedly removes vertices with zero pushed class and 2g-2+#flags
    <= 0: a 2-flag vertex between two edges splices them into one (long
    edge), a 2-flag vertex on an edge and a tail slides the tail along
    (long tail), a 1-flag vertex on an edge is pruned together with the
    edge, and fully unstable isolated pieces are dropped.  The result is
    independent of the order in which vertices are processed; `pick`
    overrides the default first-in-sorted-order choice.
    """
    report = validate(g)
    if not report.stable:
        raise UnstableGraphError(
            f"input graph is unstable at vertices {list(report.unstable_vertices)}"
        )
    graph = g.graph

    verts = set(graph.vertices)
    genus = dict(graph.genus)
    vof = dict(graph.vertex_of)
    inv = dict(graph.involution)
    labels = dict(graph.tail_labels)
    marking = {v: pushforward(mmap, g.marking[v]) for v in verts}

    edge_chain: dict[EdgeKey, list[OrientedEdge]] = {
        e: [(e[0], e[1])] for e in graph.edges()
    }
    tail_chain: dict[str, list[OrientedEdge]] = {t: [] for t in graph.tails()}

    def flags_at(v: str) -> list[str]:
        return sorted(f for f, w in vof.items() if w == v)

    def unstable() -> list[str]:
        out = []
        for v in sorted(verts):
            if marking[v].is_zero() and 2 * genus[v] - 2 + len(flags_at(v)) <= 0:
                out.append(v)
        return out

    def chain_from(k: EdgeKey, start_flag: str) -> list[OrientedEdge]:
        return _oriented(edge_chain[k], reverse=(start_flag != k[0]))

    def drop_vertex(v: str) -> None:
        verts.discard(v)
        del genus[v], marking[v]

    while True:
        bad = unstable()
        if not bad:
            break
        v = (pick or (lambda vs: vs[0]))(bad)
        fl = flags_at(v)
        if len(fl) == 2:
            f1, f2 = fl
            if inv[f1] == f2:
                # lone loop component: contracting would leave an empty
                # genus-1 vertex, still unstable, so the piece vanishes
                for f in fl:
                    del vof[f], inv[f]
                del edge_chain[edge_key(f1, f2)]
                drop_vertex(v)
                continue
            f1_is_tail = inv[f1] == f1
            f2_is_tail = inv[f2] == f2
            if f1_is_tail and f2_is_tail:
                for f in fl:
                    del vof[f], inv[f], labels[f], tail_chain[f]
                drop_vertex(v)
                continue
            if f1_is_tail or f2_is_tail:
                t, fe = (f1, f2) if f1_is_tail else (f2, f1)
                a = inv[fe]
                k = edge_key(fe, a)
                tail_chain[t] = chain_from(k, a) + tail_chain[t]
                u = vof[a]
                del vof[fe], vof[a], inv[fe], inv[a], edge_chain[k]
                vof[t] = u
                drop_vertex(v)
                continue
            # two distinct edges: splice them into one
            a, b = inv[f1], inv[f2]
            k1, k2 = edge_key(f1, a), edge_key(f2, b)
            new_chain = chain_from(k1, a) + chain_from(k2, f2)
            del edge_chain[k1], edge_chain[k2]
            del vof[f1], vof[f2], inv[f1], inv[f2]
            inv[a], inv[b] = b, a
            nk = edge_key(a, b)
            edge_chain[nk] = new_chain if nk[0] == a else _oriented(new_chain, True)
            drop_vertex(v)
            continue
        if len(fl) == 1:
            f1 = fl[0]
            if inv[f1] == f1:
                del vof[f1], inv[f1], labels[f1], tail_chain[f1]
                drop_vertex(v)
                continue
            a = inv[f1]
            k = edge_key(f1, a)
            del edge_chain[k]
            del vof[f1], vof[a], inv[f1], inv[a]
            drop_vertex(v)
            continue
        # no flags at all
        drop_vertex(v)

    if not verts:
        raise EmptyStabilizationError("stabilization removed the whole graph")

    stabilized = MarkedGraph(
        ModularGraph(tuple(sorted(verts)), genus, vof, inv, labels),
        mmap.target,
        marking,
    )
    flag_map = {f: f for f in vof}
    for t, chain in tail_chain.items():
        if chain:
            flag_map[t] = chain[0][0]
    morphism = StabilizingMorphism(
        source=stabilized,
        target=g,
        vertex_map={v: v for v in verts},
        flag_map=flag_map,
        edge_chains={k: tuple(c) for k, c in edge_chain.items()},
        tail_chains={t: tuple(c) for t, c in tail_chain.items()},
    )
    return stabilized, morphism


def absolute_stabilization(
    g: MarkedGraph, pick: Callable[[list[str]], str] | None = None
) -> tuple[ModularGraph, StabilizingMorphism]:
    """Forget the marking and stabilize; the underlying stable graph."""
    try:
        stabilized, morphism = pushforward_stabilize(g, zero_map(g.monoid), pick=pick)
    except EmptyStabilizationError:
        raise EmptyStabilizationError(
            "no vertex is modularly stable; the graph has no stable model"
        ) from None
    return stabilized.graph, morphism


def compose_stabilizations(
    outer: StabilizingMorphism, inner: StabilizingMorphism
) -> StabilizingMorphism:
    """Compose chain records: outer sits over the common target, inner is
    a partial stabilization of the same target, and the result records
    outer's source over inner's source.

    A target edge of an outer chain lies in the long edge or tail of a
    unique inner item; grouping consecutive chain elements by that item
    yields the composed chains.  inner must preserve identifiers, which
    every morphism produced by pushforward_stabilize does.
    """
    if outer.target is not inner.target and outer.target != inner.target:
        raise CompositionError("morphisms do not share a target")
    for f, im in inner.flag_map.items():
        if f != im and f not in inner.tail_chains:
            raise CompositionError("inner morphism does not preserve flag identifiers")
    lookup = inner._orbit_lookup()
    mid = inner.source

    vertex_map: dict[str, str] = {}
    for v, w in outer.vertex_map.items():
        if w not in mid.graph.genus:
            raise CompositionError(f"vertex {w!r} did not survive the inner stabilization")
        vertex_map[v] = w

    def compose_chain(
        chain: Sequence[OrientedEdge], allow_tail: str | None
    ) -> tuple[list[OrientedEdge], bool]:
        blocks: list[OrientedEdge] = []
        seen: set[EdgeKey] = set()
        hit_tail = False
        current: EdgeKey | None = None
        for near, far in chain:
            image = lookup.get(edge_key(near, far))
            if image is None:
                raise CompositionError(
                    f"edge {(near, far)} vanished without joining a long edge or tail"
                )
            kind, item = image
            if kind == "tail":
                if allow_tail is None or item != allow_tail:
                    raise CompositionError(
                        f"edge {(near, far)} collapsed into an unexpected tail {item!r}"
                    )
                hit_tail = True
                current = None
                continue
            if hit_tail:
                raise CompositionError("edge block found after the tail end of a chain")
            k = item
            if k == current:
                continue
            if k in seen:
                raise CompositionError(f"long edge {k} is not a consecutive block")
            seen.add(k)
            current = k
            if near == k[0]:
                blocks.append((k[0], k[1]))
            elif near == k[1]:
                blocks.append((k[1], k[0]))
            else:
                # interior target edge: valid only if the block was just
                # entered via its first element, which the orientation of
                # inner chains guarantees; anything else is a bug
                raise CompositionError(
                    f"chain enters {k} at an interior edge {(near, far)}"
                )
        return blocks, hit_tail

    edge_chains: dict[EdgeKey, tuple[OrientedEdge, ...]] = {}
    flag_map: dict[str, str] = {}
    for e, chain in outer.edge_chains.items():
        blocks, _ = compose_chain(chain, allow_tail=None)
        if not blocks:
            raise CompositionError(f"edge {e} has an empty composed chain")
        edge_chains[e] = tuple(blocks)
        flag_map[e[0]] = blocks[0][0]
        flag_map[e[1]] = blocks[-1][1]

    tail_chains: dict[str, tuple[OrientedEdge, ...]] = {}
    mid_tail_by_label = {lab: t for t, lab in mid.graph.tail_labels.items()}
    for t, chain in outer.tail_chains.items():
        label = outer.source.graph.tail_labels[t]
        mid_tail = mid_tail_by_label.get(label)
        if mid_tail is None:
            raise CompositionError(f"tail labeled {label!r} vanished in the inner stabilization")
        blocks, _ = compose_chain(chain, allow_tail=mid_tail)
        tail_chains[t] = tuple(blocks)
        flag_map[t] = blocks[0][0] if blocks else mid_tail

    return StabilizingMorphism(
        source=outer.source,
        target=mid,
        vertex_map=vertex_map,
        flag_map=flag_map,
        edge_chains=edge_chains,
        tail_chains=tail_chains,
    )


def psi_image(
    tau: ModularGraph,
    marked_list: Sequence[tuple[MarkedGraph, StabilizingMorphism]],
    maps: tuple[MonoidMap, MonoidMap],
) -> tuple[
    list[tuple[MarkedGraph, StabilizingMorphism]],
    list[tuple[MarkedGraph, StabilizingMorphism]],
]:
    """Apply the two projections of a product monoid to a family of
    marked graphs lying over a common stable graph.

    Each marked graph is replaced by its stabilized pushforward, and its
    record over tau is composed with the stabilization record, so the
    output again lies over tau.
    """
    results: list[list[tuple[MarkedGraph, StabilizingMorphism]]] = []
    for mmap in maps:
        out: list[tuple[MarkedGraph, StabilizingMorphism]] = []
        for marked, morphism in marked_list:
            if morphism.source.graph != tau:
                raise CompositionError("morphism source does not match the base graph")
            if morphism.target != marked:
                raise CompositionError("morphism target does not match the marked graph")
            stabilized, record = pushforward_stabilize(marked, mmap)
            out.append((stabilized, compose_stabilizations(morphism, record)))
        results.append(out)
    return results[0], results[1]


def splitting_pullback(
    sigma: ModularGraph, split_edge: EdgeKey | Iterable[str], marked: MarkedGraph
) -> list[MarkedGraph]:
    """All stable markings of sigma contracting to a given marked graph.

    sigma must contract onto marked.graph along exactly the one given
    non-looping edge; the class at the merged vertex is distributed over
    the two endpoints in every way, unstable assignments dropped.
    """
    key = edge_key(*tuple(split_edge))
    if key not in sigma.edges():
        raise GraphStructureError(f"{key} is not an edge of the graph to split")
    if sigma.is_loop(key):
        raise GraphStructureError("cannot pull a splitting back along a loop contraction")
    contracted = contract_modular_edge(sigma, key)
    if contracted != marked.graph:
        raise GraphStructureError(
            "contracting the split edge does not give the marked graph"
        )
    v1, v2 = sorted((sigma.vertex_of[key[0]], sigma.vertex_of[key[1]]))
    merged = v1
    out = []
    for beta1, beta2 in decompositions(marked.marking[merged]):
        marking = {v: marked.marking[v] for v in marked.graph.vertices if v != merged}
        marking[v1] = beta1
        marking[v2] = beta2
        candidate = MarkedGraph(sigma, marked.monoid, marking)
        if validate(candidate).stable:
            out.append(candidate)
    return out


def add_tails(g: MarkedGraph, assignment: Mapping[str, str]) -> MarkedGraph:
    """Attach new labeled tails at the assigned vertices."""
    existing = set(g.graph.tail_labels.values())
    collisions = sorted(set(assignment) & existing)
    if collisions:
        raise GraphStructureError(f"tail labels already in use: {collisions}")
    vof = dict(g.graph.vertex_of)
    inv = dict(g.graph.involution)
    labels = dict(g.graph.tail_labels)
    for label in sorted(assignment):
        v = assignment[label]
        if v not in g.graph.genus:
            raise GraphStructureError(f"unknown vertex {v!r}")
        f = f"t_{label}"
        while f in vof:
            f = "_" + f
        vof[f] = v
        inv[f] = f
        labels[f] = label
    graph = ModularGraph(g.graph.vertices, dict(g.graph.genus), vof, inv, labels)
    return MarkedGraph(graph, g.monoid, dict(g.marking))


@dataclass(frozen=True)
class TailGluing:
    """Record of gluing two tails into an edge (data only, no calculus)."""

    before: MarkedGraph
    after: MarkedGraph
    glued_labels: tuple[str, str]


def glue_tails(g: MarkedGraph, label1: str, label2: str) -> TailGluing:
    """Join the tails with the two given labels into a new edge."""
    if label1 == label2:
        raise GraphStructureError("cannot glue a tail to itself")
    f1 = g.graph.tail_with_label(label1)
    f2 = g.graph.tail_with_label(label2)
    inv = dict(g.graph.involution)
    inv[f1], inv[f2] = f2, f1
    labels = {f: lab for f, lab in g.graph.tail_labels.items() if f not in (f1, f2)}
    graph = ModularGraph(
        g.graph.vertices, dict(g.graph.genus), dict(g.graph.vertex_of), inv, labels
    )
    after = MarkedGraph(graph, g.monoid, dict(g.marking))
    return TailGluing(before=g, after=after, glued_labels=(label1, label2))
