"""Modular graphs with genus labels and curve-class markings.

A graph is a set of flags (half-edges) with a vertex assignment and an
involution; 2-cycles of the involution are edges, fixed flags are tails
(marked points) and carry labels.  A marking attaches a curve class to
every vertex; a vertex with zero class must satisfy 2g - 2 + #flags > 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Mapping

from .curves import CurveClass, DegreeMonoid, MonoidError


class GraphStructureError(ValueError):
    """Malformed involution, dangling references or label collisions."""


class UnstableGraphError(ValueError):
    """An operation required a stable graph and did not get one."""


EdgeKey = tuple[str, str]


def edge_key(f1: str, f2: str) -> EdgeKey:
    return (f1, f2) if f1 <= f2 else (f2, f1)


@dataclass(frozen=True)
class ModularGraph:
    """Graph with genus-labeled vertices, edges and labeled tails.

    vertices may include isolated ones (no flags).  tail_labels is an
    injective map defined exactly on the involution-fixed flags.
    """

    vertices: tuple[str, ...]
    genus: dict[str, int]
    vertex_of: dict[str, str]
    involution: dict[str, str]
    tail_labels: dict[str, str]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        self.check_structure()

    def check_structure(self) -> None:
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise GraphStructureError("duplicate vertex identifiers")
        if set(self.genus) != vset:
            raise GraphStructureError("genus must be defined exactly on the vertices")
        if any(g < 0 for g in self.genus.values()):
            raise GraphStructureError("genus labels must be nonnegative")
        flags = set(self.vertex_of)
        if set(self.involution) != flags:
            raise GraphStructureError("involution must be defined exactly on the flags")
        for f, v in self.vertex_of.items():
            if v not in vset:
                raise GraphStructureError(f"flag {f!r} attached to unknown vertex {v!r}")
        for f, g in self.involution.items():
            if g not in flags:
                raise GraphStructureError(f"involution sends {f!r} to unknown flag {g!r}")
            if self.involution[g] != f:
                raise GraphStructureError(f"involution is not of order <= 2 at {f!r}")
        fixed = {f for f in flags if self.involution[f] == f}
        if set(self.tail_labels) != fixed:
            raise GraphStructureError("tail labels must be defined exactly on the fixed flags")
        labels = list(self.tail_labels.values())
        if len(set(labels)) != len(labels):
            raise GraphStructureError("tail labels must be injective")

    @property
    def flags(self) -> tuple[str, ...]:
        return tuple(sorted(self.vertex_of))

    def flags_at(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(f for f, w in self.vertex_of.items() if w == v))

    def edges(self) -> tuple[EdgeKey, ...]:
        seen = set()
        for f, g in self.involution.items():
            if f != g:
                seen.add(edge_key(f, g))
        return tuple(sorted(seen))

    def tails(self) -> tuple[str, ...]:
        return tuple(sorted(f for f, g in self.involution.items() if f == g))

    def is_loop(self, e: EdgeKey) -> bool:
        return self.vertex_of[e[0]] == self.vertex_of[e[1]]

    def n_flags(self, v: str) -> int:
        return sum(1 for w in self.vertex_of.values() if w == v)

    def label_of_tail(self, f: str) -> str:
        return self.tail_labels[f]

    def tail_with_label(self, label: str) -> str:
        for f, lab in self.tail_labels.items():
            if lab == label:
                return f
        raise GraphStructureError(f"no tail labeled {label!r}")

    def components(self) -> list[set[str]]:
        """Connected components as sets of vertices."""
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for f1, f2 in self.edges():
            u, w = self.vertex_of[f1], self.vertex_of[f2]
            adj[u].add(w)
            adj[w].add(u)
        comps, seen = [], set()
        for v in self.vertices:
            if v in seen:
                continue
            comp, stack = set(), [v]
            while stack:
                u = stack.pop()
                if u in comp:
                    continue
                comp.add(u)
                stack.extend(adj[u] - comp)
            seen |= comp
            comps.append(comp)
        return comps

    def total_genus(self) -> int:
        """Sum of vertex genera plus the first Betti number."""
        b1 = len(self.edges()) - len(self.vertices) + len(self.components())
        return sum(self.genus.values()) + b1


@dataclass(frozen=True)
class MarkedGraph:
    """Modular graph with a curve class attached to every vertex."""

    graph: ModularGraph
    monoid: DegreeMonoid
    marking: dict[str, CurveClass]

    def __post_init__(self):
        if set(self.marking) != set(self.graph.vertices):
            raise GraphStructureError("marking must be defined exactly on the vertices")
        for v, beta in self.marking.items():
            if len(beta.coords) != self.monoid.rank:
                raise MonoidError(f"marking at {v!r} has wrong rank")

    def with_marking(self, marking: Mapping[str, CurveClass]) -> "MarkedGraph":
        return MarkedGraph(self.graph, self.monoid, dict(marking))


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    unstable_vertices: tuple[str, ...]


def _vertex_is_stable(genus: int, n_flags: int, beta: CurveClass) -> bool:
    if not beta.is_zero():
        return True
    return 2 * genus - 2 + n_flags > 0


def validate(g: MarkedGraph) -> StabilityReport:
    """Check the stability condition at every vertex.

    Vertices carrying a nonzero class are unconstrained; a vertex with
    zero class needs 2g - 2 + #flags > 0.
    """
    g.graph.check_structure()
    bad = tuple(
        v
        for v in sorted(g.graph.vertices)
        if not _vertex_is_stable(g.graph.genus[v], g.graph.n_flags(v), g.marking[v])
    )
    return StabilityReport(stable=not bad, unstable_vertices=bad)


def contract_edge(g: MarkedGraph, e: EdgeKey | Iterable[str]) -> MarkedGraph:
    """Contract one edge.

    A non-looping edge merges its endpoints, adding genera and markings;
    a loop raises the genus of its vertex by one.  The merged vertex
    keeps the lexicographically smaller identifier.
    """
    f1, f2 = tuple(e)
    key = edge_key(f1, f2)
    graph = g.graph
    if key[0] not in graph.involution or graph.involution[key[0]] != key[1] or key[0] == key[1]:
        raise GraphStructureError(f"{key} is not an edge of the graph")
    u, w = graph.vertex_of[key[0]], graph.vertex_of[key[1]]
    vertex_of = {f: v for f, v in graph.vertex_of.items() if f not in key}
    involution = {f: h for f, h in graph.involution.items() if f not in key}
    if u == w:
        genus = dict(graph.genus)
        genus[u] += 1
        contracted = ModularGraph(graph.vertices, genus, vertex_of, involution, dict(graph.tail_labels))
        return MarkedGraph(contracted, g.monoid, dict(g.marking))
    keep, drop = (u, w) if u <= w else (w, u)
    genus = {v: gg for v, gg in graph.genus.items() if v != drop}
    genus[keep] = graph.genus[u] + graph.genus[w]
    vertex_of = {f: (keep if v == drop else v) for f, v in vertex_of.items()}
    vertices = tuple(v for v in graph.vertices if v != drop)
    contracted = ModularGraph(vertices, genus, vertex_of, involution, dict(graph.tail_labels))
    marking = {v: b for v, b in g.marking.items() if v != drop}
    marking[keep] = g.marking[u] + g.marking[w]
    return MarkedGraph(contracted, g.monoid, marking)


def contract_modular_edge(graph: ModularGraph, e: EdgeKey) -> ModularGraph:
    """Edge contraction on an unmarked graph (same rules, no marking)."""
    monoid = DegreeMonoid(1, ("z",), (0,))
    zero = {v: monoid.zero() for v in graph.vertices}
    return contract_edge(MarkedGraph(graph, monoid, zero), e).graph


def moduli_dimension(graph: ModularGraph) -> int:
    """Sum over vertices of 3g - 3 + #flags, each factor a moduli space."""
    bad = [v for v in graph.vertices if 2 * graph.genus[v] - 2 + graph.n_flags(v) <= 0]
    if bad:
        raise UnstableGraphError(f"vertices {sorted(bad)} have no moduli (2g-2+n <= 0)")
    return sum(3 * graph.genus[v] - 3 + graph.n_flags(v) for v in graph.vertices)


# ---------------------------------------------------------------------------
# canonical forms


def _vertex_color(g: MarkedGraph, v: str) -> tuple:
    labels = tuple(sorted(g.graph.tail_labels[f] for f in g.graph.flags_at(v) if f in g.graph.tail_labels))
    return (g.graph.genus[v], g.marking[v].coords, labels, g.graph.n_flags(v))


def _edge_multiplicities(g: MarkedGraph) -> dict[tuple[str, str], int]:
    mult: dict[tuple[str, str], int] = {}
    for f1, f2 in g.graph.edges():
        u, w = sorted((g.graph.vertex_of[f1], g.graph.vertex_of[f2]))
        mult[(u, w)] = mult.get((u, w), 0) + 1
    return mult


def _encode(g: MarkedGraph, order: list[str]) -> tuple:
    index = {v: i for i, v in enumerate(order)}
    vdata = tuple(_vertex_color(g, v)[:3] for v in order)
    edata = []
    for f1, f2 in g.graph.edges():
        i, j = sorted((index[g.graph.vertex_of[f1]], index[g.graph.vertex_of[f2]]))
        edata.append((i, j))
    return (
        (g.monoid.rank, g.monoid.c1_pairings),
        vdata,
        tuple(sorted(edata)),
    )


def _candidate_orders(g: MarkedGraph) -> Iterable[list[str]]:
    """Vertex orders compatible with the color classes, colors sorted."""
    classes: dict[tuple, list[str]] = {}
    for v in g.graph.vertices:
        classes.setdefault(_vertex_color(g, v), []).append(v)
    sorted_classes = [sorted(classes[c]) for c in sorted(classes)]
    for perms in itertools.product(*(itertools.permutations(cl) for cl in sorted_classes)):
        yield [v for perm in perms for v in perm]


def canonical_key(g: MarkedGraph) -> tuple:
    """Encoding equal for two graphs iff they are isomorphic.

    Isomorphisms must respect genus, marking and tail labels; internal
    identifiers never enter the encoding.
    """
    return min(_encode(g, order) for order in _candidate_orders(g))


def automorphism_count(g: MarkedGraph) -> int:
    """Order of the label-respecting automorphism group, at flag level.

    Every vertex-level automorphism lifts to flag bijections in the same
    number of ways: matchings of parallel edges, and per loop a matching
    plus two orientations.  Tail flags are pinned by their labels.
    """
    mult = _edge_multiplicities(g)
    flag_factor = 1
    for (u, w), m in mult.items():
        if u == w:
            flag_factor *= factorial(m) * 2**m
        else:
            flag_factor *= factorial(m)
    return total_vertex_autos(g) * flag_factor


def total_vertex_autos(g: MarkedGraph) -> int:
    """Automorphisms of the colored vertex multigraph."""
    mult = _edge_multiplicities(g)
    verts = sorted(g.graph.vertices)
    colors = {v: _vertex_color(g, v) for v in verts}
    classes: dict[tuple, list[str]] = {}
    for v in verts:
        classes.setdefault(colors[v], []).append(v)
    count = 0
    class_list = list(classes.values())
    for perms in itertools.product(*(itertools.permutations(cl) for cl in class_list)):
        pi = {}
        for cl, perm in zip(class_list, perms):
            pi.update(dict(zip(cl, perm)))
        ok = True
        moved: dict[tuple[str, str], int] = {}
        for (u, w), m in mult.items():
            a, b = sorted((pi[u], pi[w]))
            moved[(a, b)] = moved.get((a, b), 0) + m
        if moved != mult:
            ok = False
        if ok:
            count += 1
    return count


def canonicalize(g: MarkedGraph) -> tuple[MarkedGraph, int]:
    """Return the canonical representative and the automorphism count."""
    key = canonical_key(g)
    _, vdata, edata = key
    n_vertices = len(vdata)
    vertices = tuple(f"v{i}" for i in range(n_vertices))
    genus = {f"v{i}": vdata[i][0] for i in range(n_vertices)}
    marking = {f"v{i}": CurveClass(vdata[i][1]) for i in range(n_vertices)}
    vertex_of: dict[str, str] = {}
    involution: dict[str, str] = {}
    tail_labels: dict[str, str] = {}
    for k, (i, j) in enumerate(edata):
        fa, fb = f"e{k}.0", f"e{k}.1"
        vertex_of[fa] = f"v{i}"
        vertex_of[fb] = f"v{j}"
        involution[fa] = fb
        involution[fb] = fa
    tail_counter = 0
    for i in range(n_vertices):
        for label in vdata[i][2]:
            f = f"t{tail_counter}"
            tail_counter += 1
            vertex_of[f] = f"v{i}"
            involution[f] = f
            tail_labels[f] = label
    graph = ModularGraph(vertices, genus, vertex_of, involution, tail_labels)
    return MarkedGraph(graph, g.monoid, marking), automorphism_count(g)


# ---------------------------------------------------------------------------
# JSON encoding


def marked_graph_to_json(g: MarkedGraph) -> dict:
    graph = g.graph
    return {
        "monoid": g.monoid.to_json(),
        "vertices": [
            {"id": v, "genus": graph.genus[v], "marking": g.marking[v].to_json()}
            for v in sorted(graph.vertices)
        ],
        "edges": [list(e) for e in graph.edges()],
        "flags": {f: graph.vertex_of[f] for f in sorted(graph.vertex_of) if graph.involution[f] != f},
        "tails": [
            {"label": graph.tail_labels[f], "vertex": graph.vertex_of[f]}
            for f in sorted(graph.tails(), key=lambda f: graph.tail_labels[f])
        ],
    }


def marked_graph_from_json(data: dict) -> MarkedGraph:
    if "monoid" in data:
        monoid = DegreeMonoid.from_json(data["monoid"])
    else:
        ranks = {len(v.get("marking", [0])) for v in data["vertices"]}
        if len(ranks) != 1:
            raise GraphStructureError("markings of inconsistent rank and no monoid given")
        rank = ranks.pop()
        monoid = DegreeMonoid(rank, tuple(f"g{i}" for i in range(rank)), (0,) * rank)
    vertices = tuple(v["id"] for v in data["vertices"])
    genus = {v["id"]: int(v.get("genus", 0)) for v in data["vertices"]}
    marking = {
        v["id"]: CurveClass(tuple(int(c) for c in v.get("marking", [0] * monoid.rank)))
        for v in data["vertices"]
    }
    vertex_of: dict[str, str] = {}
    involution: dict[str, str] = {}
    tail_labels: dict[str, str] = {}
    flag_homes = dict(data.get("flags", {}))
    for f1, f2 in data.get("edges", []):
        for f in (f1, f2):
            if f in flag_homes:
                vertex_of[f] = flag_homes[f]
            elif len(vertices) == 1:
                vertex_of[f] = vertices[0]
            else:
                raise GraphStructureError(
                    f"edge flag {f!r} needs an entry in 'flags' to know its vertex"
                )
        involution[f1] = f2
        involution[f2] = f1
    for i, tail in enumerate(data.get("tails", [])):
        f = f"t{i}"
        while f in vertex_of:
            f = "_" + f
        vertex_of[f] = tail["vertex"]
        involution[f] = f
        tail_labels[f] = str(tail["label"])
    graph = ModularGraph(vertices, genus, vertex_of, involution, tail_labels)
    return MarkedGraph(graph, monoid, marking)
