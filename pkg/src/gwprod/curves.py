"""Effective curve classes as free commutative monoids N^r.

A degree monoid models the cone of effective curve classes of a target
variety together with the value of the anticanonical pairing on each
generator.  Classes are tuples of nonnegative integers; maps between
monoids are nonnegative integer matrices acting on generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod


class MonoidError(ValueError):
    """Raised for malformed monoids, classes or maps."""


@dataclass(frozen=True)
class DegreeMonoid:
    """Free commutative monoid of effective curve classes.

    c1_pairings[i] is the degree of the anticanonical class on the i-th
    generator; it feeds expected-dimension counts downstream.
    """

    rank: int
    generator_names: tuple[str, ...]
    c1_pairings: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise MonoidError("monoid rank must be >= 1")
        if len(self.generator_names) != self.rank or len(self.c1_pairings) != self.rank:
            raise MonoidError("generator_names and c1_pairings must have length rank")
        if any(c < 0 for c in self.c1_pairings):
            raise MonoidError("c1 pairings must be nonnegative")

    def zero(self) -> "CurveClass":
        return CurveClass((0,) * self.rank)

    def curve_class(self, *coords: int) -> "CurveClass":
        beta = CurveClass(tuple(coords))
        if len(beta.coords) != self.rank:
            raise MonoidError(f"expected {self.rank} coordinates, got {len(beta.coords)}")
        return beta

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "generators": list(self.generator_names),
            "c1": list(self.c1_pairings),
        }

    @staticmethod
    def from_json(data: dict) -> "DegreeMonoid":
        return DegreeMonoid(
            rank=int(data["rank"]),
            generator_names=tuple(data.get("generators", [f"g{i}" for i in range(int(data["rank"]))])),
            c1_pairings=tuple(int(c) for c in data.get("c1", [0] * int(data["rank"]))),
        )


@dataclass(frozen=True)
class CurveClass:
    """Element of a degree monoid: a tuple of nonnegative integers."""

    coords: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.coords):
            raise MonoidError(f"curve class must be effective, got {self.coords}")

    def __add__(self, other: "CurveClass") -> "CurveClass":
        if len(self.coords) != len(other.coords):
            raise MonoidError("cannot add classes of different rank")
        return CurveClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def to_json(self) -> list[int]:
        return list(self.coords)


@dataclass(frozen=True)
class MonoidMap:
    """Additive map between degree monoids, one target class per generator."""

    source: DegreeMonoid
    target: DegreeMonoid
    matrix: tuple[tuple[int, ...], ...]  # target.rank rows, source.rank columns

    def __post_init__(self):
        if len(self.matrix) != self.target.rank:
            raise MonoidError("matrix must have target.rank rows")
        for row in self.matrix:
            if len(row) != self.source.rank:
                raise MonoidError("matrix rows must have source.rank entries")
            if any(a < 0 for a in row):
                raise MonoidError("monoid maps must preserve effectivity")


#: Rank-1 monoid receiving the marking-forgetting map.
POINT_MONOID = DegreeMonoid(1, ("z",), (0,))


def pushforward(mmap: MonoidMap, beta: CurveClass) -> CurveClass:
    """Apply a monoid map to a curve class."""
    if len(beta.coords) != mmap.source.rank:
        raise MonoidError(
            f"class of rank {len(beta.coords)} does not belong to source of rank {mmap.source.rank}"
        )
    return CurveClass(
        tuple(sum(row[j] * beta.coords[j] for j in range(mmap.source.rank)) for row in mmap.matrix)
    )


def decompositions(beta: CurveClass) -> list[tuple[CurveClass, CurveClass]]:
    """All ordered pairs (beta1, beta2) with beta1 + beta2 = beta.

    The list is in lexicographic order of beta1 and has prod(coord+1)
    entries; the two parts play distinct roles downstream, so (a, b) and
    (b, a) are listed separately.
    """
    pairs = []
    for first in itertools.product(*(range(c + 1) for c in beta.coords)):
        second = tuple(c - f for c, f in zip(beta.coords, first))
        pairs.append((CurveClass(first), CurveClass(second)))
    return pairs


def decomposition_count(beta: CurveClass) -> int:
    return prod(c + 1 for c in beta.coords)


def c1_pairing(monoid: DegreeMonoid, beta: CurveClass) -> int:
    """Degree of the anticanonical class on beta (linear in beta)."""
    if len(beta.coords) != monoid.rank:
        raise MonoidError("class does not belong to this monoid")
    return sum(c * d for c, d in zip(monoid.c1_pairings, beta.coords))


def compose(second: MonoidMap, first: MonoidMap) -> MonoidMap:
    """Composite map second . first."""
    if first.target != second.source:
        raise MonoidError("maps are not composable")
    rows = []
    for i in range(second.target.rank):
        rows.append(
            tuple(
                sum(second.matrix[i][k] * first.matrix[k][j] for k in range(first.target.rank))
                for j in range(first.source.rank)
            )
        )
    return MonoidMap(first.source, second.target, tuple(rows))


def identity_map(monoid: DegreeMonoid) -> MonoidMap:
    rows = tuple(tuple(1 if i == j else 0 for j in range(monoid.rank)) for i in range(monoid.rank))
    return MonoidMap(monoid, monoid, rows)


def zero_map(source: DegreeMonoid, target: DegreeMonoid = POINT_MONOID) -> MonoidMap:
    """The map sending everything to the zero class (marking forgetfulness)."""
    rows = tuple((0,) * source.rank for _ in range(target.rank))
    return MonoidMap(source, target, rows)


def projection_map(source: DegreeMonoid, indices: tuple[int, ...], target: DegreeMonoid) -> MonoidMap:
    """Coordinate projection onto the generators listed in indices."""
    if len(indices) != target.rank:
        raise MonoidError("projection index count must match target rank")
    rows = tuple(
        tuple(1 if j == idx else 0 for j in range(source.rank)) for idx in indices
    )
    return MonoidMap(source, target, rows)
