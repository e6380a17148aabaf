"""Desk-scale target spaces: cohomology bases, pairings and diagonals.

A target bundles the even cohomology basis with its classical triple
products, the monoid of effective curve classes, the degrees curve
classes have against the divisor generators, and a diagonal
decomposition for splitting computations into vertex factors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curves import CurveClass, DegreeMonoid, c1_pairing
from .linalg import InconsistentSystemError, invert_matrix


class TargetError(ValueError):
    pass


@dataclass(frozen=True)
class TargetSpace:
    name: str
    cohomology_basis: tuple[tuple[str, int], ...]  # (label, complex codimension)
    triple_products: dict[tuple[int, int, int], int]  # sorted index triples
    divisor_indices: tuple[int, ...]
    monoid: DegreeMonoid
    divisor_degrees: tuple[tuple[int, ...], ...]  # one row per divisor, per generator
    diagonal: tuple[tuple[tuple[int, int], int], ...]  # ((left, right), multiplicity)

    def __post_init__(self):
        if self.cohomology_basis[0][1] != 0:
            raise TargetError("the first basis class must be the identity")
        if len(self.divisor_degrees) != len(self.divisor_indices):
            raise TargetError("one degree row per divisor generator is required")
        for row in self.divisor_degrees:
            if len(row) != self.monoid.rank:
                raise TargetError("divisor degree rows must match the monoid rank")
        pairing = self.pairing_matrix()
        try:
            invert_matrix(pairing)
        except InconsistentSystemError:
            raise TargetError("Poincare pairing is degenerate") from None
        self._check_diagonal(pairing)

    @property
    def dim(self) -> int:
        return max(codim for _, codim in self.cohomology_basis)

    def triple(self, a: int, b: int, c: int) -> int:
        return self.triple_products.get(tuple(sorted((a, b, c))), 0)

    def pairing_matrix(self) -> list[list[int]]:
        k = len(self.cohomology_basis)
        return [[self.triple(0, a, b) for b in range(k)] for a in range(k)]

    def _check_diagonal(self, pairing: list[list[int]]) -> None:
        # pairing the diagonal against (gamma x 1) must reproduce gamma:
        # sum over terms (l, r) of mult * <gamma, l> * e_r equals e_gamma
        k = len(self.cohomology_basis)
        for gamma in range(k):
            out = [0] * k
            for (left, right), mult in self.diagonal:
                out[right] += mult * pairing[gamma][left]
            if out != [int(r == gamma) for r in range(k)]:
                raise TargetError(f"diagonal fails the Kunneth identity at index {gamma}")

    def divisor_degree(self, divisor_row: int, beta: CurveClass) -> int:
        row = self.divisor_degrees[divisor_row]
        return sum(d * c for d, c in zip(row, beta.coords))

    def anticanonical_degree(self, beta: CurveClass) -> int:
        return c1_pairing(self.monoid, beta)

    def point_index(self) -> int:
        for i, (_, codim) in enumerate(self.cohomology_basis):
            if codim == self.dim:
                return i
        raise TargetError("no point class in the basis")


P1 = TargetSpace(
    name="p1",
    cohomology_basis=(("1", 0), ("pt", 1)),
    triple_products={(0, 0, 1): 1},
    divisor_indices=(1,),
    monoid=DegreeMonoid(1, ("line",), (2,)),
    divisor_degrees=((1,),),
    diagonal=(((0, 1), 1), ((1, 0), 1)),
)

P2 = TargetSpace(
    name="p2",
    cohomology_basis=(("1", 0), ("h", 1), ("pt", 2)),
    triple_products={(0, 0, 2): 1, (0, 1, 1): 1},
    divisor_indices=(1,),
    monoid=DegreeMonoid(1, ("line",), (3,)),
    divisor_degrees=((1,),),
    diagonal=(((0, 2), 1), ((1, 1), 1), ((2, 0), 1)),
)

P1XP1 = TargetSpace(
    name="p1xp1",
    cohomology_basis=(("1", 0), ("h1", 1), ("h2", 1), ("pt", 2)),
    triple_products={(0, 0, 3): 1, (0, 1, 2): 1},
    divisor_indices=(1, 2),
    monoid=DegreeMonoid(2, ("ruling1", "ruling2"), (2, 2)),
    divisor_degrees=((1, 0), (0, 1)),
    diagonal=(((0, 3), 1), ((1, 2), 1), ((2, 1), 1), ((3, 0), 1)),
)

TARGETS = {t.name: t for t in (P1, P2, P1XP1)}


def get_target(name: str) -> TargetSpace:
    try:
        return TARGETS[name.lower()]
    except KeyError:
        raise TargetError(f"unknown target {name!r}; known: {sorted(TARGETS)}") from None
