"""Genus-zero Gromov-Witten pairings against boundary strata.

The degree-d invariants of the line with point and identity insertions
have a closed form forced by dimension counting and the fundamental
class and divisor rules: only the classical triple product (degree 0,
one point, two identities) and the all-points degree-1 invariants are
nonzero, and both equal one.  Pairing a point-insertion class against a
boundary stratum sums, over distributions of the degree to the stratum
vertices and over diagonal terms at each edge, the product of vertex
invariants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curves import CurveClass
from .linalg import solve_left
from .mbar import Evaluation, PairingMatrix, StratumTree, enumerate_strata
from .targets import TargetSpace


class GWError(ValueError):
    pass


def vertex_invariant_p1(d: int, points: int, identities: int) -> Fraction:
    """Degree-d invariant of the line with the given insertions.

    Nonzero cases: (d=0, one point, two identities) and (d=1, all
    points, at least three of them), both equal to one.
    """
    if d < 0:
        raise GWError("degree must be nonnegative")
    if points < 0 or identities < 0:
        raise GWError("insertion counts must be nonnegative")
    if points + identities < 3:
        raise GWError("a vertex needs at least three insertions to be stable")
    if d == 0 and points == 1 and identities == 2:
        return Fraction(1)
    if d == 1 and identities == 0:
        return Fraction(1)
    return Fraction(0)


def class_dimension(target: TargetSpace, beta: CurveClass, n: int) -> int:
    """Dimension of the point-insertion class on the n-pointed space."""
    point_codim = target.dim
    return target.anticanonical_degree(beta) + target.dim + n - 3 - n * point_codim


def _degree_distributions(total: int, slots: int):
    if slots == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _degree_distributions(total - first, slots - 1):
            yield (first,) + rest


def stratum_pairing(
    target: TargetSpace, degree: CurveClass | int, n: int, stratum: StratumTree
) -> Evaluation:
    """Intersection number of the degree-d point-insertion class with a
    boundary stratum of complementary dimension.

    Sums over all ways to write the degree as a sum over the stratum's
    vertices and over a diagonal term at each edge; each vertex then
    contributes a closed-form invariant.  Off-dimension pairings are
    flagged zeros.
    """
    if target.name != "p1":
        raise GWError("stratum pairings are implemented for the line only")
    d = degree.coords[0] if isinstance(degree, CurveClass) else int(degree)
    if d < 0:
        raise GWError("degree must be effective")
    if stratum.n != n:
        raise GWError("stratum lives on a different marked space")
    k = class_dimension(target, CurveClass((d,)), n)
    if stratum.dim + k != n - 3:
        return Evaluation(Fraction(0), True)

    tree = stratum.tree
    vertices = list(tree.vertices)
    v_index = {v: i for i, v in enumerate(vertices)}
    edges = list(tree.edges())
    tails_at = [0] * len(vertices)
    for t in tree.tails():
        tails_at[v_index[tree.vertex_of[t]]] += 1

    total = Fraction(0)
    for dist in _degree_distributions(d, len(vertices)):
        for choice in itertools.product((0, 1), repeat=len(edges)):
            points = list(tails_at)
            identities = [0] * len(vertices)
            for e, side in zip(edges, choice):
                # the diagonal of the line is 1 x pt + pt x 1: one flag of
                # the edge carries the point class, the other the identity
                pt_flag, id_flag = (e[0], e[1]) if side == 0 else (e[1], e[0])
                points[v_index[tree.vertex_of[pt_flag]]] += 1
                identities[v_index[tree.vertex_of[id_flag]]] += 1
            term = Fraction(1)
            for i in range(len(vertices)):
                term *= vertex_invariant_p1(dist[i], points[i], identities[i])
                if term == 0:
                    break
            total += term
    return Evaluation(total, False)


@dataclass(frozen=True)
class GWPairingVector:
    """Pairings of a point-insertion class against all strata of the
    complementary dimension."""

    target: TargetSpace
    degree: CurveClass
    n: int
    class_dim: int
    strata: tuple[StratumTree, ...]
    values: dict[StratumTree, Fraction]

    def vector(self) -> list[Fraction]:
        return [self.values[s] for s in self.strata]


def gw_pairing_vector(
    target: TargetSpace, degree: CurveClass | int, n: int, max_n: int = 9
) -> GWPairingVector:
    """Pair the degree-d class against every stratum of complementary
    dimension, in canonical stratum order."""
    d = degree if isinstance(degree, CurveClass) else CurveClass((int(degree),))
    k = class_dimension(target, d, n)
    if not 0 <= k <= n - 3:
        raise GWError(
            f"class dimension {k} is outside 0..{n - 3}; no pairing vector exists"
        )
    strata = tuple(enumerate_strata(n, n - 3 - k, max_n=max_n))
    values = {s: stratum_pairing(target, d, n, s).value for s in strata}
    return GWPairingVector(
        target=target, degree=d, n=n, class_dim=k, strata=strata, values=values
    )


def reconstruct_and_cup(
    v1: GWPairingVector,
    v2: GWPairingVector,
    matrix: PairingMatrix,
    unknown_order: Sequence[int] | None = None,
    equation_order: Sequence[int] | None = None,
) -> Fraction:
    """Intersection number of the two classes via strata reconstruction.

    Writes the first class in the strata basis of its own dimension by
    solving x^T M = v1^T against the pairing matrix, then pairs the
    coefficients with the second class's pairing vector.  The answer does
    not depend on which solution the elimination picks.
    """
    if v1.n != v2.n or v1.n != matrix.n:
        raise GWError("pairing data lives on different marked spaces")
    if v1.class_dim + v2.class_dim != v1.n - 3:
        raise GWError("classes do not have complementary dimensions")
    if matrix.k != v1.class_dim:
        raise GWError("matrix rows must match the first class's dimension")
    if matrix.cols != v1.strata:
        raise GWError("matrix columns must index the first pairing vector")
    if matrix.rows != v2.strata:
        raise GWError("matrix rows must index the second pairing vector")
    x = solve_left(
        [list(row) for row in matrix.entries],
        v1.vector(),
        unknown_order=unknown_order,
        equation_order=equation_order,
    )
    v2vec = v2.vector()
    return sum((a * b for a, b in zip(x, v2vec)), Fraction(0))


def reconstruct_coefficients(
    v1: GWPairingVector, matrix: PairingMatrix,
    unknown_order: Sequence[int] | None = None,
    equation_order: Sequence[int] | None = None,
) -> dict[StratumTree, Fraction]:
    """One strata-basis representative of the class (kernel ambiguity is
    harmless for pairing purposes)."""
    if matrix.cols != v1.strata or matrix.k != v1.class_dim:
        raise GWError("matrix shape does not match the pairing vector")
    x = solve_left(
        [list(row) for row in matrix.entries],
        v1.vector(),
        unknown_order=unknown_order,
        equation_order=equation_order,
    )
    return dict(zip(matrix.rows, x))


def kunneth_sign(gamma_degs: Sequence[int], eps_degs: Sequence[int]) -> int:
    """Sign from reordering interleaved tensor factors: (-1) to the sum
    over i > j of deg(gamma_i) deg(eps_j)."""
    if len(gamma_degs) != len(eps_degs):
        raise GWError("degree lists must have equal length")
    s = sum(
        gamma_degs[i] * eps_degs[j]
        for i in range(len(gamma_degs))
        for j in range(i)
    )
    return -1 if s % 2 else 1
