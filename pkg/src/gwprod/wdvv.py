"""Rational curve counts from associativity of the quantum product.

For a surface whose cohomology is generated by divisors, the genus-zero
potential restricted to divisor and point insertions has one unknown
coefficient per curve class: the count N(beta) of rational curves of
that class through c1(beta) - 1 general points.  Matching coefficients
in one associativity equation (two divisor insertions against two point
insertions) expresses N(beta) in terms of products N(beta1) N(beta2)
over proper splittings, once the classical seed counts for the ruling
and line classes are supplied.

This path is deliberately independent of the strata machinery: it shares
only exact rational arithmetic with it.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .curves import CurveClass, decompositions
from .linalg import invert_matrix
from .targets import TargetError, TargetSpace

#: Classical seed counts: one line through two points in the plane, one
#: ruling curve through one point in the product of two lines.
_SEED_COUNTS: dict[str, dict[tuple[int, ...], int]] = {
    "p2": {(1,): 1},
    "p1xp1": {(1, 0): 1, (0, 1): 1},
}

_CACHE: dict[tuple[str, tuple[int, ...]], Fraction] = {}


def _conditions(target: TargetSpace, beta: CurveClass) -> int:
    return target.anticanonical_degree(beta) - 1


def wdvv_number(target: TargetSpace, beta: CurveClass) -> Fraction:
    """Count of rational curves of class beta through the expected number
    of general points, determined recursively by associativity."""
    seeds = _SEED_COUNTS.get(target.name)
    if seeds is None:
        raise TargetError(
            f"target {target.name!r} has no divisor-generated reconstruction data"
        )
    if beta.is_zero():
        raise TargetError("curve counts need a nonzero class")
    key = (target.name, beta.coords)
    if key in _CACHE:
        return _CACHE[key]
    if beta.coords in seeds:
        value = Fraction(seeds[beta.coords])
        _CACHE[key] = value
        return value

    n = _conditions(target, beta)
    if n < 3:
        raise TargetError(
            f"class {beta.coords} needs {n} point conditions; only seed classes may do that"
        )

    divisors = list(range(len(target.divisor_indices)))
    kappa = [
        [
            target.triple(0, target.divisor_indices[a], target.divisor_indices[b])
            for b in divisors
        ]
        for a in divisors
    ]
    kappa_inv = invert_matrix(kappa)
    pair = next(
        ((a, b) for a in divisors for b in divisors if kappa[a][b] != 0), None
    )
    if pair is None:
        raise TargetError("divisor pairing is identically zero")
    a, b = pair

    def deg(row: int, gamma: CurveClass) -> int:
        return target.divisor_degree(row, gamma)

    total = Fraction(0)
    for beta1, beta2 in decompositions(beta):
        if beta1.is_zero() or beta2.is_zero():
            continue
        n1 = _conditions(target, beta1)
        if n1 < 1 or _conditions(target, beta2) < 1:
            continue
        cross = Fraction(0)
        for mu in divisors:
            for nu in divisors:
                weight = kappa_inv[mu][nu]
                if weight == 0:
                    continue
                straight = (
                    deg(a, beta1) * deg(mu, beta1) * deg(nu, beta2) * deg(b, beta2)
                    * comb(n - 3, n1 - 1)
                )
                crossed = (
                    deg(a, beta1) * deg(b, beta1) * deg(mu, beta1) * deg(nu, beta2)
                    * comb(n - 3, n1)
                )
                cross += weight * (straight - crossed)
        if cross:
            total += wdvv_number(target, beta1) * wdvv_number(target, beta2) * cross
    value = total / kappa[a][b]
    _CACHE[key] = value
    return value
