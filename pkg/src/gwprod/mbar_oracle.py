"""Independent brute-force evaluation of monomials for n = 4 and n = 5.

This path shares nothing with the restriction recursion: cotangent
classes are rewritten as sums of boundary divisors (the class vanishes
on the 3-pointed space, so it equals the sum of divisors separating its
point from two fixed others), and pure divisor products are evaluated
against closed models: the 4-pointed space is a line whose boundary
divisors are points, and the 5-pointed space is the plane blown up in
four points, whose ten boundary divisors are the (-1)-curves.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .mbar import CycleMonomial, MbarError, Split, normalize_split


def psi_divisor_expansion(n: int, i: int) -> list[Split]:
    """Divisors summing to the cotangent class at marked point i.

    Uses the two smallest marked points different from i as the fixed
    pair; any valid choice gives the same class.
    """
    others = [j for j in range(1, n + 1) if j != i]
    pool = others[2:]  # everything but i and the fixed pair
    out = []
    for size in range(len(pool) + 1):
        for extra in itertools.combinations(pool, size):
            side = frozenset({i, *extra})
            if 2 <= len(side) <= n - 2:
                out.append(normalize_split(n, side))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def _divisor_class_n5(s: Split) -> tuple[int, ...]:
    """Class of a boundary divisor in the blown-up-plane basis (H, E1..E4).

    The two-point side {i,5} maps to the exceptional curve over the i-th
    point; the side {i,j} with i,j <= 4 maps to the line through the
    other two points.
    """
    full = frozenset(range(1, 6))
    two_side = s if len(s) == 2 else full - s
    if 5 in two_side:
        (i,) = sorted(two_side - {5})
        vec = [0, 0, 0, 0, 0]
        vec[i] = 1
        return tuple(vec)
    k, l = sorted(frozenset({1, 2, 3, 4}) - two_side)
    vec = [1, 0, 0, 0, 0]
    vec[k] = -1
    vec[l] = -1
    return tuple(vec)


def _intersect_n5(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    # intersection form diag(1, -1, -1, -1, -1)
    return a[0] * b[0] - sum(a[i] * b[i] for i in range(1, 5))


def _pure_divisor_value(n: int, factors: list[Split]) -> Fraction:
    if n == 4:
        if len(factors) != 1:
            raise MbarError("degree mismatch should have been filtered")
        return Fraction(1)
    if n == 5:
        if len(factors) != 2:
            raise MbarError("degree mismatch should have been filtered")
        a, b = (_divisor_class_n5(s) for s in factors)
        return Fraction(_intersect_n5(a, b))
    raise MbarError("oracle only models n = 4 and n = 5")


def oracle_evaluate(m: CycleMonomial) -> Fraction:
    """Evaluate a top-degree monomial on the 4- or 5-pointed space."""
    if m.n not in (4, 5):
        raise MbarError("oracle only models n = 4 and n = 5")
    if m.degree != m.n - 3:
        return Fraction(0)
    expansions: list[list[Split]] = [[s] for s in m.divisor_factors]
    for point, exp in m.psi_exponents:
        for _ in range(exp):
            expansions.append(psi_divisor_expansion(m.n, point))
    total = Fraction(0)
    for combo in itertools.product(*expansions):
        total += _pure_divisor_value(m.n, list(combo))
    return total
