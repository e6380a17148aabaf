"""Exact intersection numbers on moduli of stable rational curves.

Boundary strata of the n-pointed space are stable trees with labeled
leaves, or equivalently families of pairwise compatible 2-set partitions
of the markings.  A stratum is the transverse intersection of the
boundary divisors given by its edges, so every top-degree product of
boundary divisors and cotangent-line classes can be evaluated by
restricting factor by factor to a divisor, which splits the space into a
product of two smaller ones.  Pure cotangent products integrate to
multinomial coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, factorial
from typing import Callable, Iterable, NamedTuple

from .curves import DegreeMonoid
from .graphs import MarkedGraph, ModularGraph

#: Enumeration beyond this many marked points is refused unless the
#: caller raises the cap explicitly.
DEFAULT_N_CAP = 9


class MbarError(ValueError):
    pass


Split = frozenset  # a side of a 2-set partition of {1..n}, never containing 1


def normalize_split(n: int, side: Iterable[int]) -> Split:
    """Store the side of the partition not containing marked point 1."""
    s = frozenset(side)
    if not s <= set(range(1, n + 1)):
        raise MbarError(f"split {sorted(s)} is not a subset of 1..{n}")
    if 1 in s:
        s = frozenset(range(1, n + 1)) - s
    if not 2 <= len(s) <= n - 2:
        raise MbarError(f"split {sorted(s)} does not have between 2 and n-2 points per side")
    return s


def splits_compatible(s: Split, t: Split) -> bool:
    """Two normalized splits bound intersecting divisors iff nested or disjoint."""
    return s <= t or t <= s or not (s & t)


def all_splits(n: int) -> list[Split]:
    """All normalized splits of {1..n}, in deterministic order."""
    rest = range(2, n + 1)
    out = []
    for size in range(2, n - 1):
        for combo in itertools.combinations(rest, size):
            out.append(frozenset(combo))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True, eq=True)
class StratumTree:
    """Boundary stratum of the n-pointed space, encoded by its edge splits.

    The splits form a laminar family; the dual tree is rooted at the
    vertex carrying marked point 1 and has one extra vertex per split.
    """

    n: int
    splits: tuple[Split, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "splits", tuple(sorted(self.splits, key=lambda s: (len(s), sorted(s))))
        )
        seen = set()
        for s in self.splits:
            ns = normalize_split(self.n, s)
            if ns != s:
                raise MbarError("splits must be stored in normalized form")
            if s in seen:
                raise MbarError("repeated split")
            seen.add(s)
        for s, t in itertools.combinations(self.splits, 2):
            if not splits_compatible(s, t):
                raise MbarError(f"incompatible splits {sorted(s)} and {sorted(t)}")

    @property
    def dim(self) -> int:
        return self.n - 3 - len(self.splits)

    @cached_property
    def tree(self) -> ModularGraph:
        """The dual tree, all genera zero, tails labeled '1'..'n'."""
        n = self.n
        universe = frozenset(range(2, n + 1))
        nodes: list[frozenset] = [universe] + list(self.splits)
        order = {s: i for i, s in enumerate(nodes)}

        def parent(s: frozenset) -> frozenset:
            best = universe
            for t in self.splits:
                if s < t and t < best:
                    best = t
            return best

        vertex_name = {s: f"v{order[s]}" for s in nodes}
        vertices = tuple(vertex_name[s] for s in nodes)
        genus = {v: 0 for v in vertices}
        vertex_of: dict[str, str] = {}
        involution: dict[str, str] = {}
        tail_labels: dict[str, str] = {}
        for k, s in enumerate(self.splits):
            p = parent(s)
            fa, fb = f"e{k}.0", f"e{k}.1"
            vertex_of[fa] = vertex_name[p]
            vertex_of[fb] = vertex_name[s]
            involution[fa] = fb
            involution[fb] = fa
        for i in range(1, n + 1):
            if i == 1:
                home = universe
            else:
                candidates = [s for s in self.splits if i in s]
                home = min(candidates, key=len) if candidates else universe
            f = f"t{i}"
            vertex_of[f] = vertex_name[home]
            involution[f] = f
            tail_labels[f] = str(i)
        return ModularGraph(vertices, genus, vertex_of, involution, tail_labels)

    def key(self) -> str:
        """Canonical text form, e.g. '2,5|3,4' ('*' for the open stratum)."""
        if not self.splits:
            return "*"
        return "|".join(",".join(str(i) for i in sorted(s)) for s in self.splits)

    @staticmethod
    def from_key(n: int, key: str) -> "StratumTree":
        if key == "*":
            return StratumTree(n, ())
        splits = tuple(
            normalize_split(n, frozenset(int(x) for x in part.split(",")))
            for part in key.split("|")
        )
        return StratumTree(n, splits)

    def as_marked(self, monoid: DegreeMonoid) -> MarkedGraph:
        zero = {v: monoid.zero() for v in self.tree.vertices}
        return MarkedGraph(self.tree, monoid, zero)


@lru_cache(maxsize=None)
def _strata_cached(n: int, dim: int) -> tuple[StratumTree, ...]:
    k = n - 3 - dim
    divisors = all_splits(n)
    out: list[StratumTree] = []

    def extend(chosen: list[Split], start: int) -> None:
        if len(chosen) == k:
            out.append(StratumTree(n, tuple(chosen)))
            return
        for i in range(start, len(divisors)):
            s = divisors[i]
            if all(splits_compatible(s, t) for t in chosen):
                chosen.append(s)
                extend(chosen, i + 1)
                chosen.pop()

    extend([], 0)
    return tuple(out)


def enumerate_strata(n: int, dim: int, max_n: int = DEFAULT_N_CAP) -> list[StratumTree]:
    """All boundary strata of the given dimension, deduplicated, in a
    deterministic order.

    Every laminar family of n-3-dim splits is automatically a stable
    tree: each non-root vertex gets its parent edge plus at least two
    more flags, and the root always carries marked point 1 plus two
    other flags.
    """
    if n < 3:
        raise MbarError("need at least three marked points")
    if n > max_n:
        raise MbarError(f"n={n} exceeds the cap of {max_n}; raise max_n to proceed")
    if not 0 <= dim <= n - 3:
        raise MbarError(f"dimension {dim} out of range 0..{n - 3}")
    return list(_strata_cached(n, dim))


class Evaluation(NamedTuple):
    value: Fraction
    degree_mismatch: bool


@dataclass(frozen=True)
class CycleMonomial:
    """Product of boundary divisors and cotangent-line classes."""

    n: int
    divisor_factors: tuple[Split, ...]
    psi_exponents: tuple[tuple[int, int], ...]  # (marked point, exponent), sorted

    def __post_init__(self):
        object.__setattr__(
            self,
            "divisor_factors",
            tuple(sorted((normalize_split(self.n, s) for s in self.divisor_factors),
                         key=lambda s: (len(s), sorted(s)))),
        )
        cleaned = []
        seen = set()
        for point, exp in sorted(self.psi_exponents):
            if not 1 <= point <= self.n:
                raise MbarError(f"psi index {point} out of range")
            if point in seen:
                raise MbarError(f"repeated psi index {point}")
            if exp < 0:
                raise MbarError("psi exponents must be nonnegative")
            seen.add(point)
            if exp > 0:
                cleaned.append((point, exp))
        object.__setattr__(self, "psi_exponents", tuple(cleaned))

    @property
    def degree(self) -> int:
        return len(self.divisor_factors) + sum(e for _, e in self.psi_exponents)

    def __mul__(self, other: "CycleMonomial") -> "CycleMonomial":
        if self.n != other.n:
            raise MbarError("cannot multiply monomials on different spaces")
        psi: dict[int, int] = dict(self.psi_exponents)
        for point, exp in other.psi_exponents:
            psi[point] = psi.get(point, 0) + exp
        return CycleMonomial(
            self.n,
            self.divisor_factors + other.divisor_factors,
            tuple(sorted(psi.items())),
        )


def stratum_to_monomial(s: StratumTree) -> CycleMonomial:
    """A stratum is the transverse product of its edge divisors."""
    return CycleMonomial(s.n, s.splits, ())


def _multinomial(total: int, parts: Iterable[int]) -> int:
    out = factorial(total)
    for p in parts:
        out //= factorial(p)
    return out


def _canonical_subproblem(
    points: tuple[int, ...],
    divisors: tuple[frozenset, ...],
    psi: tuple[tuple[int, int], ...],
) -> tuple:
    rename = {p: i + 1 for i, p in enumerate(sorted(points))}
    m = len(points)
    divs = []
    for s in divisors:
        side = frozenset(rename[p] for p in s)
        if 1 in side:
            side = frozenset(range(1, m + 1)) - side
        divs.append(tuple(sorted(side)))
    new_psi = tuple(sorted((rename[p], e) for p, e in psi))
    return (m, tuple(sorted(divs)), new_psi)


_EVAL_CACHE: dict[tuple, Fraction] = {}


def _evaluate(
    points: tuple[int, ...],
    divisors: tuple[frozenset, ...],
    psi: tuple[tuple[int, int], ...],
    pivot: Callable[[list[frozenset]], int] | None,
) -> Fraction:
    """Integral over the moduli space with the given marked points.

    Divisors are stored as one side of the partition; psi maps points to
    exponents.  Off-degree products are zero.
    """
    m = len(points)
    degree = len(divisors) + sum(e for _, e in psi)
    if degree != m - 3:
        return Fraction(0)
    cache_key = None
    if pivot is None:
        cache_key = _canonical_subproblem(points, divisors, psi)
        hit = _EVAL_CACHE.get(cache_key)
        if hit is not None:
            return hit
    value = _evaluate_inner(points, divisors, psi, pivot)
    if cache_key is not None:
        _EVAL_CACHE[cache_key] = value
    return value


def _evaluate_inner(points, divisors, psi, pivot) -> Fraction:
    m = len(points)
    point_set = frozenset(points)
    if not divisors:
        return Fraction(_multinomial(m - 3, (e for _, e in psi)))

    ordered = sorted(divisors, key=lambda s: (len(s), sorted(s)))
    index = pivot(list(ordered)) if pivot is not None else 0
    s = ordered[index]
    rest = ordered[:index] + ordered[index + 1:]
    s_comp = point_set - s

    same = 0
    side_a: list[frozenset] = []
    side_b: list[frozenset] = []
    for t in rest:
        t_comp = point_set - t
        if t == s or t == s_comp:
            same += 1
        elif t <= s:
            side_a.append(t)
        elif t_comp <= s:
            side_a.append(t_comp)
        elif t <= s_comp:
            side_b.append(t)
        elif t_comp <= s_comp:
            side_b.append(t_comp)
        else:
            return Fraction(0)  # transverse partitions never meet

    star_a = -1
    star_b = -2
    while star_a in point_set or star_b in point_set:
        star_a -= 2
        star_b -= 2
    psi_a = [(p, e) for p, e in psi if p in s]
    psi_b = [(p, e) for p, e in psi if p not in s]
    points_a = tuple(sorted(s)) + (star_a,)
    points_b = tuple(sorted(s_comp)) + (star_b,)

    total = Fraction(0)
    sign = (-1) ** same
    for j in range(same + 1):
        pa = tuple(sorted(psi_a + ([(star_a, j)] if j else [])))
        pb = tuple(sorted(psi_b + ([(star_b, same - j)] if same - j else [])))
        left = _evaluate(points_a, tuple(side_a), pa, pivot)
        if left == 0:
            continue
        right = _evaluate(points_b, tuple(side_b), pb, pivot)
        total += comb(same, j) * left * right
    return sign * total


def evaluate_monomial(
    m: CycleMonomial, pivot: Callable[[list[frozenset]], int] | None = None
) -> Evaluation:
    """Evaluate a monomial against the fundamental cycle.

    Monomials whose total degree differs from the dimension evaluate to
    zero with the mismatch flag set.  `pivot` overrides the deterministic
    choice of which divisor to restrict to first (the value must not
    depend on it); passing a pivot disables the cache.
    """
    if m.degree != m.n - 3:
        return Evaluation(Fraction(0), True)
    points = tuple(range(1, m.n + 1))
    value = _evaluate(points, tuple(m.divisor_factors), tuple(m.psi_exponents), pivot)
    return Evaluation(value, False)


@dataclass(frozen=True)
class PairingMatrix:
    """Pairings of all strata of one dimension against the complementary one."""

    n: int
    k: int
    rows: tuple[StratumTree, ...]
    cols: tuple[StratumTree, ...]
    entries: tuple[tuple[Fraction, ...], ...]


def pairing_matrix(n: int, k: int, max_n: int = DEFAULT_N_CAP) -> PairingMatrix:
    """Matrix of intersection numbers deg([row stratum] . [col stratum]).

    Rows have dimension k, columns dimension n-3-k; the matrix is square
    and symmetric when the two dimensions agree.
    """
    if not 0 <= k <= n - 3:
        raise MbarError(f"k={k} out of range 0..{n - 3}")
    rows = tuple(enumerate_strata(n, k, max_n=max_n))
    cols = tuple(enumerate_strata(n, n - 3 - k, max_n=max_n))
    entries = tuple(
        tuple(evaluate_monomial(stratum_to_monomial(r) * stratum_to_monomial(c)).value for c in cols)
        for r in rows
    )
    return PairingMatrix(n=n, k=k, rows=rows, cols=cols, entries=entries)
