"""Exact linear solving for pairing systems.

Systems are solved over the rationals with fraction-free (Bareiss)
elimination on integerized equations and deterministic pivoting: unknowns
are swept in a fixed order and the first usable equation takes each
pivot.  Both orders can be permuted by the caller; any particular
solution is acceptable to the consumers here, which only use pairings
against vectors from the kernel's orthogonal complement.

For large systems a modular pre-pass (numpy when available) selects the
pivot profile cheaply; the exact solve is then restricted to the pivot
subsystem and the candidate is verified against every equation, falling
back to a full exact elimination on any failure.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

_MODULUS = 2_147_483_647  # prime below 2^31 so int64 products cannot overflow

#: Above this many equations-times-unknowns the modular pre-pass kicks in.
_MODP_THRESHOLD = 40_000


class InconsistentSystemError(RuntimeError):
    """The linear system has no solution; upstream data is corrupt."""


Rational = Fraction | int


def _integerize(row: Sequence[Rational], rhs: Rational) -> tuple[list[int], int]:
    scale = 1
    for x in list(row) + [rhs]:
        if isinstance(x, Fraction):
            scale = scale * x.denominator // gcd(scale, x.denominator)
    ints = [int(x * scale) if isinstance(x, Fraction) else x * scale for x in row]
    return ints, int(rhs * scale) if isinstance(rhs, Fraction) else rhs * scale


def _check_orders(order: Sequence[int] | None, size: int, what: str) -> list[int]:
    if order is None:
        return list(range(size))
    order = list(order)
    if sorted(order) != list(range(size)):
        raise ValueError(f"{what} order must be a permutation of 0..{size - 1}")
    return order


def _bareiss_solve(
    rows: list[list[int]],
    rhs: list[int],
    unknown_order: list[int],
    equation_order: list[int],
) -> list[Fraction]:
    """Fraction-free forward elimination, then rational back substitution.

    Free unknowns are set to zero.  Raises InconsistentSystemError when
    the unused equations reject the candidate solution.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    work = [list(rows[i]) + [rhs[i]] for i in equation_order]
    pivots: list[tuple[int, int]] = []  # (work row, column)
    prev = 1
    r = 0
    for c in unknown_order:
        sel = next((i for i in range(r, m) if work[i][c] != 0), None)
        if sel is None:
            continue
        if sel != r:
            work[r], work[sel] = work[sel], work[r]
        piv = work[r][c]
        # the update must hit every remaining row, zero multiplier or not,
        # or the exact divisions of later steps lose their guarantee
        for i in range(r + 1, m):
            fi = work[i][c]
            row_i, row_r = work[i], work[r]
            work[i] = [(piv * a - fi * b) // prev for a, b in zip(row_i, row_r)]
        pivots.append((r, c))
        prev = piv
        r += 1
        if r == m:
            break
    solution = [Fraction(0)] * n
    for row_idx, col in reversed(pivots):
        row = work[row_idx]
        acc = Fraction(row[n])
        for c2, coef in enumerate(row[:n]):
            if coef and c2 != col and solution[c2]:
                acc -= coef * solution[c2]
        solution[col] = acc / row[col]
    for i in range(r, m):
        row = work[i]
        acc = Fraction(0)
        for c2, coef in enumerate(row[:n]):
            if coef and solution[c2]:
                acc += coef * solution[c2]
        if acc != row[n]:
            raise InconsistentSystemError("system is inconsistent")
    return solution


def _modp_pivot_profile(
    rows: list[list[int]],
    rhs: list[int],
    unknown_order: list[int],
    equation_order: list[int],
) -> tuple[list[int], list[int]] | None:
    """Pivot equations and unknowns of the system modulo a fixed prime.

    Returns None when numpy is unavailable; the caller then runs the
    exact elimination directly.
    """
    try:
        import numpy as np
    except ImportError:  # pragma: no cover - numpy is a declared dependency
        return None
    m = len(rows)
    n = len(rows[0])
    mat = np.empty((m, n + 1), dtype=np.int64)
    for i, src in enumerate(equation_order):
        mat[i, :n] = [x % _MODULUS for x in rows[src]]
        mat[i, n] = rhs[src] % _MODULUS
    row_origin = list(equation_order)
    pivot_rows: list[int] = []
    pivot_cols: list[int] = []
    r = 0
    for c in unknown_order:
        col = mat[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        sel = r + int(nz[0])
        if sel != r:
            mat[[r, sel]] = mat[[sel, r]]
            row_origin[r], row_origin[sel] = row_origin[sel], row_origin[r]
        inv = pow(int(mat[r, c]), _MODULUS - 2, _MODULUS)
        mat[r] = (mat[r] * inv) % _MODULUS
        below = mat[r + 1 :, c].copy()
        if below.any():
            mat[r + 1 :] = (mat[r + 1 :] - np.outer(below, mat[r])) % _MODULUS
        pivot_rows.append(row_origin[r])
        pivot_cols.append(c)
        r += 1
    return pivot_rows, pivot_cols


def solve_right(
    rows: Sequence[Sequence[Rational]],
    rhs: Sequence[Rational],
    unknown_order: Sequence[int] | None = None,
    equation_order: Sequence[int] | None = None,
) -> list[Fraction]:
    """Some exact solution x of A x = b; free unknowns are zero."""
    m = len(rows)
    if len(rhs) != m:
        raise ValueError("right hand side length does not match equation count")
    if m == 0:
        return []
    n = len(rows[0])
    unknowns = _check_orders(unknown_order, n, "unknown")
    equations = _check_orders(equation_order, m, "equation")
    int_rows, int_rhs = [], []
    for row, b in zip(rows, rhs):
        ir, ib = _integerize(row, b)
        int_rows.append(ir)
        int_rhs.append(ib)

    if m * n >= _MODP_THRESHOLD:
        profile = _modp_pivot_profile(int_rows, int_rhs, unknowns, equations)
        if profile is not None:
            pivot_rows, pivot_cols = profile
            sub_rows = [[int_rows[i][c] for c in pivot_cols] for i in pivot_rows]
            sub_rhs = [int_rhs[i] for i in pivot_rows]
            k = len(pivot_cols)
            try:
                sub_solution = _bareiss_solve(
                    sub_rows, sub_rhs, list(range(k)), list(range(k))
                )
                candidate = [Fraction(0)] * n
                for c, val in zip(pivot_cols, sub_solution):
                    candidate[c] = val
                if _verifies(int_rows, int_rhs, candidate):
                    return candidate
            except InconsistentSystemError:
                pass
            # fall through to the full exact elimination

    solution = _bareiss_solve(int_rows, int_rhs, unknowns, equations)
    if not _verifies(int_rows, int_rhs, solution):
        raise InconsistentSystemError("system is inconsistent")
    return solution


def _verifies(rows: list[list[int]], rhs: list[int], x: list[Fraction]) -> bool:
    denom = 1
    for v in x:
        denom = denom * v.denominator // gcd(denom, v.denominator)
    scaled = [int(v * denom) for v in x]
    for row, b in zip(rows, rhs):
        acc = 0
        for a, y in zip(row, scaled):
            if a and y:
                acc += a * y
        if acc != b * denom:
            return False
    return True


def solve_left(
    rows: Sequence[Sequence[Rational]],
    rhs: Sequence[Rational],
    unknown_order: Sequence[int] | None = None,
    equation_order: Sequence[int] | None = None,
) -> list[Fraction]:
    """Some exact solution x of x^T M = rhs^T for M given by rows."""
    if not rows:
        if any(b != 0 for b in rhs):
            raise InconsistentSystemError("empty matrix cannot hit a nonzero target")
        return []
    transposed = [[row[j] for row in rows] for j in range(len(rows[0]))]
    return solve_right(transposed, rhs, unknown_order, equation_order)


def invert_matrix(rows: Sequence[Sequence[Rational]]) -> list[list[Fraction]]:
    """Exact inverse of a small square matrix (Gauss-Jordan)."""
    n = len(rows)
    work = [[Fraction(x) for x in row] + [Fraction(i == j) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        sel = next((i for i in range(col, n) if work[i][col] != 0), None)
        if sel is None:
            raise InconsistentSystemError("matrix is singular")
        work[col], work[sel] = work[sel], work[col]
        piv = work[col][col]
        work[col] = [x / piv for x in work[col]]
        for i in range(n):
            if i != col and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[col])]
    return [row[n:] for row in work]
