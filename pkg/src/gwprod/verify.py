"""End-to-end check that factor classes cup to the product count.

For a bidegree (d1, d2) the count of rational curves on the product of
two lines through n = 2(d1+d2) - 1 general points is computed twice:
once by the associativity recursion, and once by pairing the two
point-insertion classes of the line against boundary strata,
reconstructing the first in the strata basis and cupping with the
second.  The two exact rationals must agree.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .curves import CurveClass
from .gw import class_dimension, gw_pairing_vector, reconstruct_and_cup
from .mbar import DEFAULT_N_CAP, pairing_matrix
from .targets import P1, P1XP1
from .wdvv import wdvv_number


class BidegreeError(ValueError):
    """Degenerate or oversized bidegree request."""


@dataclass(frozen=True)
class VerificationReport:
    bidegree: tuple[int, int]
    n: int
    lhs: Fraction
    rhs: Fraction
    equal: bool
    strata_counts: dict[str, int] = field(default_factory=dict)
    timings_ms: dict[str, int] = field(default_factory=dict)

    def to_json(self, include_timings: bool = True) -> dict:
        out = {
            "bidegree": list(self.bidegree),
            "n": self.n,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "equal": self.equal,
            "strata_counts": dict(self.strata_counts),
        }
        if include_timings:
            out["timings_ms"] = dict(self.timings_ms)
        return out

    def to_text(self) -> str:
        status = "EQUAL" if self.equal else "MISMATCH"
        return (
            f"bidegree ({self.bidegree[0]},{self.bidegree[1]})  n={self.n}  "
            f"lhs={self.lhs}  rhs={self.rhs}  {status}"
        )


def verify_product(d1: int, d2: int, cap_n: int = DEFAULT_N_CAP) -> VerificationReport:
    """Compare the two pipelines for one bidegree.

    Bidegrees with a zero component would need unstable marked spaces
    (fewer than three points) and are refused.
    """
    if d1 < 1 or d2 < 1:
        raise BidegreeError(
            "both components of the bidegree must be at least 1; a zero "
            "component has no stable point count at this scale"
        )
    n = 2 * (d1 + d2) - 1
    if n < 3:
        raise BidegreeError("need at least three point conditions")
    if n > cap_n:
        raise BidegreeError(f"n={n} exceeds the cap {cap_n}; raise --cap-n to allow it")

    timings: dict[str, int] = {}

    def clock(stage: str, fn):
        start = time.perf_counter_ns()
        result = fn()
        timings[stage] = (time.perf_counter_ns() - start) // 1_000_000
        return result

    lhs = clock("wdvv", lambda: wdvv_number(P1XP1, CurveClass((d1, d2))))
    gamma1 = clock("pairings_d1", lambda: gw_pairing_vector(P1, d1, n, max_n=cap_n))
    gamma2 = clock("pairings_d2", lambda: gw_pairing_vector(P1, d2, n, max_n=cap_n))
    k1 = class_dimension(P1, CurveClass((d1,)), n)
    matrix = clock("pairing_matrix", lambda: pairing_matrix(n, k1, max_n=cap_n))
    rhs = clock("reconstruct_cup", lambda: reconstruct_and_cup(gamma1, gamma2, matrix))

    return VerificationReport(
        bidegree=(d1, d2),
        n=n,
        lhs=lhs,
        rhs=rhs,
        equal=lhs == rhs,
        strata_counts={
            "row_dim": matrix.k,
            "rows": len(matrix.rows),
            "col_dim": n - 3 - matrix.k,
            "cols": len(matrix.cols),
        },
        timings_ms=timings,
    )


DEFAULT_BIDEGREES = ((1, 1), (2, 1), (1, 2), (2, 2))
EXTRA_BIDEGREES = ((3, 1), (1, 3))


def report_to_json_text(report: VerificationReport, include_timings: bool = True) -> str:
    return json.dumps(report.to_json(include_timings=include_timings), indent=2, sort_keys=True)
