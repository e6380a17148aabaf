"""Seeded property suites runnable from the command line and from tests.

Each check returns a result record; the runner aggregates them.  All
randomness flows from one seed so failures reproduce exactly.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .curves import (
    CurveClass,
    DegreeMonoid,
    MonoidMap,
    compose,
    decomposition_count,
    decompositions,
    identity_map,
    projection_map,
    pushforward,
)
from .graphs import (
    MarkedGraph,
    ModularGraph,
    canonical_key,
    contract_edge,
    validate,
)
from .functors import (
    EmptyStabilizationError,
    add_tails,
    pushforward_stabilize,
    splitting_pullback,
)
from .gw import (
    class_dimension,
    gw_pairing_vector,
    kunneth_sign,
    reconstruct_and_cup,
    stratum_pairing,
)
from .mbar import (
    CycleMonomial,
    all_splits,
    enumerate_strata,
    evaluate_monomial,
    pairing_matrix,
)
from .mbar_oracle import oracle_evaluate
from .targets import P1, P1XP1, P2
from .verify import DEFAULT_BIDEGREES, verify_product
from .wdvv import wdvv_number


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    skipped: bool = False
    millis: int = 0


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 11
    graph_trials: int = 1000
    cap_n: int = 7
    kunneth_trials: int = 20
    elimination_orders: int = 5


@dataclass
class SuiteReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed or r.skipped for r in self.results)

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            status = "SKIP" if r.skipped else ("PASS" if r.passed else "FAIL")
            lines.append(f"[{status}] {r.name}: {r.detail} ({r.millis} ms)")
        verdict = "all suites passed" if self.passed else "FAILURES PRESENT"
        lines.append(verdict)
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# random stable graphs

RANK2 = DegreeMonoid(2, ("a", "b"), (2, 2))
RANK1 = DegreeMonoid(1, ("a",), (2,))


def random_stable_marked_graph(
    rng: random.Random,
    monoid: DegreeMonoid = RANK2,
    max_vertices: int = 4,
    max_coord: int = 2,
) -> MarkedGraph:
    """A small random connected stable graph over the given monoid.

    Vertices get random genera weighted toward zero, a random spanning
    tree plus occasional extra edge or loop, random tails, and random
    markings; stability is then repaired by adding tails where needed.
    """
    k = rng.randint(1, max_vertices)
    names = [f"v{i}" for i in range(k)]
    genus = {v: rng.choice([0, 0, 0, 1]) for v in names}
    flags: dict[str, str] = {}
    involution: dict[str, str] = {}
    labels: dict[str, str] = {}
    counter = itertools.count()

    def new_flag(v: str) -> str:
        f = f"f{next(counter)}"
        flags[f] = v
        return f

    def add_edge(u: str, w: str) -> None:
        fa, fb = new_flag(u), new_flag(w)
        involution[fa] = fb
        involution[fb] = fa

    for i in range(1, k):
        add_edge(names[rng.randrange(i)], names[i])
    if k >= 2 and rng.random() < 0.3:
        u, w = rng.sample(names, 2)
        add_edge(u, w)
    if rng.random() < 0.15:
        v = rng.choice(names)
        add_edge(v, v)

    tail_counter = itertools.count(1)
    for v in names:
        for _ in range(rng.randint(0, 2)):
            f = new_flag(v)
            involution[f] = f
            labels[f] = f"x{next(tail_counter)}"

    marking = {
        v: CurveClass(tuple(rng.randint(0, max_coord) for _ in range(monoid.rank)))
        for v in names
    }

    def n_flags(v: str) -> int:
        return sum(1 for w in flags.values() if w == v)

    for v in names:
        while marking[v].is_zero() and 2 * genus[v] - 2 + n_flags(v) <= 0:
            if rng.random() < 0.5:
                f = new_flag(v)
                involution[f] = f
                labels[f] = f"x{next(tail_counter)}"
            else:
                coords = list(marking[v].coords)
                coords[rng.randrange(monoid.rank)] += 1
                marking[v] = CurveClass(tuple(coords))

    graph = ModularGraph(tuple(names), genus, flags, involution, labels)
    return MarkedGraph(graph, monoid, marking)


def random_monoid_map(rng: random.Random, source: DegreeMonoid, target: DegreeMonoid) -> MonoidMap:
    rows = tuple(
        tuple(rng.choice([0, 0, 1, 1, 2]) for _ in range(source.rank))
        for _ in range(target.rank)
    )
    return MonoidMap(source, target, rows)


# ---------------------------------------------------------------------------
# individual checks


def _timed(name: str, fn) -> CheckResult:
    start = time.perf_counter_ns()
    try:
        passed, detail = fn()
    except Exception as exc:  # surfaced in the report, not thrown
        passed, detail = False, f"exception: {exc!r}"
    millis = (time.perf_counter_ns() - start) // 1_000_000
    return CheckResult(name=name, passed=passed, detail=detail, millis=millis)


def check_monoid_laws(config: SuiteConfig) -> CheckResult:
    def run():
        rng = random.Random(config.seed)
        trials = 200
        for _ in range(trials):
            m1 = random_monoid_map(rng, RANK2, RANK2)
            m2 = random_monoid_map(rng, RANK2, RANK1)
            a = CurveClass((rng.randint(0, 4), rng.randint(0, 4)))
            b = CurveClass((rng.randint(0, 4), rng.randint(0, 4)))
            if pushforward(m1, a + b) != pushforward(m1, a) + pushforward(m1, b):
                return False, f"additivity failed for {a} + {b}"
            lhs = pushforward(m2, pushforward(m1, a))
            if lhs != pushforward(compose(m2, m1), a):
                return False, f"composition failed for {a}"
        for coords in itertools.product(range(5), repeat=2):
            beta = CurveClass(coords)
            if len(decompositions(beta)) != decomposition_count(beta):
                return False, f"split count failed at {coords}"
        return True, f"{trials} random maps plus exhaustive split counts"

    return _timed("curve-monoid laws", run)


def check_functor_laws(config: SuiteConfig) -> CheckResult:
    def run():
        rng = random.Random(config.seed + 1)
        p1 = projection_map(RANK2, (0,), RANK1)
        checked = skipped = 0
        for _ in range(config.graph_trials):
            g = random_stable_marked_graph(rng)
            m1 = random_monoid_map(rng, RANK2, RANK2)
            m2 = rng.choice([p1, random_monoid_map(rng, RANK2, RANK1)])
            try:
                once = pushforward_stabilize(pushforward_stabilize(g, m1)[0], m2)[0]
                combined = pushforward_stabilize(g, compose(m2, m1))[0]
            except EmptyStabilizationError:
                skipped += 1
                continue
            if canonical_key(once) != canonical_key(combined):
                return False, f"functoriality failed on seed graph {canonical_key(g)}"
            ident = pushforward_stabilize(g, identity_map(RANK2))[0]
            if canonical_key(ident) != canonical_key(g):
                return False, "identity map changed a stable graph"
            checked += 1
        if checked < config.graph_trials // 2:
            return False, f"too many degenerate samples ({skipped} skipped)"
        return True, f"{checked} random graphs ({skipped} collapsed to nothing and were skipped)"

    return _timed("stabilization functoriality and identity", run)


def check_confluence(config: SuiteConfig) -> CheckResult:
    def run():
        rng = random.Random(config.seed + 2)
        p1 = projection_map(RANK2, (0,), RANK1)
        checked = 0
        for _ in range(config.graph_trials):
            g = random_stable_marked_graph(rng)
            try:
                base = pushforward_stabilize(g, p1)[0]
            except EmptyStabilizationError:
                continue
            for _ in range(3):
                shuffled = pushforward_stabilize(
                    g, p1, pick=lambda vs, r=rng: r.choice(vs)
                )[0]
                if canonical_key(shuffled) != canonical_key(base):
                    return False, "contraction order changed the stabilization"
            checked += 1
        return True, f"{checked} graphs x 3 shuffled orders"

    return _timed("stabilization confluence", run)


def check_splitting_adjointness(config: SuiteConfig) -> CheckResult:
    def run():
        rng = random.Random(config.seed + 3)
        checked = 0
        for _ in range(config.graph_trials):
            g = random_stable_marked_graph(rng)
            nonloop = [e for e in g.graph.edges() if not g.graph.is_loop(e)]
            if not nonloop:
                continue
            e = rng.choice(nonloop)
            contracted = contract_edge(g, e)
            pullbacks = splitting_pullback(g.graph, e, contracted)
            for pb in pullbacks:
                if contract_edge(pb, e) != contracted:
                    return False, "pullback does not contract back"
            v1, v2 = sorted(
                (g.graph.vertex_of[e[0]], g.graph.vertex_of[e[1]])
            )
            expected = 0
            for b1, b2 in decompositions(contracted.marking[v1]):
                marking = dict(contracted.marking)
                marking[v1], marking[v2] = b1, b2
                if validate(MarkedGraph(g.graph, g.monoid, marking)).stable:
                    expected += 1
            if len(pullbacks) != expected:
                return False, "pullback count does not match the stability filter"
            if not any(pb.marking == g.marking for pb in pullbacks):
                return False, "original marking missing from its own splitting family"
            checked += 1
        return True, f"{checked} random single-edge contractions"

    return _timed("splitting/contraction adjointness", run)


def check_psi_compatibility(config: SuiteConfig) -> CheckResult:
    """Project-then-split agrees with split-then-project on shape-preserving
    splits, as sets of canonical forms."""

    def run():
        rng = random.Random(config.seed + 4)
        p1 = projection_map(RANK2, (0,), RANK1)
        checked = 0
        for _ in range(config.graph_trials // 4):
            g = random_stable_marked_graph(rng, max_vertices=3)
            # guarantee no vertex ever destabilizes: pad flags up to 3
            pad = {}
            label_base = 100 + checked * 10
            for i, v in enumerate(g.graph.vertices):
                need = 3 - g.graph.n_flags(v)
                for j in range(need):
                    pad[f"y{label_base + 3 * i + j}"] = v
            if pad:
                g = add_tails(g, pad)
            nonloop = [e for e in g.graph.edges() if not g.graph.is_loop(e)]
            if not nonloop:
                continue
            e = rng.choice(nonloop)
            contracted = contract_edge(g, e)
            if not validate(contracted).stable:
                continue
            split_then_project = {
                canonical_key(pushforward_stabilize(pb, p1)[0])
                for pb in splitting_pullback(g.graph, e, contracted)
            }
            projected = pushforward_stabilize(contracted, p1)[0]
            if projected.graph != contracted.graph:
                continue  # the contracted shape itself must survive for the comparison
            project_then_split = {
                canonical_key(pb)
                for pb in splitting_pullback(g.graph, e, projected)
            }
            if not project_then_split <= split_then_project:
                return False, "projected splits are not among split projections"
            extra = split_then_project - project_then_split
            for key in extra:
                # extras must come from collapses, hence have fewer vertices
                if len(key[1]) >= len(g.graph.vertices):
                    return False, "unexplained extra split survived projection"
            checked += 1
        return True, f"{checked} compatibility squares"

    return _timed("projection/splitting compatibility", run)


def check_mbar_oracle(config: SuiteConfig) -> CheckResult:
    def run():
        count = 0
        for n in (4, 5):
            deg = n - 3
            divisors = all_splits(n)
            monos = []
            for ndiv in range(deg + 1):
                for divs in itertools.combinations_with_replacement(divisors, ndiv):
                    for psis in itertools.combinations_with_replacement(
                        range(1, n + 1), deg - ndiv
                    ):
                        exps: dict[int, int] = {}
                        for p in psis:
                            exps[p] = exps.get(p, 0) + 1
                        monos.append(CycleMonomial(n, divs, tuple(sorted(exps.items()))))
            for m in monos:
                if evaluate_monomial(m).value != oracle_evaluate(m):
                    return False, f"disagreement at n={n}, {m}"
            count += len(monos)
        return True, f"{count} monomials against the independent expansion"

    return _timed("intersection-calculus oracle equivalence", run)


def check_mbar_properties(config: SuiteConfig) -> CheckResult:
    def run():
        rng = random.Random(config.seed + 5)
        censuses = [(4, 0, 3), (5, 1, 10), (5, 0, 15)]
        for n, dim, expected in censuses:
            got = len(enumerate_strata(n, dim))
            if got != expected:
                return False, f"census ({n},{dim}) gave {got}, wanted {expected}"
        # randomized pivoting and relabeling on n=6 monomials
        splits6 = all_splits(6)
        for _ in range(60):
            divs = tuple(rng.choice(splits6) for _ in range(rng.randint(1, 3)))
            npsi = 3 - len(divs)
            psi = {}
            for _ in range(npsi):
                p = rng.randint(1, 6)
                psi[p] = psi.get(p, 0) + 1
            m = CycleMonomial(6, divs, tuple(sorted(psi.items())))
            base = evaluate_monomial(m).value
            pivoted = evaluate_monomial(
                m, pivot=lambda opts, r=rng: r.randrange(len(opts))
            ).value
            if base != pivoted:
                return False, f"pivot choice changed the value of {m}"
            perm = list(range(1, 7))
            rng.shuffle(perm)
            relabel = {i + 1: perm[i] for i in range(6)}
            m2 = CycleMonomial(
                6,
                tuple(frozenset(relabel[i] for i in s) for s in m.divisor_factors),
                tuple(sorted((relabel[p], e) for p, e in m.psi_exponents)),
            )
            if evaluate_monomial(m2).value != base:
                return False, f"relabeling changed the value of {m}"
        # degree gate and pairing symmetry
        gate = evaluate_monomial(CycleMonomial(5, (frozenset({2, 3}),), ()))
        if not gate.degree_mismatch or gate.value != 0:
            return False, "degree gate did not flag an off-degree monomial"
        pm_sym = pairing_matrix(7, 2)
        for i in range(len(pm_sym.rows)):
            for j in range(i):
                if pm_sym.entries[i][j] != pm_sym.entries[j][i]:
                    return False, "square pairing matrix is not symmetric"
        return True, "censuses, pivoting, relabeling, degree gate, symmetry"

    return _timed("intersection-calculus properties", run)


def check_gw_properties(config: SuiteConfig) -> CheckResult:
    def run():
        rng = random.Random(config.seed + 6)
        anchors = [
            (P2, (1,), Fraction(1)),
            (P2, (2,), Fraction(1)),
            (P2, (3,), Fraction(12)),
            (P1XP1, (1, 1), Fraction(1)),
        ]
        for target, coords, expected in anchors:
            got = wdvv_number(target, CurveClass(coords))
            if got != expected:
                return False, f"{target.name} {coords} gave {got}, wanted {expected}"
        for _ in range(20):
            a, b = rng.randint(1, 3), rng.randint(1, 3)
            lhs = wdvv_number(P1XP1, CurveClass((a, b)))
            rhs = wdvv_number(P1XP1, CurveClass((b, a)))
            if lhs != rhs:
                return False, f"factor symmetry failed at ({a},{b})"
        # divisor rule: edgeless degree-1 pairing is 1 for every n up to 8
        for n in range(3, 9):
            s = enumerate_strata(n, n - 3, max_n=8)[0]
            if stratum_pairing(P1, 1, n, s).value != 1:
                return False, f"degree-1 edgeless pairing wrong at n={n}"
        # dimension gate
        s0 = enumerate_strata(5, 0)[0]
        gated = stratum_pairing(P1, 1, 5, s0)
        if not gated.degree_mismatch or gated.value != 0:
            return False, "dimension gate did not flag a mismatched pairing"
        for _ in range(config.kunneth_trials):
            k = rng.randint(1, 6)
            gammas = [rng.randint(0, 3) for _ in range(k)]
            epss = [rng.randint(0, 3) for _ in range(k)]
            direct = (-1) ** sum(
                gammas[i] * epss[j] for i in range(k) for j in range(i)
            )
            if kunneth_sign(gammas, epss) != direct:
                return False, "sign formula disagrees with direct summation"
        return True, "anchors, symmetry, divisor rule, gates, signs"

    return _timed("curve-count engine properties", run)


def check_product_formula(config: SuiteConfig) -> CheckResult:
    def run():
        rng = random.Random(config.seed + 7)
        details = []
        for d1, d2 in DEFAULT_BIDEGREES:
            n = 2 * (d1 + d2) - 1
            if n > config.cap_n:
                details.append(f"({d1},{d2}) skipped by cap")
                continue
            report = verify_product(d1, d2, cap_n=config.cap_n)
            if not report.equal:
                return False, f"MISMATCH at ({d1},{d2}): {report.lhs} vs {report.rhs}"
            # solution independence under permuted elimination orders
            k1 = class_dimension(P1, CurveClass((d1,)), n)
            matrix = pairing_matrix(n, k1, max_n=config.cap_n)
            v1 = gw_pairing_vector(P1, d1, n, max_n=config.cap_n)
            v2 = gw_pairing_vector(P1, d2, n, max_n=config.cap_n)
            for _ in range(config.elimination_orders):
                unknowns = list(range(len(matrix.rows)))
                equations = list(range(len(matrix.cols)))
                rng.shuffle(unknowns)
                rng.shuffle(equations)
                permuted = reconstruct_and_cup(
                    v1, v2, matrix, unknown_order=unknowns, equation_order=equations
                )
                if permuted != report.rhs:
                    return False, f"solution dependence at ({d1},{d2})"
            details.append(f"({d1},{d2})={report.lhs}")
        return True, "; ".join(details)

    return _timed("product formula and solution independence", run)


def check_report_determinism(config: SuiteConfig) -> CheckResult:
    def run():
        a = verify_product(2, 1, cap_n=config.cap_n)
        b = verify_product(2, 1, cap_n=config.cap_n)
        from .verify import report_to_json_text

        ta = report_to_json_text(a, include_timings=False)
        tb = report_to_json_text(b, include_timings=False)
        if ta != tb:
            return False, "reports differ outside timings"
        return True, "byte-identical reports (timings excluded)"

    return _timed("report determinism", run)


ALL_CHECKS = (
    check_monoid_laws,
    check_functor_laws,
    check_confluence,
    check_splitting_adjointness,
    check_psi_compatibility,
    check_mbar_oracle,
    check_mbar_properties,
    check_gw_properties,
    check_product_formula,
    check_report_determinism,
)


def run_suite(config: SuiteConfig | None = None) -> SuiteReport:
    """Run every property suite with one seed; failures are reported, not
    raised."""
    config = config or SuiteConfig()
    report = SuiteReport()
    for check in ALL_CHECKS:
        report.results.append(check(config))
    return report
