"""Command line front ends.

Four scripts share this module: `gwprod` (verification and suites),
`mbar` (strata and intersection numbers), `gw` (curve counts and pairing
vectors) and `graphs` (stabilization, splitting and projection of marked
graphs).  All numeric output is exact: fractions are printed as `p/q`
strings and never as floats.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .curves import CurveClass, MonoidMap, DegreeMonoid
from .functors import absolute_stabilization, psi_image, pushforward_stabilize, splitting_pullback
from .graphs import canonicalize, marked_graph_from_json, marked_graph_to_json
from .gw import class_dimension, gw_pairing_vector, reconstruct_coefficients
from .mbar import (
    DEFAULT_N_CAP,
    CycleMonomial,
    StratumTree,
    enumerate_strata,
    evaluate_monomial,
    normalize_split,
    pairing_matrix,
)
from .curves import projection_map
from .suite import SuiteConfig, run_suite
from .targets import get_target
from .verify import (
    BidegreeError,
    DEFAULT_BIDEGREES,
    EXTRA_BIDEGREES,
    report_to_json_text,
    verify_product,
)
from .wdvv import wdvv_number

USAGE_ERROR = 2
MISMATCH_ERROR = 1


def _print_json(data, path: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _frac(x: Fraction) -> str:
    return str(x)


# ---------------------------------------------------------------------------
# gwprod


def main_gwprod(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gwprod",
        description="verify that factor curve counts cup to product curve counts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="compare the two pipelines for bidegrees")
    p_verify.add_argument("--bidegree", action="append", default=[],
                          help="d1,d2 (repeatable; default set if omitted)")
    p_verify.add_argument("--all-default", action="store_true",
                          help="run the default bidegree set")
    p_verify.add_argument("--extra", action="store_true",
                          help="include the (3,1)/(1,3) bidegrees")
    p_verify.add_argument("--cap-n", type=int, default=DEFAULT_N_CAP)
    p_verify.add_argument("--json", dest="json_path", default=None,
                          help="write the report(s) to this file")
    p_verify.add_argument("--no-timings", action="store_true",
                          help="omit wall-clock timings from the output")

    p_suite = sub.add_parser("suite", help="run every property suite")
    p_suite.add_argument("--seed", type=int, default=11)
    p_suite.add_argument("--cap-n", type=int, default=7)
    p_suite.add_argument("--trials", type=int, default=1000)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0

    if args.command == "suite":
        report = run_suite(
            SuiteConfig(seed=args.seed, cap_n=args.cap_n, graph_trials=args.trials)
        )
        print(report.to_text())
        return 0 if report.passed else MISMATCH_ERROR

    bidegrees: list[tuple[int, int]] = []
    for text in args.bidegree:
        try:
            d1, d2 = (int(x) for x in text.split(","))
        except ValueError:
            print(f"bad bidegree {text!r}; expected d1,d2", file=sys.stderr)
            return USAGE_ERROR
        bidegrees.append((d1, d2))
    if not bidegrees or args.all_default:
        bidegrees.extend(b for b in DEFAULT_BIDEGREES if b not in bidegrees)
    if args.extra:
        bidegrees.extend(b for b in EXTRA_BIDEGREES if b not in bidegrees)

    reports = []
    for d1, d2 in bidegrees:
        try:
            report = verify_product(d1, d2, cap_n=args.cap_n)
        except BidegreeError as exc:
            print(f"({d1},{d2}): {exc}", file=sys.stderr)
            return USAGE_ERROR
        reports.append(report)
        print(report.to_text())
    if args.json_path:
        payload = [r.to_json(include_timings=not args.no_timings) for r in reports]
        _print_json(payload if len(payload) > 1 else payload[0], args.json_path)
    return 0 if all(r.equal for r in reports) else MISMATCH_ERROR


# ---------------------------------------------------------------------------
# mbar


def _parse_monomial(n: int, text: str) -> CycleMonomial:
    """Accept [["1,2"],["psi",3],[[1,2]]] style factor lists."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("monomial must be a JSON list of factors")
    divisors = []
    psi: dict[int, int] = {}
    for factor in data:
        if isinstance(factor, dict) and "psi" in factor:
            p = int(factor["psi"])
            psi[p] = psi.get(p, 0) + int(factor.get("power", 1))
            continue
        if not isinstance(factor, list) or not factor:
            raise ValueError(f"bad factor {factor!r}")
        if factor[0] == "psi":
            p = int(factor[1])
            psi[p] = psi.get(p, 0) + 1
            continue
        body = factor[0]
        if isinstance(body, str):
            side = frozenset(int(x) for x in body.split(","))
        else:
            side = frozenset(int(x) for x in body)
        divisors.append(normalize_split(n, side))
    return CycleMonomial(n, tuple(divisors), tuple(sorted(psi.items())))


def main_mbar(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mbar", description="boundary strata and exact intersection numbers"
    )
    parser.add_argument("--cap-n", type=int, default=DEFAULT_N_CAP,
                        help="refuse enumerations beyond this many marked points")
    sub = parser.add_subparsers(dest="command", required=True)

    p_strata = sub.add_parser("strata", help="enumerate boundary strata")
    p_strata.add_argument("-n", type=int, required=True)
    p_strata.add_argument("--dim", type=int, required=True)
    p_strata.add_argument("--out", default=None)

    p_eval = sub.add_parser("eval", help="evaluate a divisor/psi monomial")
    p_eval.add_argument("-n", type=int, required=True)
    p_eval.add_argument("--monomial", required=True,
                        help='JSON factors, e.g. \'[["1,2"],["1,2"]]\' or \'[["psi",1]]\'')

    p_pair = sub.add_parser("pairing", help="pairing matrix of complementary strata")
    p_pair.add_argument("-n", type=int, required=True)
    p_pair.add_argument("-k", type=int, required=True)
    p_pair.add_argument("--out", default=None)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0

    try:
        if args.command == "strata":
            strata = enumerate_strata(args.n, args.dim, max_n=args.cap_n)
            payload = {
                "n": args.n,
                "dim": args.dim,
                "count": len(strata),
                "strata": [s.key() for s in strata],
            }
            _print_json(payload, args.out)
            return 0
        if args.command == "eval":
            monomial = _parse_monomial(args.n, args.monomial)
            result = evaluate_monomial(monomial)
            payload = {
                "n": args.n,
                "value": _frac(result.value),
                "degree_mismatch": result.degree_mismatch,
            }
            _print_json(payload, None)
            return 0
        if args.command == "pairing":
            matrix = pairing_matrix(args.n, args.k, max_n=args.cap_n)
            payload = {
                "n": matrix.n,
                "k": matrix.k,
                "rows": [s.key() for s in matrix.rows],
                "cols": [s.key() for s in matrix.cols],
                "entries": [[_frac(x) for x in row] for row in matrix.entries],
            }
            _print_json(payload, args.out)
            return 0
    except (ValueError, KeyError) as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


# ---------------------------------------------------------------------------
# gw


def main_gw(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gw", description="genus-zero curve counts and strata pairing vectors"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_number = sub.add_parser("number", help="curve count through general points")
    p_number.add_argument("--target", required=True, help="p2 or p1xp1")
    p_number.add_argument("--degree", required=True, help="d or d1,d2")

    p_pairings = sub.add_parser("pairings", help="pairings against complementary strata")
    p_pairings.add_argument("--target", default="p1")
    p_pairings.add_argument("--degree", type=int, required=True)
    p_pairings.add_argument("-n", type=int, required=True)
    p_pairings.add_argument("--cap-n", type=int, default=DEFAULT_N_CAP)
    p_pairings.add_argument("--out", default=None)

    p_class = sub.add_parser("class", help="strata-basis coefficients of the class")
    p_class.add_argument("--target", default="p1")
    p_class.add_argument("--degree", type=int, required=True)
    p_class.add_argument("-n", type=int, required=True)
    p_class.add_argument("--cap-n", type=int, default=DEFAULT_N_CAP)
    p_class.add_argument("--out", default=None)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0

    try:
        if args.command == "number":
            target = get_target(args.target)
            coords = tuple(int(x) for x in args.degree.split(","))
            value = wdvv_number(target, CurveClass(coords))
            _print_json({"target": target.name, "degree": list(coords), "count": _frac(value)}, None)
            return 0
        if args.command == "pairings":
            target = get_target(args.target)
            vec = gw_pairing_vector(target, args.degree, args.n, max_n=args.cap_n)
            payload = {
                "target": target.name,
                "degree": vec.degree.to_json(),
                "n": vec.n,
                "class_dim": vec.class_dim,
                "values": {s.key(): _frac(v) for s, v in vec.values.items()},
            }
            _print_json(payload, args.out)
            return 0
        if args.command == "class":
            target = get_target(args.target)
            vec = gw_pairing_vector(target, args.degree, args.n, max_n=args.cap_n)
            matrix = pairing_matrix(args.n, vec.class_dim, max_n=args.cap_n)
            coeffs = reconstruct_coefficients(vec, matrix)
            payload = {
                "target": target.name,
                "degree": vec.degree.to_json(),
                "n": vec.n,
                "class_dim": vec.class_dim,
                "coefficients": {s.key(): _frac(v) for s, v in coeffs.items() if v != 0},
            }
            _print_json(payload, args.out)
            return 0
    except (ValueError, KeyError) as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


# ---------------------------------------------------------------------------
# graphs


def _load_graph(path: str):
    with open(path, encoding="utf-8") as fh:
        return marked_graph_from_json(json.load(fh))


def _monoid_map_from_json(data: dict) -> MonoidMap:
    return MonoidMap(
        source=DegreeMonoid.from_json(data["source"]),
        target=DegreeMonoid.from_json(data["target"]),
        matrix=tuple(tuple(int(x) for x in row) for row in data["matrix"]),
    )


def main_graphs(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="graphs", description="stabilize, split and project marked graphs"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stab = sub.add_parser("stabilize", help="push the marking forward and stabilize")
    p_stab.add_argument("graph", help="path to a graph JSON file")
    p_stab.add_argument("--map", dest="map_json", default=None,
                        help="monoid map JSON (omit for absolute stabilization)")

    p_split = sub.add_parser("split", help="pull a marking back along an edge split")
    p_split.add_argument("graph", help="path to the split (finer) graph JSON")
    p_split.add_argument("--edge", required=True, help="edge as flag1,flag2")
    p_split.add_argument("--marked", required=True,
                         help="path to the marked contracted graph JSON")

    p_psi = sub.add_parser("psi", help="project a product-marked graph both ways")
    p_psi.add_argument("graph", help="path to a graph JSON over a rank-2 monoid")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else 0

    try:
        if args.command == "stabilize":
            g = _load_graph(args.graph)
            if args.map_json:
                with open(args.map_json, encoding="utf-8") as fh:
                    mmap = _monoid_map_from_json(json.load(fh))
                stabilized, morphism = pushforward_stabilize(g, mmap)
            else:
                _, morphism = absolute_stabilization(g)
                stabilized = morphism.source
            canon, aut = canonicalize(stabilized)
            payload = {
                "stabilized": marked_graph_to_json(canon),
                "automorphisms": aut,
                "long_edges": {
                    "|".join(e): ["|".join(x) for x in chain]
                    for e, chain in morphism.edge_chains.items()
                },
                "long_tails": {
                    morphism.source.graph.tail_labels[t]: ["|".join(x) for x in chain]
                    for t, chain in morphism.tail_chains.items()
                },
            }
            _print_json(payload, None)
            return 0
        if args.command == "split":
            sigma = _load_graph(args.graph)
            marked = _load_graph(args.marked)
            f1, f2 = args.edge.split(",")
            outs = splitting_pullback(sigma.graph, (f1, f2), marked)
            payload = {
                "count": len(outs),
                "pullbacks": [marked_graph_to_json(canonicalize(o)[0]) for o in outs],
            }
            _print_json(payload, None)
            return 0
        if args.command == "psi":
            g = _load_graph(args.graph)
            if g.monoid.rank != 2:
                print("psi expects a graph marked over a rank-2 monoid", file=sys.stderr)
                return USAGE_ERROR
            tau, morphism = absolute_stabilization(g)
            half1 = DegreeMonoid(1, (g.monoid.generator_names[0],), (g.monoid.c1_pairings[0],))
            half2 = DegreeMonoid(1, (g.monoid.generator_names[1],), (g.monoid.c1_pairings[1],))
            maps = (
                projection_map(g.monoid, (0,), half1),
                projection_map(g.monoid, (1,), half2),
            )
            left, right = psi_image(tau, [(g, morphism)], maps)
            payload = {
                "base": marked_graph_to_json(canonicalize(morphism.source)[0]),
                "first_factor": [marked_graph_to_json(canonicalize(s)[0]) for s, _ in left],
                "second_factor": [marked_graph_to_json(canonicalize(s)[0]) for s, _ in right],
            }
            _print_json(payload, None)
            return 0
    except (ValueError, KeyError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR
    return USAGE_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main_gwprod())
