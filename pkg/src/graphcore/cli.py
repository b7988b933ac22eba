"""Command line front end: ingestion, analysis, report and DOT emission.

Exit codes: 0 success (negative verdicts included), 1 parse error,
2 bad arguments, 3 internal oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import core_algebra as ca
from . import dynamics as dyn
from . import ktheory as kt
from . import rep as rp
from .errors import OracleMismatchError, ParseError
from .graph import (adjacency_matrix, all_hereditary_saturated, condition_K,
                    condition_L, graph_to_dot, interaction_powers,
                    is_cstar_dynamical, parse_graph, powers_by_path_condition,
                    powers_by_stochastic, transfer_is_multiplicative,
                    transition_matrix, verdicts)

SCHEMA_VERSION = 1


def _load_graph(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc))
    return parse_graph(text)


def _graph_summary(g):
    return {
        "vertices": list(g.vertices),
        "edges": [{"name": g.edge_names[i],
                   "src": g.vertices[s], "dst": g.vertices[r]}
                  for i, (s, r) in enumerate(g.edges)],
        "n_vertices": g.n_vertices,
        "n_edges": g.n_edges,
        "sinks": sorted(g.vertices[v] for v in g.sinks),
        "sources": sorted(g.vertices[v] for v in g.sources),
    }


def powers_fragment(g, max_power, depth=None):
    a = powers_by_stochastic(g, max_power)
    b = powers_by_path_condition(g, max_power)
    fragment = {
        "max_power": max_power,
        "by_stochastic_matrix": sorted(a),
        "by_path_condition": sorted(b),
        "oracles_agree": a == b,
    }
    if depth is not None:
        window = [n for n in range(1, max_power + 1)]
        c = {n for n in window
             if rp.power_partial_isometry_check(g, n, max(depth, n + 1))}
        fragment["by_operator_window"] = sorted(c)
        fragment["oracles_agree"] = fragment["oracles_agree"] and a == c
    fragment["powers"] = sorted(a) if fragment["oracles_agree"] else None
    return fragment


def ktheory_fragment(g, level=None):
    k0, k1 = kt.k_groups(g)
    if level is None:
        level = max(2, g.n_vertices + 2)
    oracle = kt.truncated_sequence_oracle(g, level)
    return {
        "K0": k0.to_json(),
        "K1": k1.to_json(),
        "delta_matrix": [[x for x in row] for row in kt.delta_matrix(g).entries],
        "sequence_oracle": {
            "level": oracle.level,
            "K0": oracle.k0.to_json(),
            "K1": oracle.k1.to_json(),
            "stabilized": oracle.stabilized,
        },
        "oracle_agrees": (oracle.k0, oracle.k1) == (k0, k1),
        "direction_note": kt.DIRECTION_NOTE,
    }


def verification_fragment(g, level, depth):
    axiom_reports = []
    for n in range(1, level + 1):
        rep = ca.interaction_axiom_report(g, n)
        axiom_reports.append({
            "level": n,
            "basis_size": rep["basis_size"],
            "passed": rep["passed"],
        })
    return {
        "axiom_suite": axiom_reports,
        "operator_oracle": rp.check_forward_transfer(g, min(level, depth - 1), depth),
        "ck_window": rp.ck_window_check(g, depth),
    }


def build_report(g, max_power=6, level=2, depth=4):
    lattice = all_hereditary_saturated(g)
    powers = powers_fragment(g, max_power, depth)
    report = {
        "schema_version": SCHEMA_VERSION,
        "graph": _graph_summary(g),
        "matrices": {
            "adjacency": adjacency_matrix(g).to_json(),
            "transition": transition_matrix(g).to_json(),
        },
        "structure": {
            "condition_L": condition_L(g),
            "condition_K": condition_K(g),
            "hereditary_saturated_sets": [
                sorted(g.vertices[v] for v in s) for s in lattice],
            "verdicts": verdicts(g),
            "cstar_dynamical": is_cstar_dynamical(g),
            "transfer_multiplicative": transfer_is_multiplicative(g),
            "interaction_powers": powers,
        },
        "dynamics": dyn.dichotomy_report(g),
        "ktheory": ktheory_fragment(g),
        "verification": verification_fragment(g, level, depth),
    }
    return report


def report_oracle_failures(report):
    failures = []
    if not report["structure"]["interaction_powers"]["oracles_agree"]:
        failures.append("interaction power oracles disagree")
    if not report["ktheory"]["oracle_agrees"]:
        failures.append("K-theory oracle disagrees")
    if not report["verification"]["operator_oracle"]:
        failures.append("operator oracle rejects the symbolic maps")
    if not report["verification"]["ck_window"]:
        failures.append("Cuntz-Krieger window check failed")
    return failures


def _emit(obj, as_text=False):
    if as_text:
        _emit_text(obj, indent=0)
    else:
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _emit_text(obj, indent):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                sys.stdout.write("%s%s:\n" % (pad, k))
                _emit_text(v, indent + 1)
            else:
                sys.stdout.write("%s%s: %s\n" % (pad, k, v))
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                _emit_text(v, indent + 1)
            else:
                sys.stdout.write("%s- %s\n" % (pad, v))
    else:
        sys.stdout.write("%s%s\n" % (pad, obj))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="graphcore",
        description="Exact analysis of the interaction pair on the core of a "
                    "finite-graph algebra")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("file", help="graph file (text or JSON format)")

    p_analyze = sub.add_parser("analyze", help="full report")
    add_common(p_analyze)
    p_analyze.add_argument("--json", action="store_true", default=True)
    p_analyze.add_argument("--text", action="store_true")
    p_analyze.add_argument("--max-power", type=int, default=6)
    p_analyze.add_argument("--level", type=int, default=2)
    p_analyze.add_argument("--depth", type=int, default=4)
    p_analyze.add_argument("--graph-dot", metavar="PATH",
                           help="also write the graph in DOT format")

    p_brat = sub.add_parser("bratteli", help="core inclusion diagram")
    add_common(p_brat)
    p_brat.add_argument("--levels", type=int, default=3)
    p_brat.add_argument("--dot", metavar="PATH", help="write DOT to this path")

    p_powers = sub.add_parser("powers", help="interaction powers, all oracles")
    add_common(p_powers)
    p_powers.add_argument("--max-power", type=int, default=6)
    p_powers.add_argument("--depth", type=int, default=4)

    p_kt = sub.add_parser("ktheory", help="K-groups and the sequence oracle")
    add_common(p_kt)
    p_kt.add_argument("--level", type=int, default=None)

    p_dyn = sub.add_parser("dynamics", help="loops, exits, periodic orbits")
    add_common(p_dyn)

    p_verify = sub.add_parser("verify", help="axiom suite and operator oracles")
    add_common(p_verify)
    p_verify.add_argument("--level", type=int, default=2)
    p_verify.add_argument("--depth", type=int, default=4)

    args = parser.parse_args(argv)

    try:
        g = _load_graph(args.file)
    except ParseError as exc:
        sys.stderr.write("parse error: %s\n" % exc)
        return 1

    try:
        if args.command == "analyze":
            if args.level + 1 > args.depth:
                sys.stderr.write("need level + 1 <= depth\n")
                return 2
            report = build_report(g, args.max_power, args.level, args.depth)
            if args.graph_dot:
                with open(args.graph_dot, "w", encoding="utf-8") as fh:
                    fh.write(graph_to_dot(g))
            _emit(report, as_text=args.text)
            failures = report_oracle_failures(report)
            if failures:
                sys.stderr.write("oracle mismatch: %s\n" % "; ".join(failures))
                return 3
            return 0

        if args.command == "bratteli":
            if args.levels < 1:
                sys.stderr.write("need at least one level\n")
                return 2
            diagram = ca.bratteli(g, args.levels)
            if args.dot:
                with open(args.dot, "w", encoding="utf-8") as fh:
                    fh.write(diagram.to_dot())
                return 0
            _emit(diagram.to_json())
            return 0

        if args.command == "powers":
            fragment = powers_fragment(g, args.max_power, args.depth)
            _emit(fragment)
            return 0 if fragment["oracles_agree"] else 3

        if args.command == "ktheory":
            fragment = ktheory_fragment(g, args.level)
            _emit(fragment)
            return 0 if fragment["oracle_agrees"] else 3

        if args.command == "dynamics":
            _emit(dyn.dichotomy_report(g))
            return 0

        if args.command == "verify":
            if args.level + 1 > args.depth:
                sys.stderr.write("need level + 1 <= depth\n")
                return 2
            fragment = verification_fragment(g, args.level, args.depth)
            _emit(fragment)
            ok = (fragment["operator_oracle"] and fragment["ck_window"]
                  and all(r["passed"] for r in fragment["axiom_suite"]))
            return 0 if ok else 3
    except OracleMismatchError as exc:
        sys.stderr.write("oracle mismatch: %s\n" % exc)
        return 3

    return 2


def entry():
    raise SystemExit(main())
