"""``graphon-commons`` command line front end.

Exit codes: 0 pass or holds, 1 claim fails or no witness, 2 input error,
3 budget exceeded, 4 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys

import numpy as np

from . import commonality, correlation, graphs, reduction, repro
from .bounds import BoundFunction
from .graphon import (BudgetExceeded, GraphonError, StepGraphon, complement, constant, density,
                      format_number, mono_density)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

_NAMED = {"K2": graphs.edge, "K3": graphs.triangle, "paw": graphs.paw, "P": graphs.paw,
          "W5": graphs.wheel5}


class InputError(ValueError):
    pass


def _load_json(arg: str):
    if os.path.exists(arg):
        with open(arg) as fh:
            return json.load(fh)
    try:
        return json.loads(arg)
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg!r} is neither a file nor JSON") from exc


def _named_graph(token: str) -> graphs.Graph:
    m = re.fullmatch(r"(?:(\d+)\*)?([A-Za-z]+)(\d*)", token.strip())
    if not m:
        raise InputError(f"cannot parse graph term {token!r}")
    times, name, size = int(m.group(1) or 1), m.group(2), m.group(3)
    if name + size in _NAMED:
        g = _NAMED[name + size]()
    elif name == "K" and size:
        g = graphs.complete(int(size))
    elif name == "C" and size:
        g = graphs.cycle(int(size))
    elif name == "P" and size:
        g = graphs.path(int(size))
    else:
        raise InputError(f"unknown graph name {token!r}")
    return graphs.copies(g, times)


def parse_graph(arg: str) -> graphs.Graph:
    """A JSON file, a JSON literal, or an expression such as ``2*K3+3*K2``."""
    if os.path.exists(arg) or arg.lstrip().startswith("{"):
        return graphs.Graph.from_json(_load_json(arg))
    return graphs.disjoint_union([_named_graph(t) for t in arg.split("+")])


def parse_graphon(arg: str) -> StepGraphon:
    """A JSON file or literal, or ``zy:Z,Y``, ``p:P``, ``turan:K``, ``const:C``."""
    if os.path.exists(arg) or arg.lstrip().startswith("{"):
        return StepGraphon.from_json(_load_json(arg))
    kind, _, rest = arg.partition(":")
    vals = [v.strip() for v in rest.split(",") if v.strip()]
    if kind == "zy" and len(vals) == 2:
        return commonality.three_block_zy(*vals)
    if kind == "p" and len(vals) == 1:
        return commonality.two_block_diag_p(vals[0])
    if kind == "turan" and len(vals) == 1:
        return commonality.turan(int(vals[0]))
    if kind == "const" and len(vals) == 1:
        return constant(vals[0])
    raise InputError(f"cannot parse graphon {arg!r}")


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


# -- subcommands ---------------------------------------------------------------------

def cmd_density(args) -> int:
    h, w = parse_graph(args.graph), parse_graphon(args.graphon)
    a = density(h, w, mode=args.mode, budget=args.budget)
    b = density(h, complement(w), mode=args.mode, budget=args.budget)
    mono = mono_density(h, w, mode=args.mode, budget=args.budget)
    thr = commonality.commonality_threshold(h)
    payload = {"graph": h.to_json(), "t_w": a.to_json(), "t_complement": b.to_json(),
               "mono": mono.to_json(), "threshold": str(thr)}
    _emit(args, payload, [f"t(H,W)     = {format_number(a.value)}",
                          f"t(H,1-W)   = {format_number(b.value)}",
                          f"mono       = {format_number(mono.value)}",
                          f"threshold  = {thr}"])
    return EXIT_OK


def _problem_from_args(args) -> reduction.ReductionProblem:
    if args.k3 is not None:
        k, l = args.k3
        return reduction.k3_problem(k, l, BoundFunction(args.rho), args.c)
    if args.file is None:
        raise InputError("give a problem or certificate file, or --k3 K L")
    data = _load_json(args.file)
    return reduction.ReductionProblem.from_json(data.get("problem", data))


def _write_curves(path: str, p: reduction.ReductionProblem) -> None:
    xs = np.linspace(0.0, 1.0, 1001)
    curves = reduction.margin_curves(p, xs)
    names = sorted(curves)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x"] + names)
        for i, x in enumerate(xs):
            out.writerow([f"{x:.4f}"] + [f"{float(curves[n][i]):.12g}" for n in names])


def cmd_verify(args) -> int:
    data = _load_json(args.file) if args.file and args.k3 is None else None
    if data is not None and "verdict" in data:
        cert = reduction.Certificate.from_json(data)
        ok, msg = reduction.replay_certificate(cert)
        _emit(args, {"replay": ok, "message": msg, "verdict": cert.verdict},
              [f"replay {'ok' if ok else 'MISMATCH'}: {msg}"])
        if not ok:
            return EXIT_FAIL
        return {"holds": EXIT_OK, "fails_at": EXIT_FAIL}.get(cert.verdict, EXIT_INCONCLUSIVE)
    p = _problem_from_args(args)
    cert = reduction.verify_reduction(p, args.strategy, args.resolution)
    if args.csv:
        _write_curves(args.csv, p)
    lines = [f"verdict: {cert.verdict} ({cert.strategy}, {len(cert.records)} records)"]
    if cert.point is not None:
        lines.append("point: " + ", ".join(reduction._point_str(v) for v in cert.point))
    _emit(args, cert.to_json(), lines)
    return {"holds": EXIT_OK, "fails_at": EXIT_FAIL}.get(cert.verdict, EXIT_INCONCLUSIVE)


def cmd_reproduce(args) -> int:
    if args.all or not args.id:
        targets = repro.load_manifest()
    else:
        targets = list({t.id: t for t in map(repro.find_target, args.id)}.values())
    results = [repro.run_target(t) for t in targets]
    lines = []
    for r in results:
        lines.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.target.criterion:>2} {r.target.id}: "
                     + json.dumps(r.computed, sort_keys=True))
    _emit(args, {"results": [r.to_json() for r in results]}, lines)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_search(args) -> int:
    h = parse_graph(args.graph)
    family = commonality.ConstructionFamily("turan", args.k) if args.family == "turan" \
        else commonality.ConstructionFamily(args.family)
    res = commonality.search_witness(h, family, budget=args.budget, seed=args.seed, tol=args.tol)
    lines = [f"verdict: {res.report.verdict}", f"value:   {res.value:.10f}",
             f"params:  {res.params}", f"evaluations: {res.evaluations}"]
    _emit(args, res.to_json(), lines)
    if res.report.is_witness:
        return EXIT_OK
    return EXIT_BUDGET if res.exhausted else EXIT_FAIL


def cmd_classify(args) -> int:
    v = correlation.classify_k3_k2_union(args.k, args.l)
    ok = True
    if args.check and v.certificate_ref:
        ok, _ = correlation.resolve_certificate(v.certificate_ref)
    payload = v.to_json()
    payload["certificate_checked"] = bool(args.check and v.certificate_ref)
    payload["certificate_ok"] = ok
    _emit(args, payload, [f"({args.k} K3) + ({args.l} K2): {v.status} [{v.rule}]",
                          f"certificate: {v.certificate_ref}"
                          + (f" ({'ok' if ok else 'FAILED'})" if args.check and v.certificate_ref else "")])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tree(args) -> int:
    t = graphs.K3Tree.from_json(_load_json(args.file))
    rec = graphs.k3_tree_correlation(t)
    h = rec.subject
    out = {"graph": h.to_json(), "k": rec.power, "l": rec.edge_exponent,
           "correlated": correlation.check_correlated_common(rec).to_json()}
    lines = [f"H: {h.v} vertices, {h.e} edges; record (K3, {rec.power}, {rec.edge_exponent})",
             f"correlated rule: {out['correlated']['status']}"]
    if args.sidorenko_edges is not None:
        try:
            v = correlation.check_union_with_sidorenko(t, args.sidorenko_edges)
            out["with_sidorenko"] = v.to_json()
            lines.append(f"with a Sidorenko graph on {args.sidorenko_edges} edges: {v.status}")
        except correlation.CorrelationError as exc:
            out["with_sidorenko"] = {"status": "not_applicable", "reason": str(exc)}
            lines.append(f"with a Sidorenko graph: not applicable ({exc})")
    if t.e_count(2) == 0:
        v = correlation.triangle_vertex_tree_uncommon(t)
        out["vertex_gluing"] = v.to_json()
        lines.append(f"vertex-gluing rule: {v.status}")
    _emit(args, out, lines)
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=["rational", "float"], default=argparse.SUPPRESS)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="graphon-commons", parents=[common],
                                     description="Densities, certificates and witnesses for common graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", parents=[common], help="densities of a graph on a step graphon")
    d.add_argument("graph")
    d.add_argument("graphon")
    d.add_argument("--budget", type=int, default=10**9)
    d.set_defaults(func=cmd_density)

    v = sub.add_parser("verify", parents=[common], help="verify a reduction problem or replay a certificate")
    v.add_argument("file", nargs="?")
    v.add_argument("--k3", nargs=2, metavar=("K", "L"), help="triangle problem with g = z^3")
    v.add_argument("--rho", default="fisher_k3", choices=["fisher_k3", "bollobas_linear", "zero"])
    v.add_argument("--c", default="2")
    v.add_argument("--strategy", default="grid", choices=sorted(reduction.STRATEGIES))
    v.add_argument("--resolution", type=float, default=reduction.GRID_RESOLUTION)
    v.add_argument("--csv", help="write (x, margin) curves to this file")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reproduce", parents=[common], help="run the reproduction manifest")
    r.add_argument("--all", action="store_true")
    r.add_argument("--id", action="append", help="target id or criterion number (repeatable)")
    r.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("search", parents=[common], help="search a construction family for a witness")
    s.add_argument("graph")
    s.add_argument("--family", default="three_block_zy",
                   choices=["three_block_zy", "two_block_diag_p", "turan"])
    s.add_argument("--k", type=int, help="fix k for the turan family")
    s.add_argument("--budget", type=int, default=commonality.DEFAULT_BUDGET)
    s.set_defaults(func=cmd_search)

    c = sub.add_parser("classify", parents=[common], help="classify (k K3) + (l K2)")
    c.add_argument("k", type=int)
    c.add_argument("l", type=int)
    c.add_argument("--check", action="store_true", help="re-run the referenced certificate")
    c.set_defaults(func=cmd_classify)

    t = sub.add_parser("tree", parents=[common], help="correlation record and verdicts of a K3-tree")
    t.add_argument("file")
    t.add_argument("--sidorenko-edges", type=int)
    t.set_defaults(func=cmd_tree)
    return parser


_DEFAULTS = {"mode": None, "tol": commonality.DEFAULT_TOL, "seed": 0, "json": False}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    for key, val in _DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, val)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, GraphonError, graphs.GraphError, reduction.ReductionError,
            commonality.FamilyError, correlation.CorrelationError, KeyError, ValueError,
            OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
