"""Command-line front end: ``spectral-iso <command> [graph inputs] [options]``."""
from __future__ import annotations

import argparse
import json
import os
import sys

from .config import Config, from_env
from .graph_io import Graph, ParseError, parse_edge_list, parse_graph6, parse_named

SCHEMA = 1


class UsageError(Exception):
    pass


class _GraphArg(argparse.Action):
    """Collect --graph6/--file/--named in command-line order."""

    def __call__(self, parser, namespace, values, option_string=None):
        items = list(getattr(namespace, self.dest) or [])
        items.append((option_string.lstrip("-"), values))
        setattr(namespace, self.dest, items)


def _load(kind: str, value: str) -> Graph:
    if kind == "graph6":
        return parse_graph6(value.strip())
    if kind == "named":
        return parse_named(value)
    try:
        with open(value, encoding="ascii") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {value}: {exc.strerror}") from None
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if len(lines) == 1 and " " not in lines[0] and not lines[0].isdigit():
        return parse_graph6(lines[0])
    return parse_edge_list(text)


def _graphs(args, count: int) -> list:
    items = args.graphs or []
    if len(items) != count:
        raise UsageError(f"{args.command} needs exactly {count} graph input(s), got {len(items)}")
    return [_load(k, v) for k, v in items]


def _config(args) -> Config:
    cfg = from_env()
    kw = {"fmt": args.format}
    if args.tol is not None:
        kw["tol"] = args.tol
    if args.oracle_cap is not None:
        kw["oracle_cap"] = args.oracle_cap
    kw["workers"] = args.workers if args.workers is not None else (os.cpu_count() or 1)
    try:
        return cfg.with_(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# commands

def _spectrum(args, cfg):
    from .spectral import decompose_graph, reconstruction_error

    (g,) = _graphs(args, 1)
    d = decompose_graph(g, cfg)
    return {**d.to_json(), "reconstruction_ok": reconstruction_error(d) <= 1e-10 * max(g.n, 1)}, 0


def _vpartition(args, cfg):
    from .balanced import vertex_partition
    from .spectral import decompose_graph

    (g,) = _graphs(args, 1)
    if args.vertex is None or not 1 <= args.vertex <= g.n:
        raise UsageError(f"--vertex must be in 1..{g.n}")
    bp = vertex_partition(decompose_graph(g, cfg), g, args.vertex - 1)
    return {"vertex": args.vertex, "cells": bp.partition.to_json()["cells"], "rounds": bp.rounds,
            "steps": len(bp.signature)}, 0


def _pipeline(g, cfg):
    from .balanced import all_vertex_partitions
    from .spectral import decompose_graph
    from .structure import uniform_partition

    d = decompose_graph(g, cfg)
    vps = all_vertex_partitions(d, g, cfg.workers)
    return d, vps, uniform_partition(d, g, vps)


def _uniform(args, cfg):
    (g,) = _graphs(args, 1)
    _, _, pbar = _pipeline(g, cfg)
    return {"cells": pbar.to_json()["cells"]}, 0


def _blocks(args, cfg):
    from .structure import block_partition, select_block_candidate

    (g,) = _graphs(args, 1)
    d, vps, pbar = _pipeline(g, cfg)
    group = None
    if g.n <= cfg.oracle_cap:
        from .oracle import automorphism_group

        group = automorphism_group(g, cfg.oracle_cap)
    out = []
    for s in pbar.cells:
        if len(s) < 2:
            continue
        bc = select_block_candidate(d, g, s, vps)
        rec = bc.to_json(group.is_block(bc.B) if group is not None else None)
        if bc.nontrivial:
            rec["partition"] = block_partition(d, g, bc.B, pbar).to_json()["cells"]
        out.append(rec)
    return {"uniform": pbar.to_json()["cells"], "blocks": out}, 0


def _orbits(args, cfg):
    from .iso import orbit_report

    (g,) = _graphs(args, 1)
    return orbit_report(g, cfg), 0


def _aut(args, cfg):
    from .oracle import OracleCapacityError, automorphism_group

    (g,) = _graphs(args, 1)
    try:
        return automorphism_group(g, cfg.oracle_cap).to_json(), 0
    except OracleCapacityError as exc:
        raise UsageError(str(exc)) from None


def _iso(args, cfg):
    from .iso import are_isomorphic

    g, h = _graphs(args, 2)
    cert = are_isomorphic(g, h, cfg)
    return cert.to_json(timing=args.timing), 0 if cert.isomorphic else 1


def _verify(args, cfg):
    from .theorems import verify_theorems

    if args.max_n < 1 or args.max_n > 7:
        raise UsageError("--max-n must be in 1..7")
    results = verify_theorems(args.max_n)
    suites = []
    for r in results:
        rec = r.to_json()
        if args.timing:
            rec["seconds"] = r.seconds
        suites.append(rec)
    ok = all(r.ok for r in results)
    return {"max_n": args.max_n, "suites": suites, "all_passed": ok}, 0 if ok else 1


COMMANDS = {
    "spectrum": (_spectrum, "eigenvalues, multiplicities and eigenbases"),
    "vpartition": (_vpartition, "balanced partition anchored at --vertex"),
    "uniform": (_uniform, "uniform partition of the vertex set"),
    "blocks": (_blocks, "block candidates for every cell of the uniform partition"),
    "orbits": (_orbits, "orbit approximation with oracle comparison"),
    "aut": (_aut, "automorphism group by exhaustive search"),
    "iso": (_iso, "decide isomorphism of two graphs"),
    "verify-theorems": (_verify, "run the property suites over the small-graph corpus"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-iso", description="Spectral graph isomorphism toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--graph6", dest="graphs", action=_GraphArg, metavar="STR")
        p.add_argument("--file", dest="graphs", action=_GraphArg, metavar="PATH",
                       help="graph6 line or edge list (first line n, then 'u v' pairs, 1-based)")
        p.add_argument("--named", dest="graphs", action=_GraphArg, metavar="NAME",
                       help="e.g. petersen, cube, cycle:5, circulant:8:1,2, line_graph(star:3)")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--tol", type=float)
        p.add_argument("--workers", type=int)
        p.add_argument("--oracle-cap", type=int)
        p.add_argument("--timing", action="store_true", help="include wall-clock figures (not reproducible)")
        if name == "vpartition":
            p.add_argument("--vertex", type=int, help="1-based anchor vertex")
        if name == "verify-theorems":
            p.add_argument("--max-n", type=int, default=6)
    return parser


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                          (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(pad + "- " + _text(x, indent + 1).lstrip() if isinstance(x, dict)
                         else f"{pad}- {json.dumps(x)}" for x in obj)
    return f"{pad}{json.dumps(obj)}"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = _config(args)
        payload, code = COMMANDS[args.command][0](args, cfg)
    except (UsageError, ParseError, ValueError) as exc:
        print(f"spectral-iso: error: {exc}", file=sys.stderr)
        return 2
    payload = {"schema": SCHEMA, "command": args.command, **payload}
    if cfg.fmt == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(_text(payload) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
