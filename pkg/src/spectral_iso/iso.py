"""Isomorphism decision: spectral invariants first, then a complete individualization-refinement search."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cmp_to_key

import numpy as np

from .balanced import Refiner, all_vertex_partitions
from .config import DEFAULT, Config
from .graph_io import Graph
from .partition import ContractError, Partition, _equitable_cells, group_rows, meet
from .spectral import SpectralDecomposition, decompose_graph
from .structure import _cmp_values, corresponds, select_block_candidate, subspace_cascade, uniform_partition


def _r(x: float) -> float:
    return round(float(x), 6) + 0.0


# fingerprints

@dataclass(frozen=True)
class Fingerprint:
    spectrum: tuple  # (eigenvalue, multiplicity)
    vertex_signatures: tuple  # (cell sizes, refinement steps, float data), sorted
    uniform_sizes: tuple

    def to_json(self) -> dict:
        return {
            "spectrum": [[_r(l), m] for l, m in self.spectrum],
            "vertex_signatures": [[list(s), repr(sig), [_r(x) for x in vals]]
                                  for s, sig, vals in self.vertex_signatures],
            "uniform_sizes": list(self.uniform_sizes),
        }


def _vertex_signature(d: SpectralDecomposition, bp) -> tuple:
    diag = np.array([np.diag(d.projector(k)) for k in range(d.t)])
    types = [diag[:, c[0]] for c in bp.cells]
    data = np.concatenate([np.asarray(bp.values, dtype=float)] + types) if types else np.zeros(0)
    return bp.partition.sizes(), bp.signature, tuple(float(x) for x in data)


def _cmp_signature(a, b, tol):
    if a[0] != b[0]:
        return -1 if a[0] < b[0] else 1
    if a[1] != b[1]:
        return -1 if repr(a[1]) < repr(b[1]) else 1
    return _cmp_values(a[2], b[2], tol)


def fingerprint(g: Graph, config: Config = DEFAULT, d=None, vps=None, pbar=None) -> Fingerprint:
    d = d or decompose_graph(g, config)
    vps = vps if vps is not None else all_vertex_partitions(d, g)
    pbar = pbar or uniform_partition(d, g, vps)
    tol = 10 * d.tol
    sigs = sorted((_vertex_signature(d, bp) for bp in vps),
                  key=cmp_to_key(lambda a, b: _cmp_signature(a, b, tol)))
    spec = tuple((float(l), int(m)) for l, m in zip(d.eigenvalues, d.multiplicities))
    return Fingerprint(spec, tuple(sigs), tuple(sorted(pbar.sizes())))


def fingerprints_match(a: Fingerprint, b: Fingerprint, tol: float = 1e-6) -> bool:
    if len(a.spectrum) != len(b.spectrum) or len(a.vertex_signatures) != len(b.vertex_signatures):
        return False
    if any(ma != mb or abs(la - lb) > tol for (la, ma), (lb, mb) in zip(a.spectrum, b.spectrum)):
        return False
    if a.uniform_sizes != b.uniform_sizes:
        return False
    return all(_cmp_signature(x, y, tol) == 0 for x, y in zip(a.vertex_signatures, b.vertex_signatures))


# certificates

@dataclass(frozen=True)
class Certificate:
    verdict: str  # isomorphic | non_isomorphic
    mapping: tuple | None
    reason: str  # fingerprint-mismatch | search-exhausted | mapping-found
    stats: dict = field(default_factory=dict)

    @property
    def isomorphic(self) -> bool:
        return self.verdict == "isomorphic"

    def to_json(self, timing: bool = False) -> dict:
        stats = {k: v for k, v in sorted(self.stats.items()) if timing or k != "eigentime_ms"}
        return {
            "isomorphic": self.isomorphic,
            "mapping": None if self.mapping is None else [x + 1 for x in self.mapping],
            "reason": self.reason,
            "stats": stats,
        }


def verify_isomorphism(g: Graph, h: Graph, mapping) -> bool:
    """Exact check that uv ∈ E(G) ⇔ φ(u)φ(v) ∈ E(H)."""
    mapping = tuple(int(x) for x in mapping)
    if sorted(mapping) != list(range(len(mapping))):
        raise ContractError("mapping is not a bijection")
    if g.n != h.n or len(mapping) != g.n:
        return False
    if len(g.edges) != len(h.edges):
        return False
    return all(h.has_edge(mapping[u], mapping[v]) for u, v in g.edges)


class _Search:
    def __init__(self, g, h, dg, dh, vg, vh, spectral_depth=2):
        self.g, self.h = g, h
        self.rg, self.rh = Refiner(dg, g), Refiner(dh, h)
        self.vg, self.vh = vg, vh
        self.tol = max(dg.tol, dh.tol)
        self.spectral_depth = spectral_depth
        self.nodes = 0
        self.refiner_calls = 0

    def _refine(self, ca, cb, sa, sb, depth):
        self.refiner_calls += 1
        if depth <= self.spectral_depth and self.vg is not None:
            pa = self.rg.anchored(sa, Partition(self.g.n, ca))
            pb = self.rh.anchored(sb, Partition(self.h.n, cb))
            if pa.partition.sizes() != pb.partition.sizes() or not corresponds(pa, pb, self.tol):
                return None
            return pa.cells, pb.cells
        ta, tb = [], []
        ca = _equitable_cells(self.g.adjacency, ca, ta)
        cb = _equitable_cells(self.h.adjacency, cb, tb)
        if ta != tb or tuple(map(len, ca)) != tuple(map(len, cb)):
            return None
        return ca, cb

    def run(self, ca, cb, sa=(), sb=()):
        self.nodes += 1
        live = [i for i, c in enumerate(ca) if len(c) > 1]
        if not live:
            perm = [0] * self.g.n
            for x, y in zip(ca, cb):
                perm[x[0]] = y[0]
            return tuple(perm) if verify_isomorphism(self.g, self.h, perm) else None
        i = min(live, key=lambda j: (len(ca[j]), ca[j][0]))
        u = ca[i][0]
        for w in cb[i]:
            if self.vg is not None and not corresponds(self.vg[u], self.vh[w], self.tol):
                continue
            na = ca[:i] + ((u,), tuple(x for x in ca[i] if x != u)) + ca[i + 1:]
            nb = cb[:i] + ((w,), tuple(x for x in cb[i] if x != w)) + cb[i + 1:]
            res = self._refine(na, nb, list(sa) + [u], list(sb) + [w], len(sa) + 1)
            if res is None:
                continue
            found = self.run(res[0], res[1], tuple(sa) + (u,), tuple(sb) + (w,))
            if found is not None:
                return found
        return None


def _spectral_seed(dg, dh, tol):
    """Joint type labels of both graphs over every eigenvalue, met into one colouring."""
    n = dg.n
    lab = np.zeros((2 * n, dg.t), dtype=int)
    for k in range(dg.t):
        keys = np.vstack([np.sort(dg.projector(k), axis=0).T, np.sort(dh.projector(k), axis=0).T])
        for j, grp in enumerate(group_rows(keys, tol)):
            lab[grp, k] = j
    rows = [tuple(r) for r in lab]
    order = sorted(set(rows))
    ca = tuple(tuple(x for x in range(n) if rows[x] == key) for key in order)
    cb = tuple(tuple(x for x in range(n) if rows[n + x] == key) for key in order)
    return ca, cb


def are_isomorphic(g: Graph, h: Graph, config: Config = DEFAULT) -> Certificate:
    stats = {"nodes_visited": 0, "refiner_calls": 0, "eigentime_ms": 0.0, "stage": "invariants"}

    def no(reason="fingerprint-mismatch"):
        return Certificate("non_isomorphic", None, reason, stats)

    if g.n != h.n or len(g.edges) != len(h.edges):
        return no()
    if sorted(map(len, g.neighbors)) != sorted(map(len, h.neighbors)):
        return no()
    if g.n == 0:
        return Certificate("isomorphic", (), "mapping-found", stats)
    t0 = time.perf_counter()
    dg, dh = decompose_graph(g, config), decompose_graph(h, config)
    stats["eigentime_ms"] = round(1000 * (time.perf_counter() - t0), 3)
    tol = 10 * max(dg.tol, dh.tol)
    if dg.multiplicities != dh.multiplicities or np.max(np.abs(np.subtract(dg.eigenvalues, dh.eigenvalues))) > tol:
        return no()

    # cheap stage: colour refinement, seeded by spectral types only when it stalls
    search = _Search(g, h, dg, dh, None, None, spectral_depth=-1)
    unit = (tuple(range(g.n)),)
    res = search._refine(unit, unit, (), (), 0)
    if res is None:
        return no()
    ca, cb = res
    if len(ca) < g.n:
        sa, sb = _spectral_seed(dg, dh, tol)
        if tuple(map(len, sa)) != tuple(map(len, sb)):
            return no()
        res = search._refine(meet(Partition(g.n, ca), Partition(g.n, sa)).cells,
                             meet(Partition(h.n, cb), Partition(h.n, sb)).cells, (), (), 0)
        if res is None:
            return no()
        ca, cb = res
    if len(ca) == g.n:
        stats["stage"] = "cheap"
        m = search.run(ca, cb)
        stats.update(nodes_visited=search.nodes, refiner_calls=search.refiner_calls)
        if m is None:
            return no("search-exhausted")
        return Certificate("isomorphic", m, "mapping-found", stats)

    # full stage: balanced partitions for every vertex
    stats["stage"] = "full"
    vg = all_vertex_partitions(dg, g, config.workers)
    vh = all_vertex_partitions(dh, h, config.workers)
    fg = fingerprint(g, config, dg, vg)
    fh = fingerprint(h, config, dh, vh)
    if not fingerprints_match(fg, fh, tol):
        return no()
    pg, ph = uniform_partition(dg, g, vg), uniform_partition(dh, h, vh)
    reps_ok = len(pg.cells) == len(ph.cells) and all(
        len(a) == len(b) and corresponds(vg[a[0]], vh[b[0]], tol) for a, b in zip(pg.cells, ph.cells))
    if not reps_ok:
        return no()
    sa = meet(Partition(g.n, ca), pg).cells
    sb = meet(Partition(h.n, cb), ph).cells
    search = _Search(g, h, dg, dh, vg, vh, spectral_depth=2)
    res = search._refine(sa, sb, (), (), 3)
    m = None
    if res is not None:
        m = search.run(*res)
    stats.update(nodes_visited=search.nodes, refiner_calls=search.refiner_calls + 1)
    if m is None:
        return no("search-exhausted")
    return Certificate("isomorphic", m, "mapping-found", stats)


def orbit_report(g: Graph, config: Config = DEFAULT) -> dict:
    """Best orbit approximation from the spectral pipeline, a fastening-style chain,
    and (when small enough) the oracle orbits for comparison."""
    d = decompose_graph(g, config)
    vps = all_vertex_partitions(d, g, config.workers)
    pbar = uniform_partition(d, g, vps)
    blocks = []
    for s in pbar.cells:
        if len(s) > 1:
            blocks.append(select_block_candidate(d, g, s, vps).to_json())
    cascade = [[s.dim for s in c.subspaces()] for c in subspace_cascade(d, g, pbar)]
    chain, seq = [], []
    ref = Refiner(d, g)
    cur = pbar
    while not cur.is_discrete():
        nxt = next(c for c in cur.cells if len(c) > 1)[0]
        seq.append(nxt)
        cur = ref.anchored(seq, pbar).partition
        chain.append({"anchor": [x + 1 for x in seq], "cells": cur.to_json()["cells"]})
    out = {
        "approx": pbar.to_json()["cells"],
        "blocks": blocks,
        "cascade_dims": cascade,
        "chain": chain,
        "oracle": None,
        "equal": None,
    }
    if g.n <= config.oracle_cap:
        from .oracle import automorphism_group

        orb = automorphism_group(g, config.oracle_cap).orbits()
        out["oracle"] = orb.to_json()["cells"]
        out["equal"] = orb.same_cells(pbar)
    return out
