"""Exhaustive property suites over the small-graph corpus, shared by the CLI and the test-suite."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .balanced import all_vertex_partitions, big_cell_dichotomy
from .config import DEFAULT, Config
from .graph_io import (Graph, complete, cube, cycle, petersen, random_graph, random_relabel,
                       small_graph_corpus, to_graph6)
from .iso import are_isomorphic, verify_isomorphism
from .oracle import automorphism_group, orbit_equation_context, permutation_isomorphic, stabilizer, verify_orbit_equation
from .partition import Partition, cell_orthogonality_report, is_equitable, is_equitable_spectral, is_union_of
from .spectral import decompose_graph, reconstruction_error
from .structure import select_block_candidate, uniform_partition


@dataclass
class SuiteResult:
    name: str
    total: int = 0
    passed: int = 0
    failures: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def record(self, good: bool, what=None):
        self.total += 1
        if good:
            self.passed += 1
        elif len(self.failures) < 20:
            self.failures.append(what)

    def to_json(self) -> dict:
        return {"name": self.name, "total": self.total, "passed": self.passed, "ok": self.ok,
                "failures": [str(f) for f in self.failures], **self.extra}


class GraphData:
    """Lazily computed spectral and oracle data for one corpus graph."""

    def __init__(self, g: Graph, config: Config = DEFAULT):
        self.g = g
        self.config = config
        self._d = self._vps = self._pbar = self._grp = None

    @property
    def d(self):
        if self._d is None:
            self._d = decompose_graph(self.g, self.config)
        return self._d

    @property
    def vps(self):
        if self._vps is None:
            self._vps = all_vertex_partitions(self.d, self.g)
        return self._vps

    @property
    def pbar(self):
        if self._pbar is None:
            self._pbar = uniform_partition(self.d, self.g, self.vps)
        return self._pbar

    @property
    def group(self):
        if self._grp is None:
            self._grp = automorphism_group(self.g, self.config.oracle_cap)
        return self._grp


@lru_cache(maxsize=4)
def corpus(max_n: int = 7, min_n: int = 1) -> tuple:
    return tuple(GraphData(g) for g in small_graph_corpus(max_n, min_n))


def set_partitions(n: int):
    """All set partitions of 0..n-1 (Bell-number many), as tuples of cells."""
    def rec(i, cells):
        if i == n:
            yield tuple(tuple(c) for c in cells)
            return
        for c in cells:
            c.append(i)
            yield from rec(i + 1, cells)
            c.pop()
        cells.append([i])
        yield from rec(i + 1, cells)
        cells.pop()

    yield from rec(0, [])


def _timed(fn):
    def run(*a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        res.seconds = round(time.perf_counter() - t0, 3)
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def orbit_soundness(max_n: int = 7) -> SuiteResult:
    """Cells of every vertex partition are unions of stabilizer orbits; cells of Π̄ are unions of orbits."""
    res = SuiteResult("orbit_soundness")
    exact = 0
    for gd in corpus(max_n):
        g, grp = gd.g, gd.group
        for v in range(g.n):
            orb = stabilizer(grp, [v]).orbits()
            cells = gd.vps[v].cells
            res.record(is_union_of(cells, orb.cells), (to_graph6(g), v + 1))
            exact += orb.same_cells(gd.vps[v].partition)
        res.record(is_union_of(gd.pbar.cells, grp.orbits().cells), (to_graph6(g), "uniform"))
    res.extra["vertex_partitions_equal_to_orbits"] = exact
    return res


@_timed
def lemma1(max_n: int = 5, tol: float = 1e-7) -> SuiteResult:
    """Spectral and combinatorial equitability agree on every set partition."""
    res = SuiteResult("equitable_equivalence")
    for gd in corpus(max_n):
        g = gd.g
        for cells in set_partitions(g.n):
            p = Partition(g.n, cells)
            res.record(is_equitable_spectral(gd.d, p, tol) == is_equitable(g, p), (to_graph6(g), cells))
    return res


@_timed
def orbit_equation(max_n: int = 7, tol: float = 1e-7) -> SuiteResult:
    """The orbit-subspace equation on every (G, orbit, eigenvalue)."""
    res = SuiteResult("orbit_equation")
    for gd in corpus(max_n):
        g, d, grp = gd.g, gd.d, gd.group
        for t in grp.orbits().cells:
            ctx = orbit_equation_context(grp, t)
            for k in range(d.t):
                r = verify_orbit_equation(g, d, grp, t, k, tol, context=ctx)
                res.record(r["equal"], (to_graph6(g), t, float(d.eigenvalues[k]), r))
    return res


@_timed
def lemma6(max_n: int = 6) -> SuiteResult:
    """Cell orthogonality and projection constancy agree on equitable partitions."""
    res = SuiteResult("cell_orthogonality")
    for gd in corpus(max_n):
        g = gd.g
        if g.n < 4:
            continue
        for cells in set_partitions(g.n):
            big = [c for c in cells if len(c) > 1]
            if len(big) < 2:
                continue
            p = Partition(g.n, cells)
            if not is_equitable(g, p):
                continue
            for i, c1 in enumerate(big):
                for c2 in big[i + 1:]:
                    rep = cell_orthogonality_report(gd.d, g, p, c1, c2)
                    res.record(rep["projection_constant"] == rep["orthogonal"], (to_graph6(g), cells, c1, c2))
    return res


@_timed
def dichotomy(max_n: int = 7) -> SuiteResult:
    """Big-cell dichotomy never produces the counterexample record."""
    res = SuiteResult("big_cell_dichotomy")
    cases = {}
    for gd in corpus(max_n):
        if len(gd.pbar.cells) != 1:
            continue
        for v in range(gd.g.n):
            rep = big_cell_dichotomy(gd.d, gd.g, v, gd.vps, gd.pbar)
            cases[rep.case] = cases.get(rep.case, 0) + 1
            if rep.case != "NotApplicable":
                res.record(rep.case in ("NontrivialSpan", "SharedBigCell"), (to_graph6(gd.g), v + 1, rep))
    res.extra["cases"] = dict(sorted(cases.items()))
    res.extra["applicable"] = res.total
    return res


@_timed
def block_soundness(max_n: int = 7) -> SuiteResult:
    """Every nontrivial block candidate is a genuine block of Aut(G)."""
    res = SuiteResult("block_soundness")
    origins = {}
    for gd in corpus(max_n):
        for s in gd.pbar.cells:
            if len(s) < 2:
                continue
            bc = select_block_candidate(gd.d, gd.g, s, gd.vps)
            origins[bc.origin] = origins.get(bc.origin, 0) + 1
            if bc.nontrivial:
                res.record(gd.group.is_block(bc.B), (to_graph6(gd.g), bc.B))
    res.extra["origins"] = dict(sorted(origins.items()))
    return res


@_timed
def group_orders() -> SuiteResult:
    res = SuiteResult("group_orders")
    cases = [(f"K{n}", complete(n), math.factorial(n)) for n in range(1, 9)]
    cases += [(f"C{n}", cycle(n), 2 * n) for n in range(3, 13)]
    cases += [("Q3", cube(), 48), ("Petersen", petersen(), 120)]
    for name, g, want in cases:
        got = automorphism_group(g, cap=16).order
        res.record(got == want, (name, got, want))
    return res


@_timed
def reconstruction(max_n: int = 7) -> SuiteResult:
    res = SuiteResult("reconstruction")
    worst = 0.0
    for gd in corpus(max_n):
        err = reconstruction_error(gd.d)
        worst = max(worst, err)
        res.record(err <= 1e-10 * gd.g.n, (to_graph6(gd.g), err))
    res.extra["worst"] = worst
    return res


@_timed
def isomorphism(max_n: int = 6, planted: int = 100, planted_n: int = 50) -> SuiteResult:
    """are_isomorphic against enumeration on every cospectral corpus pair, plus planted pairs."""
    res = SuiteResult("isomorphism")
    graphs = [gd.g for gd in corpus(max_n)]
    spec = [tuple(np.round(np.linalg.eigvalsh(g.adjacency), 6) + 0.0) if g.n else () for g in graphs]
    pairs = 0
    for i, g in enumerate(graphs):
        for j in range(i + 1, len(graphs)):
            h = graphs[j]
            if g.n != h.n or spec[i] != spec[j]:
                continue
            pairs += 1
            c = are_isomorphic(g, h)
            ok = c.isomorphic == permutation_isomorphic(g, h)
            res.record(ok and (not c.isomorphic or verify_isomorphism(g, h, c.mapping)), (to_graph6(g), to_graph6(h)))
    from .graph_io import disjoint_union, star

    c = are_isomorphic(star(4), disjoint_union(cycle(4), complete(1)))
    res.record(not c.isomorphic, "K_{1,4} vs C4+K1")
    for s in range(planted):
        g = random_graph(planted_n, 0.5, seed=s)
        h, _ = random_relabel(g, seed=10_000 + s)
        c = are_isomorphic(g, h)
        res.record(c.isomorphic and verify_isomorphism(g, h, c.mapping), ("planted", s))
    res.extra["cospectral_pairs"] = pairs
    return res


THEOREM_SUITES = {
    "equitable_equivalence": lemma1,
    "orbit_equation": orbit_equation,
    "cell_orthogonality": lemma6,
    "big_cell_dichotomy": dichotomy,
}


def verify_theorems(max_n: int = 6) -> list:
    """The four theorem suites, each capped at the sizes its statement calls for."""
    caps = {"equitable_equivalence": 5, "cell_orthogonality": 6}
    return [fn(min(max_n, caps.get(name, max_n))) for name, fn in THEOREM_SUITES.items()]
