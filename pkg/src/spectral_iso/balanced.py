"""Balanced partitions Π[⊕V_λ; v]: the fixpoint of peel meets, equitable, type/angle and balance refinements."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph_io import Graph
from .partition import (
    Partition,
    _equitable_cells,
    group_labels,
    group_rows,
    lifted_spaces,
    split_cells,
)
from .regions import incidence_set, peel, region_indicator
from .spectral import (
    SpectralDecomposition,
    Subspace,
    complement_within,
    intersect,
    orth_sum,
    span_of,
)


@dataclass(frozen=True)
class BalanceReport:
    cell: tuple
    eigen_index: int
    thin: bool
    balanced: bool
    reason: str = ""


@dataclass(frozen=True)
class BalancedPartition:
    """Result of the fixpoint refinement.

    ``signature`` lists the structural refinement events (which operation split
    which cell into pieces of which sizes) and ``values`` the numbers behind each
    split. Two balanced partitions correspond cell-by-cell exactly when both agree.
    """

    partition: Partition
    anchor: tuple
    reports: tuple
    rounds: int
    signature: tuple
    values: tuple = field(repr=False)

    @property
    def cells(self) -> tuple:
        return self.partition.cells


def type_labels(d: SpectralDecomposition, k: int) -> np.ndarray:
    """Vertices grouped by the coordinate multiset of proj_{V_λ}(e_x), in invariant order."""
    key = ("types", k)
    if key not in d._cache:
        d._cache[key] = group_labels(np.sort(d.projector(k), axis=0).T, d.tol)
    return d._cache[key]


class _Trace:
    def __init__(self):
        self.sig = []
        self.vals = []

    def add(self, op, cell_index, k, pieces, values=()):
        self.sig.append((op, cell_index, k, tuple(len(p) for p in pieces)))
        self.vals.extend(float(x) for x in values)


def _apply_labels(cells, labels, trace, op, k, values=None):
    out = []
    for i, c in enumerate(cells):
        if len(c) == 1:
            out.append(c)
            continue
        pieces = split_cells((c,), labels)
        if len(pieces) > 1:
            vals = () if values is None else [values[p[0]] for p in pieces]
            trace.add(op, i, k, pieces, vals)
        out.extend(pieces)
    return tuple(out)


def _equitable(adj, cells, trace):
    raw = []
    out = _equitable_cells(adj, cells, raw)
    for op, i, keys, sizes in raw:
        trace.sig.append(("eq", i, keys, sizes))
    return out


def _split_piecewise(cells, index, pieces, trace, op, k, values=()):
    trace.add(op, index, k, pieces, values)
    return cells[:index] + tuple(tuple(p) for p in pieces) + cells[index + 1:]


class Refiner:
    """Balanced-partition machinery bound to one graph and its decomposition."""

    def __init__(self, d: SpectralDecomposition, g: Graph):
        self.d = d
        self.g = g
        self.n = g.n
        self.tol = d.tol
        self.cfg = d.config

    # balance

    def balance_check(self, cells, ci: int, k: int, anchor_vec, lifts) -> tuple:
        """Return (report, pieces, values); pieces is None when the cell is balanced."""
        d, tol = self.d, self.tol
        c = list(cells[ci])
        proj = d.projector(k)
        pc = proj[:, c]
        if len(c) == 1 or np.max(np.abs(pc)) <= tol:
            return BalanceReport(tuple(c), k, True, True, "trivial"), None, ()
        vc = span_of(pc, self.cfg.rank_tol)
        rc = np.zeros(self.n)
        rc[c] = 1.0
        lift = lifts[k]
        thin = bool(np.max(np.abs(anchor_vec @ pc)) <= tol)
        if thin:
            w = complement_within(intersect(vc, lift, tol), vc, tol=1e-6)
            s = w.project(rc)
            if np.linalg.norm(s) <= tol:
                return BalanceReport(tuple(c), k, True, True), None, ()
            return BalanceReport(tuple(c), k, True, False, "sum"), *self._peel_split(w, s, c)
        witness = proj @ rc
        if np.linalg.norm(witness) <= tol:
            witness = vc.project(anchor_vec)
        inc = incidence_set(vc, witness, c, tol, self.cfg.zero_tol, self.cfg.rank_tol)
        if 0 < len(inc) < len(c):
            inc_set = set(int(x) for x in inc)
            pieces = [sorted(inc_set), sorted(set(c) - inc_set)]
            return BalanceReport(tuple(c), k, False, False, "incidence"), pieces, (1.0, 0.0)
        ir = region_indicator(vc, c, witness, tol)
        vals = pc.T @ ir
        groups = group_rows(vals, tol)
        if len(groups) > 1:
            pieces = [[c[i] for i in g] for g in groups]
            return BalanceReport(tuple(c), k, False, False, "indicator"), pieces, [vals[g[0]] for g in groups]
        if np.linalg.norm(ir) > tol:
            inner = orth_sum(lift, Subspace(ir / np.linalg.norm(ir)))
        else:
            inner = lift
        w = complement_within(intersect(vc, inner, tol), vc, tol=1e-6)
        s = w.project(rc)
        if np.linalg.norm(s) <= tol:
            return BalanceReport(tuple(c), k, False, True), None, ()
        return BalanceReport(tuple(c), k, False, False, "sum"), *self._peel_split(w, s, c)

    def _peel_split(self, w: Subspace, s, c):
        cells, _, values, _ = peel(w.projector, s, c, self.tol, self.cfg.zero_tol, self.cfg.rank_tol)
        if len(cells) == 1:
            return None, ()
        return [list(x) for x in cells], [v[1] for v in values]

    # fixpoint

    def run(self, start_cells, peel_specs, balance_anchors, anchor=()) -> BalancedPartition:
        """Refine ``start_cells`` to the balanced fixpoint.

        ``peel_specs``: list of (k, projector, anchor vector) whose peel partitions
        are met first. ``balance_anchors``: k -> anchor vector inside V_λ used for
        the angle refinement and the thin test.
        """
        d, g, n, tol = self.d, self.g, self.n, self.tol
        adj = g.adjacency
        trace = _Trace()
        cells = tuple(tuple(c) for c in start_cells)
        for k, proj, vec in peel_specs:
            if len(cells) == n:
                break
            pc, _, vals, _ = peel(proj, vec, None, tol, self.cfg.zero_tol, self.cfg.rank_tol)
            lab = np.empty(n, dtype=int)
            for i, c in enumerate(pc):
                lab[list(c)] = i
            cellvals = np.array([vals[lab[x]][1] for x in range(n)])
            cells = _apply_labels(cells, lab, trace, "peel", k, cellvals)
        reports = []
        rounds = 0
        for rounds in range(1, n + 2):
            before = len(cells)
            cells = _equitable(adj, cells, trace)
            if len(cells) < n:
                for k, vec in balance_anchors.items():
                    angle = d.projector(k) @ vec
                    keys = np.column_stack([type_labels(d, k), angle])
                    cells = _apply_labels(cells, group_labels(keys, tol), trace, "type", k, angle)
                cells = _equitable(adj, cells, trace)
            reports = []
            if len(cells) < n:
                lifts = lifted_spaces(g, Partition(n, cells), d, check=False)
                ci = 0
                while ci < len(cells):
                    split = False
                    if len(cells[ci]) > 1:
                        for k in range(d.t):
                            vec = balance_anchors.get(k, np.zeros(n))
                            rep, pieces, vals = self.balance_check(cells, ci, k, vec, lifts)
                            reports.append(rep)
                            if pieces is not None:
                                cells = _split_piecewise(cells, ci, pieces, trace, "bal:" + rep.reason, k, vals)
                                ci += len(pieces)
                                split = True
                                break
                    if not split:
                        ci += 1
            if len(cells) == before:
                break
        else:
            raise RuntimeError("balanced refinement exceeded n rounds")
        return BalancedPartition(
            Partition(n, cells), tuple(anchor), tuple(reports), rounds, tuple(trace.sig), tuple(trace.vals)
        )

    def vertex_specs(self, vertices):
        d = self.d
        specs = [(k, d.projector(k), d.projector(k)[:, v]) for v in vertices for k in range(d.t)]
        last = vertices[-1]
        anchors = {k: d.projector(k)[:, last] for k in range(d.t)}
        return specs, anchors

    def anchored(self, vertices, start=None) -> BalancedPartition:
        """Balanced partition anchored at a sequence of individualised vertices."""
        n = self.n
        vertices = [int(v) for v in vertices]
        cells = tuple(start.cells) if start is not None else (tuple(range(n)),)
        for v in vertices:
            nxt = []
            for c in cells:
                if v in c and len(c) > 1:
                    nxt.append((v,))
                    nxt.append(tuple(x for x in c if x != v))
                else:
                    nxt.append(c)
            cells = tuple(nxt)
        specs, anchors = self.vertex_specs(vertices)
        return self.run(cells, specs, anchors, anchor=tuple(vertices))


def vertex_partition(d: SpectralDecomposition, g: Graph, v: int) -> BalancedPartition:
    """Π[⊕V_λ; v]."""
    return Refiner(d, g).anchored([v])


def all_vertex_partitions(d: SpectralDecomposition, g: Graph, workers: int = 1) -> list:
    """Π[⊕V_λ; v] for every v, in vertex order."""
    # process start-up dwarfs the work on small graphs
    if workers <= 1 or g.n < 24:
        ref = Refiner(d, g)
        return [ref.anchored([v]) for v in range(g.n)]
    from concurrent.futures import ProcessPoolExecutor

    chunks = [list(range(g.n))[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_partitions_for, [(g, d.config, ch) for ch in chunks]))
    out = [None] * g.n
    for ch, res in zip(chunks, parts):
        for v, bp in zip(ch, res):
            out[v] = bp
    return out


def _partitions_for(args):
    from .spectral import decompose_graph

    g, cfg, verts = args
    d = decompose_graph(g, cfg)
    ref = Refiner(d, g)
    return [ref.anchored([v]) for v in verts]


def balance_check(d: SpectralDecomposition, g: Graph, p: Partition, cell, k: int, v: int) -> BalanceReport:
    """Balance classification of ``cell`` of the equitable partition ``p`` anchored at v."""
    cells = p.cells
    ci = cells.index(tuple(sorted(cell)))
    lifts = lifted_spaces(g, p, d)
    rep, _, _ = Refiner(d, g).balance_check(cells, ci, k, d.projector(k)[:, v], lifts)
    return rep


def is_complete_configuration(d: SpectralDecomposition, s, tol: float | None = None) -> bool:
    """For every λ and s in S, <p_s, p_x> is the same for all x in S∖{s}."""
    tol = d.tol if tol is None else tol
    s = list(s)
    if len(s) <= 2:
        return True
    for k in range(d.t):
        gram = d.projector(k)[np.ix_(s, s)]
        off = gram[~np.eye(len(s), dtype=bool)].reshape(len(s), len(s) - 1)
        if np.max(np.abs(off - off[:, :1])) > tol:
            return False
    return True


@dataclass(frozen=True)
class DichotomyReport:
    case: str  # NontrivialSpan | SharedBigCell | NotApplicable | Counterexample
    big_cell: tuple = ()
    span_dim: int = 0
    big_cells: dict = field(default_factory=dict)
    reason: str = ""


def big_cell_dichotomy(d: SpectralDecomposition, g: Graph, v: int, vertex_partitions=None,
                       uniform=None) -> DichotomyReport:
    from .structure import uniform_partition

    n = g.n
    vps = vertex_partitions or all_vertex_partitions(d, g)
    pbar = uniform if uniform is not None else uniform_partition(d, g, vps)
    if len(pbar.cells) != 1:
        return DichotomyReport("NotApplicable", reason="uniform partition is not trivial")
    p = vps[v].partition
    if len(p.cells) < 3:
        return DichotomyReport("NotApplicable", reason="fewer than 3 cells")
    big = max(p.cells, key=lambda c: (len(c), [-x for x in c]))
    if 2 * len(big) <= n:
        return DichotomyReport("NotApplicable", big_cell=big, reason="largest cell not above n/2")
    middle = [x for c in p.cells if c != big and c != (v,) for x in c]
    dim = 0
    for y in _residuals(d, g, p):
        xsp = span_of(y.project(np.eye(n)[:, middle]), d.config.rank_tol) if middle else Subspace.zero(n)
        if xsp.dim:
            dim += span_of(xsp.project(np.eye(n)[:, list(big)]), d.config.rank_tol).dim
    if dim > 0:
        return DichotomyReport("NontrivialSpan", big_cell=big, span_dim=dim)
    bigs = {}
    for x in range(n):
        if x in big:
            continue
        px = vps[x].partition
        bigs[x] = max(px.cells, key=lambda c: (len(c), [-y for y in c]))
    if all(set(b) == set(big) for b in bigs.values()):
        return DichotomyReport("SharedBigCell", big_cell=big, big_cells=bigs)
    return DichotomyReport("Counterexample", big_cell=big, big_cells=bigs,
                           reason="neither a nontrivial span nor a shared big cell")


def _residuals(d, g, p):
    return [complement_within(l, d.space(k)) for k, l in enumerate(lifted_spaces(g, p, d, check=False))]
