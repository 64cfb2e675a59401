"""Ordered partitions, equitable refinement, quotients and lifted eigenspaces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_io import Graph
from .spectral import (
    SpectralDecomposition,
    Subspace,
    complement_within,
    jacobi_eigh,
    mgs,
    span_of,
)


class ContractError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Ordered cells of {0..n-1}.

    Cell order is produced by the refinement that built the partition: a split
    replaces a cell by its pieces, ordered by the invariant value that separated
    them. Equality of partitions as set systems is ``same_cells``.
    """

    n: int
    cells: tuple
    provenance: tuple = ()

    def __post_init__(self):
        cells = tuple(tuple(sorted(int(x) for x in c)) for c in self.cells)
        if any(len(c) == 0 for c in cells):
            raise ValueError("empty cell")
        flat = [x for c in cells for x in c]
        if sorted(flat) != list(range(self.n)):
            raise ValueError("cells must partition 0..n-1")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def unit(cls, n: int) -> "Partition":
        return cls(n, (tuple(range(n)),) if n else ())

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(n, tuple((i,) for i in range(n)))

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Cells ordered by label value."""
        labels = list(labels)
        keys = sorted(set(labels))
        return cls(len(labels), tuple(tuple(i for i, l in enumerate(labels) if l == k) for k in keys))

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    @property
    def labels(self) -> np.ndarray:
        lab = np.empty(self.n, dtype=int)
        for i, c in enumerate(self.cells):
            lab[list(c)] = i
        return lab

    def cell_of(self, v: int) -> tuple:
        for c in self.cells:
            if v in c:
                return c
        raise KeyError(v)

    def is_discrete(self) -> bool:
        return len(self.cells) == self.n

    def as_sets(self) -> frozenset:
        return frozenset(frozenset(c) for c in self.cells)

    def same_cells(self, other: "Partition") -> bool:
        return self.n == other.n and self.as_sets() == other.as_sets()

    def refines(self, other: "Partition") -> bool:
        """True if every cell of self lies inside a cell of other."""
        lab = other.labels
        return all(len({lab[x] for x in c}) == 1 for c in self.cells)

    def sizes(self) -> tuple:
        return tuple(len(c) for c in self.cells)

    def characteristic_matrix(self) -> np.ndarray:
        r = np.zeros((self.n, len(self.cells)))
        for i, c in enumerate(self.cells):
            r[list(c), i] = 1.0
        return r

    def to_json(self) -> dict:
        out = {"cells": [[x + 1 for x in c] for c in self.cells]}
        if self.provenance:
            out["provenance"] = list(self.provenance)
        return out


def is_union_of(cells, blocks) -> bool:
    """Every cell is a union of blocks (both given as iterables of vertex sets)."""
    owner = {}
    for i, c in enumerate(cells):
        for x in c:
            owner[x] = i
    return all(len({owner[x] for x in b}) == 1 for b in blocks)


# grouping with tolerance

def group_rows(keys, tol: float) -> list:
    """Group row indices of ``keys`` whose entries agree within ``tol``.

    Columns are processed in order; inside each column values are sorted and cut
    at gaps larger than ``tol``. Groups come out in increasing key order, which
    depends only on the values, never on row positions.
    """
    keys = np.asarray(keys, dtype=float)
    if keys.ndim == 1:
        keys = keys[:, None]
    m = keys.shape[0]
    if m == 0:
        return []
    lab = np.zeros(m, dtype=np.int64)
    for col in range(keys.shape[1]):
        if col & (col - 1) == 0 and _settled(keys[:, col:], lab, tol):
            break
        vals = keys[:, col]
        order = np.lexsort((vals, lab))
        new = np.ones(m, dtype=bool)
        new[1:] = (lab[order][1:] != lab[order][:-1]) | (np.diff(vals[order]) > tol)
        lab = np.empty(m, dtype=np.int64)
        lab[order] = np.cumsum(new) - 1
        if lab.max() == m - 1:
            break
    order = np.argsort(lab, kind="stable")
    cuts = np.nonzero(np.diff(lab[order]))[0] + 1
    return np.split(order, cuts)


def _settled(rest: np.ndarray, lab: np.ndarray, tol: float) -> bool:
    """No later column can split any group: every group's spread is within tol."""
    counts = np.bincount(lab)
    order = np.argsort(lab, kind="stable")
    order = order[counts[lab[order]] > 1]
    if len(order) == 0:
        return True
    starts = np.concatenate([[0], np.nonzero(np.diff(lab[order]))[0] + 1])
    sub = rest[order]
    spread = np.maximum.reduceat(sub, starts, axis=0) - np.minimum.reduceat(sub, starts, axis=0)
    return bool(np.all(spread <= tol))


def group_labels(keys, tol: float) -> np.ndarray:
    lab = np.empty(len(keys), dtype=int)
    for i, g in enumerate(group_rows(keys, tol)):
        lab[g] = i
    return lab


def split_cells(cells, labels) -> tuple:
    """Split each cell by integer ``labels`` (array over vertices), pieces in label order."""
    out = []
    for c in cells:
        if len(c) == 1:
            out.append(tuple(c))
            continue
        lab = labels[list(c)]
        for k in np.unique(lab):
            out.append(tuple(x for x, l in zip(c, lab) if l == k))
    return tuple(out)


# operations

def meet(p1: Partition, p2: Partition) -> Partition:
    """Nonempty intersections C1 ∩ C2, ordered by (index in p1, index in p2)."""
    if p1.n != p2.n:
        raise ContractError("ground-set mismatch")
    return Partition(p1.n, split_cells(p1.cells, p2.labels))


def _equitable_cells(adj: np.ndarray, cells, trace=None) -> tuple:
    cells = tuple(tuple(c) for c in cells)
    n = adj.shape[0]
    while True:
        lab = np.empty(n, dtype=int)
        for i, c in enumerate(cells):
            lab[list(c)] = i
        r = np.zeros((n, len(cells)))
        r[np.arange(n), lab] = 1.0
        counts = np.rint(adj @ r).astype(np.int64)
        nxt = []
        for i, c in enumerate(cells):
            if len(c) == 1:
                nxt.append(c)
                continue
            rows = counts[list(c)]
            uniq, inv = np.unique(rows, axis=0, return_inverse=True)
            inv = inv.reshape(-1)
            if len(uniq) == 1:
                nxt.append(c)
                continue
            pieces = [tuple(x for x, k in zip(c, inv) if k == j) for j in range(len(uniq))]
            nxt.extend(pieces)
            if trace is not None:
                trace.append(("eq", i, tuple(map(tuple, uniq.tolist())), tuple(len(p) for p in pieces)))
        if len(nxt) == len(cells):
            return cells
        cells = tuple(nxt)


def refine_equitable(g: Graph, p: Partition, trace=None) -> Partition:
    """Coarsest equitable refinement (colour refinement), keeping cell order invariant."""
    if p.n != g.n:
        raise ContractError("partition and graph sizes differ")
    if g.n == 0:
        return p
    return Partition(g.n, _equitable_cells(g.adjacency, p.cells, trace))


def _counts(g: Graph, p: Partition) -> np.ndarray:
    return np.rint(g.adjacency @ p.characteristic_matrix()).astype(np.int64)


def is_equitable(g: Graph, p: Partition) -> bool:
    cnt = _counts(g, p)
    return all(np.all(cnt[list(c)] == cnt[c[0]]) for c in p.cells)


@dataclass(frozen=True)
class QuotientGraph:
    t: int
    B: np.ndarray
    sizes: tuple


def quotient_graph(g: Graph, p: Partition) -> QuotientGraph:
    if not is_equitable(g, p):
        raise ContractError("quotient of a non-equitable partition")
    cnt = _counts(g, p)
    b = np.array([cnt[c[0]] for c in p.cells], dtype=np.int64)
    return QuotientGraph(len(p.cells), b, p.sizes())


def is_equitable_spectral(d: SpectralDecomposition, p: Partition, tol: float | None = None) -> bool:
    """Spectral equitability test: <e_x, proj_λ(R_j)> constant on cells, for all λ and j."""
    tol = d.tol if tol is None else tol
    r = p.characteristic_matrix()
    for k in range(d.t):
        pr = d.projector(k) @ r
        for c in p.cells:
            if len(c) > 1 and np.max(np.abs(pr[list(c)] - pr[c[0]])) > tol:
                return False
    return True


def lifted_eigenspace(g: Graph, p: Partition, d: SpectralDecomposition, k: int, check: bool = True) -> Subspace:
    """R_Π V_λ^{G/Π} for the k-th eigenvalue of ``d``.

    The quotient matrix B satisfies b_ij|C_i| = b_ji|C_j|, so S = N^{1/2} B N^{-1/2}
    (N = diag of cell sizes) is symmetric; eigenvectors y of S give quotient
    eigenvectors N^{-1/2} y, and R N^{-1/2} has orthonormal columns.
    """
    if check and not is_equitable(g, p):
        raise ContractError("lifted eigenspace needs an equitable partition")
    lam = d.eigenvalues[k]
    r = p.characteristic_matrix()
    sizes = r.sum(axis=0)
    b = (g.adjacency @ r)[[c[0] for c in p.cells]]
    root = np.sqrt(sizes)
    s = (root[:, None] * b) / root[None, :]
    s = (s + s.T) / 2
    w, y = jacobi_eigh(s)
    sel = np.abs(w - lam) <= d.config.cluster_tol * d.scale
    if not np.any(sel):
        return Subspace.zero(g.n)
    lifted = (r / root[None, :]) @ y[:, sel]
    return Subspace(mgs(lifted))


def lifted_spaces(g: Graph, p: Partition, d: SpectralDecomposition, check: bool = True) -> list:
    """lifted_eigenspace for every eigenvalue, sharing one quotient eigendecomposition."""
    if check and not is_equitable(g, p):
        raise ContractError("lifted eigenspace needs an equitable partition")
    r = p.characteristic_matrix()
    sizes = r.sum(axis=0)
    b = (g.adjacency @ r)[[c[0] for c in p.cells]]
    root = np.sqrt(sizes)
    s = (root[:, None] * b) / root[None, :]
    w, y = jacobi_eigh((s + s.T) / 2)
    lift = r / root[None, :]
    out = []
    for lam in d.eigenvalues:
        sel = np.abs(w - lam) <= d.config.cluster_tol * d.scale
        out.append(Subspace(mgs(lift @ y[:, sel])) if np.any(sel) else Subspace.zero(g.n))
    return out


def residual_spaces(g: Graph, p: Partition, d: SpectralDecomposition) -> list:
    """Y_{λ,Π} = V_λ ⊖ R_Π V_λ^{G/Π} for every λ."""
    return [complement_within(l, d.space(k)) for k, l in enumerate(lifted_spaces(g, p, d))]


def cell_orthogonality_report(d: SpectralDecomposition, g: Graph, p: Partition, c1, c2, tol: float | None = None) -> dict:
    """Both sides of the cell-orthogonality equivalence, per eigenvalue and overall.

    ``projection_constant``: the projections of e_u (u in C2) onto span{Y_λ : C1}
    coincide. ``orthogonal``: span{Y_λ : C1} ⊥ span{Y_λ : C2}.
    """
    c1, c2 = tuple(c1), tuple(c2)
    if len(c1) < 2 or len(c2) < 2:
        raise ContractError("cells must not be singletons")
    tol = d.tol if tol is None else tol
    per = []
    for y in residual_spaces(g, p, d):
        x1 = span_of(y.project(np.eye(g.n)[:, list(c1)]), d.config.rank_tol)
        x2 = span_of(y.project(np.eye(g.n)[:, list(c2)]), d.config.rank_tol)
        proj = x1.basis.T[:, list(c2)] if x1.dim else np.zeros((0, len(c2)))
        constant = bool(proj.size == 0 or np.max(np.abs(proj - proj[:, :1])) <= tol)
        orth = bool(x1.dim == 0 or x2.dim == 0 or np.max(np.abs(x1.basis.T @ x2.basis)) <= tol)
        per.append({"projection_constant": constant, "orthogonal": orth})
    return {
        "projection_constant": all(x["projection_constant"] for x in per),
        "orthogonal": all(x["orthogonal"] for x in per),
        "per_eigenvalue": per,
    }
