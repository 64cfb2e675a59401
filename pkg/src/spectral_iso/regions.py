"""Regions cut out of a subspace by the dividers p_x^⊥, and the peeling partition Π[V_λ; v]."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partition import ContractError, Partition, group_rows
from .spectral import SpectralDecomposition, Subspace, complement_within, span_of


class OnDividerError(ContractError):
    pass


class ZeroProjectionError(ContractError):
    pass


def sign_vector(x, zero_tol: float = 1e-7) -> np.ndarray:
    """Entrywise sign; entries within zero_tol·‖x‖∞ of zero count as 0."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return np.zeros(0, dtype=np.int8)
    thr = zero_tol * np.max(np.abs(x))
    out = np.sign(x).astype(np.int8)
    out[np.abs(x) <= thr] = 0
    return out


def _lemma_members(rows: np.ndarray, xc: np.ndarray, zero_tol: float, rank_tol: float) -> np.ndarray:
    """Sign test sgn proj(s_u) == s_u for every coordinate u.

    ``rows`` holds the divider normals in coordinates (one row per candidate), so
    the region's sign vectors live in the column space of ``rows``; ``xc`` is the
    witness expressed in the same coordinates.
    """
    m = rows.shape[0]
    y = span_of(rows, rank_tol).basis
    s = sign_vector(xc, zero_tol).astype(float)
    su = np.tile(s, (m, 1))
    su[np.arange(m), np.arange(m)] = 0.0
    proj = (su @ y) @ y.T
    ok = np.empty(m, dtype=bool)
    for u in range(m):
        ok[u] = np.array_equal(sign_vector(proj[u], zero_tol), su[u].astype(np.int8))
    return ok


def incidence_set(x_space: Subspace, ref, candidates, tol: float = 1e-7, zero_tol: float = 1e-7,
                  rank_tol: float = 1e-9) -> np.ndarray:
    """Incidence set of the region of ``x_space`` containing ``ref``.

    Dividers are p_c = proj(e_c) for c in ``candidates``. If ``ref`` lies on some
    dividers the test runs inside the intersection of those dividers and only the
    remaining candidates can be members.
    """
    cands = np.asarray(candidates, dtype=int)
    ref = np.asarray(ref, dtype=float)
    if len(cands) == 0 or x_space.dim == 0:
        return cands[:0]
    q = x_space.basis
    coords = q[cands]
    nz = np.linalg.norm(coords, axis=1) > tol
    vals = coords @ (q.T @ ref)
    on = nz & (np.abs(vals) <= tol)
    if np.any(on):
        dividers = span_of(q[cands[on]].dot(q.T).T, rank_tol)
        x_space = complement_within(dividers, x_space, tol=max(tol, 1e-7))
        q = x_space.basis
        coords = q[cands]
        live = (np.linalg.norm(coords, axis=1) > tol) & ~on
    else:
        live = nz
    idx = cands[live]
    if len(idx) == 0 or x_space.dim == 0:
        return cands[:0]
    refc = q.T @ ref
    xc = q[idx] @ refc
    if x_space.dim == 1:
        return idx[xc > tol]
    return idx[_lemma_members(q[idx], xc, zero_tol, rank_tol)]


def incidence_membership(x_space: Subspace, x, u: int, tol: float = 1e-7, zero_tol: float = 1e-7) -> bool:
    """Membership of u in the incidence set of the region containing x.

    All vertices with a nonzero projection act as dividers. For a 1-dimensional
    space the regions are the two rays, and u is a member when p_u points along x.
    """
    x = np.asarray(x, dtype=float)
    if not x_space.contains(x, tol):
        raise ContractError("x must lie in X")
    pu = x_space.basis[u]
    if np.linalg.norm(pu) <= tol:
        raise ZeroProjectionError(f"proj_X(e_{u + 1}) is zero")
    xc_u = float(pu @ (x_space.basis.T @ x))
    if abs(xc_u) <= tol:
        raise OnDividerError(f"x lies on the divider of {u + 1}")
    if x_space.dim == 1:
        return xc_u > 0
    q = x_space.basis
    live = np.nonzero(np.linalg.norm(q, axis=1) > tol)[0]
    xc = q[live] @ (q.T @ x)
    ok = _lemma_members(q[live], xc, zero_tol, 1e-9)
    return bool(ok[list(live).index(u)])


def region_indicator(x_space: Subspace, members, reference, tol: float = 1e-7) -> np.ndarray:
    """Σ sgn(<ref, p_x>)/‖p_x‖ · p_x over members; terms with sign 0 are dropped."""
    reference = np.asarray(reference, dtype=float)
    out = np.zeros(x_space.n)
    for x in members:
        p = x_space.basis @ x_space.basis[x]
        nrm = np.linalg.norm(p)
        if nrm <= tol:
            raise ContractError(f"member {x + 1} has zero projection")
        s = p @ reference
        if abs(s) > tol:
            out += np.sign(s) / nrm * p
    return out


@dataclass(frozen=True)
class LayeredPartition:
    """Cells with the peel layer they came from (0 = orthogonal to the anchor)."""

    partition: Partition
    layers: tuple
    values: tuple
    span_ok: tuple

    @property
    def cells(self) -> tuple:
        return self.partition.cells


def _type_keys(proj: np.ndarray, members) -> np.ndarray:
    return np.sort(proj[:, list(members)], axis=0).T


def peel(proj: np.ndarray, anchor, candidates=None, tol: float = 1e-7, zero_tol: float = 1e-7,
         rank_tol: float = 1e-9) -> tuple:
    """Region peeling of ``candidates`` inside the working space with projector ``proj``.

    Returns ``(cells, layers, values, span_ok)``; cells come in peel order and
    within a layer by (type, angle with the anchor). ``values`` carries the
    numbers that separated each cell, used as its signature.
    """
    n = proj.shape[0]
    cands = np.arange(n) if candidates is None else np.asarray(sorted(candidates), dtype=int)
    anchor = np.asarray(anchor, dtype=float)
    angle = proj @ anchor
    cells, layers, values, span_ok = [], [], [], []

    def emit(members, layer):
        members = np.asarray(members, dtype=int)
        tkeys = _type_keys(proj, members)
        keys = np.column_stack([tkeys, angle[members]])
        for grp in group_rows(keys, tol):
            sub = members[grp]
            cells.append(tuple(int(x) for x in sub))
            layers.append(layer)
            values.append((layer, float(angle[sub[0]]), float(proj[sub[0], sub[0]])))

    thin = cands[np.abs(angle[cands]) <= tol]
    if len(thin):
        emit(thin, 0)
    rest = cands[np.abs(angle[cands]) > tol]
    layer = 0
    while len(rest):
        layer += 1
        if layer > n:
            raise RuntimeError("region peeling did not terminate")
        xk = span_of(proj[:, rest], rank_tol)
        ref = xk.project(anchor)
        members = incidence_set(xk, ref, rest, tol, zero_tol, rank_tol)
        if len(members) == 0:
            # no separator detected: the remaining candidates form one layer
            members = rest
        span_ok.append(span_of(xk.project(np.eye(n)[:, members]), rank_tol).dim == xk.dim)
        emit(members, layer)
        rest = np.setdiff1d(rest, members)
    return cells, layers, values, span_ok


def region_peel_partition(d: SpectralDecomposition, k: int, v: int) -> LayeredPartition:
    """Π[V_λ; v] for the k-th eigenvalue of ``d``."""
    proj = d.projector(k)
    cfg = d.config
    cells, layers, values, span_ok = peel(proj, proj[:, v], None, d.tol, cfg.zero_tol, cfg.rank_tol)
    return LayeredPartition(Partition(d.n, tuple(cells)), tuple(layers), tuple(values), tuple(span_ok))
