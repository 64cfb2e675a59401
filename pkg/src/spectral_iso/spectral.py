"""Eigendecomposition of A(G) by cyclic Jacobi rotations and the subspace algebra built on it."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import DEFAULT, Config


class NumericalError(RuntimeError):
    pass


class ContainmentError(ValueError):
    pass


# Jacobi eigensolver

@lru_cache(maxsize=64)
def _round_robin(m: int):
    """Pairings of 0..m-1 (m even) so that every pair meets once in m-1 rounds."""
    idx = list(range(m))
    rounds = []
    for _ in range(m - 1):
        rounds.append(tuple((idx[i], idx[m - 1 - i]) for i in range(m // 2)))
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return tuple(rounds)


def _offdiag(a) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(a, max_sweeps: int = 100):
    """Eigenvalues and eigenvectors of a symmetric matrix.

    Cyclic Jacobi with round-robin ordering, so the n/2 disjoint rotations of one
    round are applied together. Returns ``(w, V)`` with ``a @ V = V @ diag(w)``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n <= 1:
        return np.diag(a).copy(), v
    m = n + (n % 2)
    rounds = []
    for pairs in _round_robin(m):
        ps = np.array([p for p, q in pairs if p < n and q < n], dtype=int)
        qs = np.array([q for p, q in pairs if p < n and q < n], dtype=int)
        rounds.append((ps, qs))
    fro = np.linalg.norm(a)
    thresh = max(fro, 1.0) * n * np.finfo(float).eps
    for sweep in range(max_sweeps):
        off = _offdiag(a)
        if off <= thresh:
            return np.diag(a).copy(), v
        for ps, qs in rounds:
            apq = a[ps, qs]
            if not np.any(np.abs(apq) > thresh * 1e-3):
                continue
            app = a[ps, ps]
            aqq = a[qs, qs]
            live = np.abs(apq) > 0
            safe = np.where(live, apq, 1.0)
            tau = (aqq - app) / (2.0 * safe)
            sgn = np.where(tau >= 0, 1.0, -1.0)
            t = np.where(live, sgn / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            rp, rq = a[ps, :].copy(), a[qs, :].copy()
            a[ps, :] = c[:, None] * rp - s[:, None] * rq
            a[qs, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, ps].copy(), a[:, qs].copy()
            a[:, ps] = cp * c - cq * s
            a[:, qs] = cp * s + cq * c
            a[ps, qs] = 0.0
            a[qs, ps] = 0.0
            vp, vq = v[:, ps].copy(), v[:, qs].copy()
            v[:, ps] = vp * c - vq * s
            v[:, qs] = vp * s + vq * c
    off = _offdiag(a)
    if off <= thresh * 1e3:
        return np.diag(a).copy(), v
    raise NumericalError(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})")


# subspaces

def mgs(vectors, rank_tol: float = 1e-9) -> np.ndarray:
    """Modified Gram-Schmidt with one re-pass; drops dependent columns."""
    x = np.array(vectors, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    scale = max((np.linalg.norm(x[:, j]) for j in range(x.shape[1])), default=0.0)
    out = []
    for j in range(x.shape[1]):
        w = x[:, j].copy()
        for _ in range(2):
            for q in out:
                w -= (q @ w) * q
        nw = np.linalg.norm(w)
        if nw > rank_tol * max(scale, 1e-300) and nw > 0:
            out.append(w / nw)
    return np.array(out).T if out else np.zeros((n, 0))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^n held by an orthonormal basis (columns of ``basis``)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def project(self, x) -> np.ndarray:
        return self.basis @ (self.basis.T @ np.asarray(x, dtype=float))

    def contains(self, x, tol: float = 1e-7) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.linalg.norm(x - self.project(x)) <= tol * max(1.0, np.linalg.norm(x)))

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, dim={self.dim})"


def span_of(vectors, rank_tol: float = 1e-9, n: int | None = None) -> Subspace:
    """Orthonormal basis of the span of ``vectors`` (columns of an array, or a list)."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        m = vectors
    else:
        vecs = [np.asarray(v, dtype=float) for v in vectors]
        if not vecs:
            if n is None:
                raise ValueError("ambient dimension needed for an empty span")
            return Subspace.zero(n)
        m = np.column_stack(vecs)
    if m.shape[1] == 0 or not np.any(m):
        return Subspace.zero(m.shape[0])
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    # floor the scale at 1 so a span of pure rounding noise comes out empty
    r = int(np.sum(s > rank_tol * max(s[0], 1.0)))
    return Subspace(mgs(u[:, :r]))


def project_onto(s: Subspace, x) -> np.ndarray:
    return s.project(x)


def intersect(s1: Subspace, s2: Subspace, tol: float = 1e-7) -> Subspace:
    """Intersection through principal angles (cosines >= 1 - tol)."""
    if s1.n != s2.n:
        raise ValueError("ambient dimension mismatch")
    if s1.dim == 0 or s2.dim == 0:
        return Subspace.zero(s1.n)
    u, cos, _ = np.linalg.svd(s1.basis.T @ s2.basis)
    k = int(np.sum(cos >= 1 - tol))
    return Subspace(mgs(s1.basis @ u[:, :k]))


def intersect_all(spaces, tol: float = 1e-7) -> Subspace:
    spaces = list(spaces)
    out = spaces[0]
    for s in spaces[1:]:
        out = intersect(out, s, tol)
    return out


def complement_within(inner: Subspace, outer: Subspace, tol: float = 1e-7) -> Subspace:
    """Orthogonal complement of ``inner`` inside ``outer``."""
    if inner.n != outer.n:
        raise ValueError("ambient dimension mismatch")
    if inner.dim:
        resid = inner.basis - outer.project(inner.basis)
        if np.max(np.linalg.norm(resid, axis=0)) > tol:
            raise ContainmentError("inner subspace is not contained in outer")
    k = outer.dim - inner.dim
    if k <= 0:
        return Subspace.zero(outer.n)
    if inner.dim == 0:
        return outer
    m = outer.basis - inner.basis @ (inner.basis.T @ outer.basis)
    u, _, _ = np.linalg.svd(m, full_matrices=False)
    return Subspace(mgs(u[:, :k]))


def orth_sum(*spaces: Subspace, rank_tol: float = 1e-9) -> Subspace:
    """Span of the union of several subspaces."""
    n = spaces[0].n
    cols = [s.basis for s in spaces if s.dim]
    if not cols:
        return Subspace.zero(n)
    return span_of(np.hstack(cols), rank_tol)


def subspace_equal(s1: Subspace, s2: Subspace, tol: float = 1e-7) -> bool:
    if s1.n != s2.n:
        return False
    return bool(np.linalg.norm(s1.projector - s2.projector) <= tol)


def fixed_subspace(sigma) -> Subspace:
    """Vectors fixed by the coordinate permutation ``sigma`` (0-based images)."""
    n = len(sigma)
    seen = [False] * n
    cols = []
    for i in range(n):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = sigma[j]
        col = np.zeros(n)
        col[cyc] = 1.0 / np.sqrt(len(cyc))
        cols.append(col)
    return Subspace(np.column_stack(cols) if cols else np.zeros((0, 0)))


# decomposition

@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: tuple
    bases: tuple
    adjacency: np.ndarray
    scale: float
    config: Config = DEFAULT
    near_gaps: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def multiplicities(self) -> tuple:
        return tuple(b.shape[1] for b in self.bases)

    @property
    def t(self) -> int:
        return len(self.eigenvalues)

    @property
    def tol(self) -> float:
        """Absolute inner-product tolerance."""
        return self.config.tol * self.scale

    def space(self, k: int) -> Subspace:
        return Subspace(self.bases[k])

    def projector(self, k: int) -> np.ndarray:
        key = ("P", k)
        if key not in self._cache:
            b = self.bases[k]
            p = b @ b.T
            p.setflags(write=False)
            self._cache[key] = p
        return self._cache[key]

    def project(self, k: int, x) -> np.ndarray:
        b = self.bases[k]
        return b @ (b.T @ np.asarray(x, dtype=float))

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(f"{x:.12g}") + 0.0 for x in self.eigenvalues],
            "multiplicities": list(self.multiplicities),
        }


def eigendecompose(a, config: Config = DEFAULT, cluster_tol: float | None = None) -> SpectralDecomposition:
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n or n < 1:
        raise ValueError("need a non-empty square matrix")
    if np.max(np.abs(a - a.T)) > 1e-12:
        raise ValueError("matrix is not symmetric")
    scale = max(1.0, float(np.max(np.sum(np.abs(a), axis=1))))
    ctol = (config.cluster_tol if cluster_tol is None else cluster_tol) * scale
    w, v = jacobi_eigh(a)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    groups = [[0]]
    gaps = []
    for i in range(1, n):
        gap = w[i - 1] - w[i]
        if gap <= ctol:
            groups[-1].append(i)
        else:
            if gap <= 10 * ctol:
                gaps.append((float(w[i - 1]), float(w[i])))
            groups.append([i])
    if gaps:
        warnings.warn(f"eigenvalue gaps within 10x cluster_tol: {gaps}", RuntimeWarning, stacklevel=2)
    vals, bases = [], []
    res_tol = 1e-9 * scale
    for g in groups:
        lam = float(np.mean(w[g]))
        basis = mgs(v[:, g])
        if basis.shape[1] != len(g):
            raise NumericalError("eigenvector block lost rank during orthonormalization")
        resid = np.linalg.norm(a @ basis - lam * basis, axis=0)
        if np.max(resid) > res_tol:
            raise NumericalError(f"eigen-residual {np.max(resid):.3e} exceeds {res_tol:.1e}")
        basis.setflags(write=False)
        vals.append(lam)
        bases.append(basis)
    a_ro = a.copy()
    a_ro.setflags(write=False)
    return SpectralDecomposition(tuple(vals), tuple(bases), a_ro, scale, config, tuple(gaps))


def decompose_graph(g, config: Config = DEFAULT) -> SpectralDecomposition:
    return eigendecompose(g.adjacency, config)


def project_basis_vector(d: SpectralDecomposition, k: int, v: int) -> np.ndarray:
    if not 0 <= k < d.t:
        raise IndexError("eigenvalue index out of range")
    if not 0 <= v < d.n:
        raise IndexError("vertex out of range")
    return d.projector(k)[:, v].copy()


def reconstruction_error(d: SpectralDecomposition) -> float:
    total = sum(lam * d.projector(k) for k, lam in enumerate(d.eigenvalues))
    return float(np.linalg.norm(d.adjacency - total))
