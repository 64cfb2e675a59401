"""Ground-truth permutation-group computations by exhaustive search.

Nothing here touches eigenvectors: automorphisms come from individualisation
and plain colour refinement with an exact adjacency check at every leaf.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph_io import Graph
from .partition import ContractError, Partition, _equitable_cells, lifted_eigenspace
from .spectral import SpectralDecomposition, fixed_subspace, intersect_all, subspace_equal

MAX_ELEMENTS = 10**6


class OracleCapacityError(RuntimeError):
    pass


def compose(p, q) -> tuple:
    """(p∘q)(x) = p[q[x]]."""
    return tuple(p[x] for x in q)


def inverse(p) -> tuple:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def cycle_notation(p) -> str:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def _closure(points, gens) -> set:
    seen = set(points)
    todo = deque(seen)
    while todo:
        x = todo.popleft()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


@dataclass
class PermGroup:
    n: int
    generators: tuple
    order: int
    graph: Graph | None = None
    start: tuple | None = None
    _elements: list | None = field(default=None, repr=False)

    def orbit(self, x: int) -> set:
        return _closure([x], self.generators)

    def orbits(self, domain=None) -> Partition:
        dom = range(self.n) if domain is None else sorted(domain)
        seen, cells = set(), []
        for x in dom:
            if x in seen:
                continue
            orb = self.orbit(x)
            seen |= orb
            cells.append(tuple(sorted(orb)))
        if domain is None:
            return Partition(self.n, tuple(cells))
        return cells

    def elements(self) -> list:
        if self._elements is None:
            if self.order > MAX_ELEMENTS:
                raise OracleCapacityError(f"group of order {self.order} exceeds the element cap")
            ident = tuple(range(self.n))
            seen = {ident}
            todo = deque([ident])
            while todo:
                p = todo.popleft()
                for g in self.generators:
                    q = compose(g, p)
                    if q not in seen:
                        seen.add(q)
                        todo.append(q)
            self._elements = sorted(seen)
        return self._elements

    def is_block(self, block) -> bool:
        # generators alone do not suffice: a product can split a set every generator keeps whole
        b = set(block)
        for g in self.elements():
            img = {g[x] for x in b}
            if img != b and img & b:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "generators": [cycle_notation(g) for g in self.generators],
            "orbits": [[x + 1 for x in c] for c in self.orbits().cells],
        }


# search

def _refine(adj, cells):
    trace = []
    out = _equitable_cells(adj, cells, trace)
    return out, trace


def _individualize(cells, i, v):
    c = cells[i]
    return cells[:i] + ((v,), tuple(x for x in c if x != v)) + cells[i + 1:]


def _target(cells) -> int:
    best = None
    for i, c in enumerate(cells):
        if len(c) > 1 and (best is None or len(c) < len(cells[best])):
            best = i
    return best


def _is_automorphism(g: Graph, perm) -> bool:
    return all(g.has_edge(perm[u], perm[v]) for u, v in g.edges)


def _extend(g: Graph, h: Graph, ca, cb):
    """A bijection carrying the ordered partition ca of G onto cb of H that maps
    edges onto edges, or None."""
    ca, ta = _refine(g.adjacency, ca)
    cb, tb = _refine(h.adjacency, cb)
    if ta != tb or tuple(map(len, ca)) != tuple(map(len, cb)):
        return None
    i = _target(ca)
    if i is None:
        perm = [0] * g.n
        for x, y in zip(ca, cb):
            perm[x[0]] = y[0]
        ok = len(g.edges) == len(h.edges) and all(h.has_edge(perm[u], perm[v]) for u, v in g.edges)
        return tuple(perm) if ok else None
    u = ca[i][0]
    na = _individualize(ca, i, u)
    for w in cb[i]:
        r = _extend(g, h, na, _individualize(cb, i, w))
        if r is not None:
            return r
    return None


def automorphism_group(g: Graph, cap: int = 12, start: Partition | None = None, fixed=()) -> PermGroup:
    """Aut(G), optionally restricted to permutations preserving every cell of ``start``
    and fixing every vertex in ``fixed``."""
    if g.n > cap:
        raise OracleCapacityError(f"n={g.n} exceeds the oracle cap {cap}")
    adj = g.adjacency
    cells = tuple(start.cells) if start is not None else ((tuple(range(g.n)),) if g.n else ())
    for v in fixed:
        i = next(j for j, c in enumerate(cells) if v in c)
        if len(cells[i]) > 1:
            cells = _individualize(cells, i, v)
    gens: list = []
    order = 1

    def level(cells):
        nonlocal order
        cells, _ = _refine(adj, cells)
        i = _target(cells)
        if i is None:
            return
        b = cells[i][0]
        level(_individualize(cells, i, b))
        orbit = _closure([b], gens)
        here = _individualize(cells, i, b)
        for w in cells[i]:
            if w in orbit:
                continue
            sigma = _extend(g, g, here, _individualize(cells, i, w))
            if sigma is not None:
                gens.append(sigma)
                orbit = _closure([b], gens)
        order *= len(orbit)

    level(cells)
    return PermGroup(g.n, tuple(gens), order, g, tuple(cells))


def orbits(group: PermGroup, domain=None):
    return group.orbits(domain)


def stabilizer(group: PermGroup, sequence) -> PermGroup:
    """Pointwise stabilizer of ``sequence``."""
    seq = [int(v) for v in sequence]
    if group.graph is not None:
        start = Partition(group.n, group.start) if group.start else None
        return automorphism_group(group.graph, cap=max(group.n, 1), start=start, fixed=seq)
    keep = [p for p in group.elements() if all(p[v] == v for v in seq)]
    return _from_elements(group.n, keep)


def setwise_stabilizer(group: PermGroup, block) -> PermGroup:
    b = set(block)
    keep = [p for p in group.elements() if {p[x] for x in b} == b]
    return _from_elements(group.n, keep)


def _from_elements(n, elems) -> PermGroup:
    ident = tuple(range(n))
    gens = []
    span = {ident}
    for p in elems:
        if p not in span:
            gens.append(p)
            span = set(PermGroup(n, tuple(gens), len(elems)).elements())
    grp = PermGroup(n, tuple(gens), len(elems))
    grp._elements = sorted(elems)
    return grp


def fastening_sequence(group: PermGroup):
    """Greedy fastening sequence and the chain of stabilizer orbit partitions."""
    seq, chain = [], []
    cur = group
    while cur.order > 1:
        nontrivial = [c for c in cur.orbits().cells if len(c) > 1]
        seq.append(nontrivial[0][0])
        cur = stabilizer(group, seq)
        chain.append(cur.orbits())
    return seq, chain


def minimal_blocks(group: PermGroup, orbit, seed) -> list:
    """Block system generated by the smallest block containing ``seed`` (union-find)."""
    t = sorted(orbit)
    seed = list(seed)
    if len(seed) < 2 or not set(seed) <= set(t):
        raise ContractError("seed must hold at least two points of the orbit")
    if _closure([t[0]], group.generators) != set(t):
        raise ContractError("group is not transitive on the given orbit")
    parent = {x: x for x in t}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    todo = deque()
    for s in seed[1:]:
        a, b = find(seed[0]), find(s)
        if a != b:
            parent[b] = a
            todo.append((seed[0], s))
    while todo:
        x, y = todo.popleft()
        for g in group.generators:
            a, b = find(g[x]), find(g[y])
            if a != b:
                parent[b] = a
                todo.append((g[x], g[y]))
    classes = {}
    for x in t:
        classes.setdefault(find(x), []).append(x)
    return sorted(tuple(c) for c in classes.values())


def block_containing(group: PermGroup, orbit, points) -> tuple:
    pts = sorted(points)
    if len(pts) < 2:
        return tuple(pts)
    for b in minimal_blocks(group, orbit, pts):
        if pts[0] in b:
            return b
    raise AssertionError("unreachable")


def block_chain(group: PermGroup, orbit) -> list:
    """Maximal chain {t} = B_1 ⊊ B_2 ⊊ ... ⊊ B_m ⊊ T, each B_{i+1} minimal above B_i."""
    t = sorted(orbit)
    chain = [(t[0],)]
    while len(chain[-1]) < len(t):
        cur = chain[-1]
        options = [block_containing(group, t, list(cur) + [b]) for b in t if b not in cur]
        nxt = min(options, key=lambda b: (len(b), b))
        if len(nxt) == len(t):
            break
        chain.append(nxt)
    return chain


def is_regular_system(group: PermGroup, block) -> bool:
    """The setwise stabilizer of ``block`` fixes every block of its system."""
    system = {tuple(sorted(p[x] for x in block)) for p in group.elements()}
    stab = [p for p in group.elements() if {p[x] for x in block} == set(block)]
    return all({p[x] for x in b} == set(b) for p in stab for b in system)


def block_families(group: PermGroup, orbit, limit: int = 64) -> list:
    """Every maximal chain {t} = B_1 ⊊ ... ⊊ B_m ⊊ T (each B_i maximal in B_{i+1}), up to ``limit``."""
    t = sorted(orbit)
    out = []

    def covers(cur):
        opts = {block_containing(group, t, list(cur) + [b]) for b in t if b not in cur}
        opts = [o for o in opts if len(o) < len(t)]
        return sorted(o for o in opts if not any(set(q) < set(o) for q in opts))

    def rec(chain):
        if len(out) >= limit:
            return
        nxt = covers(chain[-1])
        if not nxt:
            out.append(chain)
            return
        for b in nxt:
            rec(chain + [b])

    rec([(t[0],)])
    return out


def gamma_choices(group: PermGroup, orbit, chain=None) -> list:
    """For each regular system of the chain, the valid γ (moves B_i, fixes B_{i+1})."""
    t = tuple(sorted(orbit))
    chain = block_chain(group, t) if chain is None else chain
    nxt = list(chain[1:]) + [t]
    out = []
    for bi, bj in zip(chain, nxt):
        if not is_regular_system(group, bi):
            continue
        si, sj = set(bi), set(bj)
        valid = [p for p in group.elements() if {p[x] for x in si} != si and {p[x] for x in sj} == sj]
        if valid:
            out.append(valid)
    return out


def orbit_equation_context(group: PermGroup, orbit) -> tuple:
    """Stabilizer orbit partitions of every t in T and the γ choices of every block family.

    Nothing here depends on λ, so one context serves all eigenvalues.
    """
    t = sorted(orbit)
    families = block_families(group, t)
    return [stabilizer(group, [x]).orbits() for x in t], [gamma_choices(group, t, f) for f in families]


def verify_orbit_equation(g: Graph, d: SpectralDecomposition, group: PermGroup, orbit, k: int,
                          tol: float = 1e-7, retries: int = 10, seed: int = 0, context=None) -> dict:
    """Compare R_{Π*} V_λ^{G/Π*} with the stabilizer/γ intersection for orbit T.

    Block families are tried in order; within a family the first valid γ per
    regular system is used, then up to ``retries`` random valid choices.
    """
    stab_parts, per_family = context if context is not None else orbit_equation_context(group, orbit)
    lhs = lifted_eigenspace(g, group.orbits(), d, k)
    stab_spaces = [lifted_eigenspace(g, p, d, k) for p in stab_parts]
    base = intersect_all(stab_spaces, tol)
    rng = random.Random(seed)
    rhs = base
    for fam, choices in enumerate(per_family):
        attempts = [[c[0] for c in choices]]
        if choices:
            attempts += [[rng.choice(c) for c in choices] for _ in range(retries)]
        for gammas in attempts:
            rhs = intersect_all([base] + [fixed_subspace(p) for p in gammas], tol)
            if subspace_equal(lhs, rhs, tol):
                return {"lhs_dim": lhs.dim, "rhs_dim": rhs.dim, "equal": True, "gammas": len(gammas),
                        "family": fam, "families": len(per_family)}
    return {"lhs_dim": lhs.dim, "rhs_dim": rhs.dim, "equal": False, "gammas": None,
            "family": None, "families": len(per_family)}


def brute_force_isomorphism(g: Graph, h: Graph):
    """An isomorphism G -> H found by exhaustive individualisation, or None."""
    if g.n != h.n or len(g.edges) != len(h.edges):
        return None
    if g.n == 0:
        return ()
    unit = (tuple(range(g.n)),)
    return _extend(g, h, unit, unit)


def permutation_isomorphic(g: Graph, h: Graph) -> bool:
    """Plain enumeration over all n! bijections (small n only)."""
    from itertools import permutations

    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    return any(all(h.has_edge(p[u], p[v]) for u, v in g.edges) for p in permutations(range(g.n)))


def group_from_generators(n: int, generators) -> PermGroup:
    """Group generated by explicit permutations (order found by enumeration)."""
    gens = tuple(tuple(int(x) for x in p) for p in generators)
    grp = PermGroup(n, gens, 0)
    grp.order = MAX_ELEMENTS
    grp.order = len(grp.elements())
    return grp
