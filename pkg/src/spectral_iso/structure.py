"""Global structure: the uniform partition, partition graphs, primitivity, block candidates and subspace cascades."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key

import numpy as np

from .balanced import BalancedPartition, Refiner, is_complete_configuration
from .graph_io import Graph
from .partition import Partition, refine_equitable, residual_spaces
from .spectral import SpectralDecomposition, Subspace, complement_within, orth_sum, span_of


# cell correspondences

def corresponds(a: BalancedPartition, b: BalancedPartition, tol: float) -> bool:
    """φ_uv is defined: both refinements took the same steps with the same values."""
    if a.signature != b.signature or len(a.values) != len(b.values):
        return False
    if not a.values:
        return True
    return bool(np.max(np.abs(np.subtract(a.values, b.values))) <= 10 * tol)


def _profile(d: SpectralDecomposition, bp: BalancedPartition) -> np.ndarray:
    """Coordinates of proj_λ(R_{C_i}) restricted to each C_j, sorted within C_j."""
    r = bp.partition.characteristic_matrix()
    parts = []
    for k in range(d.t):
        m = d.projector(k) @ r
        for c in bp.cells:
            parts.append(np.sort(m[list(c)], axis=0).ravel())
    return np.concatenate(parts) if parts else np.zeros(0)


def _cmp_values(a, b, tol):
    if len(a) != len(b):
        return -1 if len(a) < len(b) else 1
    diff = np.nonzero(np.abs(np.subtract(a, b)) > tol)[0]
    if len(diff) == 0:
        return 0
    i = diff[0]
    return -1 if a[i] < b[i] else 1


def vertex_classes(d: SpectralDecomposition, vps, tol: float | None = None) -> list:
    """Classes of u ↔ v (matching correspondences and restricted coordinate multisets),
    in an order that depends only on the partitions' data."""
    tol = d.tol if tol is None else tol
    profiles = [_profile(d, bp) for bp in vps]
    classes = []
    for v, bp in enumerate(vps):
        for cls in classes:
            r = cls[0]
            if corresponds(vps[r], bp, tol) and len(profiles[r]) == len(profiles[v]) and (
                    len(profiles[v]) == 0 or np.max(np.abs(profiles[r] - profiles[v])) <= 10 * tol):
                cls.append(v)
                break
        else:
            classes.append([v])

    def cmp(c1, c2):
        a, b = vps[c1[0]], vps[c2[0]]
        if a.signature != b.signature:
            return -1 if repr(a.signature) < repr(b.signature) else 1
        out = _cmp_values(a.values, b.values, 10 * tol)
        return out or _cmp_values(profiles[c1[0]], profiles[c2[0]], 10 * tol)

    return sorted(classes, key=cmp_to_key(cmp))


def uniform_partition(d: SpectralDecomposition, g: Graph, vertex_partitions) -> Partition:
    """Π̄[⊕V_λ]: vertex classes refined to an equitable partition."""
    classes = vertex_classes(d, vertex_partitions)
    return refine_equitable(g, Partition(g.n, tuple(tuple(c) for c in classes)))


# partition graphs

@dataclass(frozen=True)
class PartitionGraph:
    mode: str
    parts: tuple
    components: tuple
    domain: tuple

    def component_of(self, x: int) -> tuple:
        return next(c for c in self.components if x in c)

    @property
    def connected(self) -> bool:
        return len(self.components) == 1

    @property
    def perfect_matching(self) -> bool:
        """Every part restricted to the domain is discrete, so each component is one edge."""
        dom = set(self.domain)
        return all(len(set(c) & dom) <= 1 for p in self.parts for c in p.cells)


def _union_components(parts, domain) -> tuple:
    dom = sorted(domain)
    parent = {x: x for x in dom}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    inside = set(dom)
    for p in parts:
        for c in p.cells:
            c = [x for x in c if x in inside]
            for x in c[1:]:
                a, b = find(c[0]), find(x)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    comps = {}
    for x in dom:
        comps.setdefault(find(x), []).append(x)
    return tuple(sorted(tuple(c) for c in comps.values()))


def bipartite_components(pa: Partition, pb: Partition, domain=None) -> PartitionGraph:
    if pa.n != pb.n:
        raise ValueError("ground-set mismatch")
    dom = tuple(range(pa.n)) if domain is None else tuple(sorted(domain))
    return PartitionGraph("bipartite", (pa, pb), _union_components((pa, pb), dom), dom)


def multipartite_block_system(partitions_over_t: dict, t) -> list:
    """Components of the multipartite partition graph restricted to T."""
    return list(_union_components(list(partitions_over_t.values()), t))


def _is_prime(m: int) -> bool:
    return m >= 2 and all(m % q for q in range(2, int(m ** 0.5) + 1))


@dataclass(frozen=True)
class PrimitivityResult:
    kind: str  # Connected | PrimeMatching | Imprimitive
    block: tuple | None = None
    approx: bool = False


def primitivity_test(partitions_over_t: dict, t, approx: bool = False) -> PrimitivityResult:
    t = tuple(sorted(t))
    if len(t) <= 1:
        return PrimitivityResult("Connected", approx=approx)
    all_conn = all_match = True
    witnesses = []
    for i, a in enumerate(t):
        for b in t[i + 1:]:
            pg = bipartite_components(partitions_over_t[a], partitions_over_t[b], t)
            conn, match = pg.connected, pg.perfect_matching
            all_conn &= conn
            all_match &= match
            if not conn and not match:
                for comp in pg.components:
                    if (a in comp or b in comp) and 1 < len(comp) < len(t):
                        witnesses.append(comp)
    if all_conn:
        return PrimitivityResult("Connected", approx=approx)
    if all_match and _is_prime(len(t)):
        return PrimitivityResult("PrimeMatching", approx=approx)
    # classes of equal stabilizer partitions are blocks as well
    for a in t:
        same = tuple(b for b in t if partitions_over_t[b].same_cells(partitions_over_t[a]))
        if 1 < len(same) < len(t):
            witnesses.append(same)
    block = min(witnesses, key=lambda c: (len(c), c)) if witnesses else None
    return PrimitivityResult("Imprimitive", block, approx)


# block candidates

@dataclass(frozen=True)
class BlockCandidate:
    B: tuple
    origin: str  # SingletonSet | MinComponent | PrimitivityReduction | StrongComponent | Trivial
    host: tuple
    pbg: tuple = ()
    strongly_connected: bool | None = None
    overflow: bool = False
    notes: tuple = field(default=())

    @property
    def nontrivial(self) -> bool:
        return 1 < len(self.B) < len(self.host)

    def to_json(self, verified: bool | None = None) -> dict:
        return {
            "B": [x + 1 for x in self.B],
            "origin": self.origin,
            "host": [x + 1 for x in self.host],
            "pbg_strongly_connected": self.strongly_connected,
            "is_oracle_verified": verified,
        }


def _strong_components(nodes, arcs) -> list:
    succ = {u: set() for u in nodes}
    pred = {u: set() for u in nodes}
    for u, w in arcs:
        succ[u].add(w)
        pred[w].add(u)

    def reach(start, nbr):
        seen, todo = {start}, [start]
        while todo:
            x = todo.pop()
            for y in nbr[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    left, comps = set(nodes), []
    for u in sorted(nodes):
        if u in left:
            comp = reach(u, succ) & reach(u, pred)
            comps.append(tuple(sorted(comp)))
            left -= comp
    return comps


def _admissible(b, s) -> bool:
    # a proper block of a transitive set has size dividing |S| and at most |S|/2
    return 1 < len(b) < len(s) and 2 * len(b) <= len(s) and len(s) % len(b) == 0


def select_block_candidate(d: SpectralDecomposition, g: Graph, s, vertex_partitions, cap: int = 1000) -> BlockCandidate:
    s = tuple(sorted(s))
    tol = d.tol
    vps = vertex_partitions
    x = s[0]
    px = vps[x].partition
    found = []
    for y in s[1:]:
        py = vps[y].partition
        pg = bipartite_components(px, py, s)
        if pg.connected or pg.perfect_matching:
            continue
        if px.same_cells(py):
            b1 = tuple(sorted(c[0] for c in px.cells if len(c) == 1 and c[0] in s))
            found.append((b1, "SingletonSet"))
        comp = pg.component_of(x)
        if len(comp) > 1:
            found.append((comp, "MinComponent"))
    found = [f for f in found if _admissible(f[0], s)]
    if found:
        rank = {"SingletonSet": 0, "MinComponent": 1}
        b, origin = min(found, key=lambda f: (len(f[0]), f[0], rank[f[1]]))
    else:
        b, origin = s, "Trivial"
    notes = []
    overflow = False

    # case (a): the anchor's partition is discrete on B
    in_b = [c for c in px.cells if set(c) <= set(b)]
    if len(b) > 2 and all(len(c) == 1 for c in in_b) and sum(map(len, in_b)) == len(b):
        perms = []
        for y in b:
            if len(perms) >= cap:
                overflow = True
                break
            if not corresponds(vps[x], vps[y], tol):
                continue
            py = vps[y].partition
            img = {}
            for i, c in enumerate(px.cells):
                if c[0] in b and len(c) == 1:
                    cy = py.cells[i]
                    if len(cy) == 1 and cy[0] in b:
                        img[c[0]] = cy[0]
            if len(img) == len(b) and len(set(img.values())) == len(b):
                if all(np.allclose(d.projector(k)[np.ix_(b, b)],
                                   d.projector(k)[np.ix_([img[u] for u in b], [img[u] for u in b])], atol=tol)
                       for k in range(d.t)):
                    perms.append(tuple(b.index(img[u]) for u in b))
        if perms:
            from .oracle import _closure, group_from_generators, minimal_blocks

            grp = group_from_generators(len(b), perms)
            local = tuple(range(len(b)))
            if _closure([0], grp.generators) == set(local):
                blocks = []
                for j in local[1:]:
                    sysb = minimal_blocks(grp, local, [0, j])
                    blk = next(c for c in sysb if 0 in c)
                    if len(blk) < len(b):
                        blocks.append(tuple(b[i] for i in blk))
                blocks = [c for c in blocks if _admissible(c, s)]
                if blocks:
                    b = min(blocks, key=lambda c: (len(c), c))
                    origin = "PrimitivityReduction"
                    notes.append("imprimitive action on B")

    # case (b): pseudo-block graph
    pbg, strong = (), None
    while len(b) > 1:
        if not all(bipartite_components(px, vps[y].partition, b).connected for y in b if y != x):
            break
        if x not in b:
            break
        options = [c for c in px.cells if set(c) <= set(b) and 1 < len(c) and 2 * len(c) < len(b)]
        if not options or is_complete_configuration(d, b, tol):
            notes.append("complete configuration: no PBG needed" if not options or len(b) == len(s) else "")
            break
        e = min(options, key=lambda c: (len(c), c))
        ei = px.cells.index(e)
        arcs = []
        for u in b:
            if not corresponds(vps[x], vps[u], tol):
                continue
            for w in vps[u].partition.cells[ei]:
                if w in b:
                    arcs.append((u, w))
        pbg = tuple(arcs)
        comps = _strong_components(b, arcs)
        strong = len(comps) == 1
        if strong:
            break
        nb = min(comps, key=lambda c: (len(c), c))
        if not _admissible(nb, s) and len(nb) != 1:
            break
        b, origin = nb, "StrongComponent"
        if len(b) == 1:
            break
    return BlockCandidate(tuple(b), origin, s, pbg, strong, overflow, tuple(n for n in notes if n))


def block_partition(d: SpectralDecomposition, g: Graph, b, pbar: Partition) -> Partition:
    """Π[⊕V_λ; B]: balanced refinement anchored at the projections of R_B."""
    n = g.n
    b = tuple(sorted(b))
    rb = np.zeros(n)
    rb[list(b)] = 1.0
    ys = residual_spaces(g, pbar, d)
    specs, anchors = [], {}
    for k, y in enumerate(ys):
        pb = y.project(rb)
        if np.linalg.norm(pb) > d.tol:
            specs.append((k, y.projector, pb))
            anchors[k] = pb
    if not specs:
        return Partition(n, pbar.cells, ("R_B lies in the lifted space; partition unchanged",))
    inside = set(b)
    start = []
    for c in pbar.cells:
        start.extend(p for p in (tuple(x for x in c if x in inside), tuple(x for x in c if x not in inside)) if p)
    bp = Refiner(d, g).run(start, specs, anchors, anchor=b)
    return bp.partition


# cascades

@dataclass(frozen=True)
class Cascade:
    eigen_index: int
    y: Subspace
    parts: tuple  # (cell index, Subspace)
    residual: Subspace
    error: float

    def subspaces(self) -> list:
        return [s for _, s in self.parts] + [self.residual]


def subspace_cascade(d: SpectralDecomposition, g: Graph, p: Partition) -> list:
    """Greedy orthogonal decomposition Y_λ = ⊕ X_{λ,S_ik} ⊕ Z for every λ."""
    n = g.n
    order = sorted(range(len(p.cells)), key=lambda i: (len(p.cells[i]), i))
    out = []
    eye = np.eye(n)
    for k, y in enumerate(residual_spaces(g, p, d)):
        chosen = []
        for i in order:
            xs = span_of(y.project(eye[:, list(p.cells[i])]), d.config.rank_tol)
            if xs.dim == 0:
                continue
            if all(np.max(np.abs(xs.basis.T @ s.basis)) <= d.tol for _, s in chosen):
                chosen.append((i, xs))
        total = orth_sum(*[s for _, s in chosen]) if chosen else Subspace.zero(n)
        z = complement_within(total, y, tol=1e-6)
        recon = sum((s.projector for _, s in chosen), np.zeros((n, n))) + z.projector
        out.append(Cascade(k, y, tuple(chosen), z, float(np.linalg.norm(y.projector - recon))))
    return out
