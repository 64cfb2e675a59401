"""Graph values, graph6 and edge-list parsing, named graph generators and the small-graph corpus.

Vertices are 0-based inside the package and 1-based in every text or JSON format.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np


class ParseError(ValueError):
    """Malformed graph text. ``offset`` locates the offending byte or line."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        clean = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at vertex {u + 1}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u + 1, v + 1)} out of range for n={self.n}")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=float)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        a.setflags(write=False)
        return a

    @cached_property
    def neighbors(self) -> tuple:
        nb = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return tuple(tuple(sorted(x)) for x in nb)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def relabel(self, perm) -> "Graph":
        """Image of the graph under ``perm`` (vertex ``u`` becomes ``perm[u]``)."""
        return Graph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [[u + 1, v + 1] for u, v in self.sorted_edges()]}

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"


# graph6

def parse_graph6(text: str) -> Graph:
    """Decode a graph6 string (n <= 62).

    Offsets in errors count bytes of the edge section, i.e. after the size byte.
    """
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise ParseError("empty graph6 string", 0)
    head = ord(s[0])
    if head == 126:
        raise ParseError("graph6 with more than 62 vertices is not supported", 0)
    if not 63 <= head <= 125:
        raise ParseError("size byte outside 63..125", 0)
    n = head - 63
    body = s[1:]
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    for i, ch in enumerate(body):
        if not 63 <= ord(ch) <= 126:
            raise ParseError(f"byte {ch!r} outside 63..126", i)
    if len(body) < nbytes:
        raise ParseError(f"expected {nbytes} edge bytes, got {len(body)}", len(body))
    if len(body) > nbytes:
        raise ParseError("trailing bytes after edge data", nbytes)
    bits = []
    for ch in body:
        val = ord(ch) - 63
        bits.extend((val >> (5 - k)) & 1 for k in range(6))
    if any(bits[nbits:]):
        raise ParseError("non-zero padding bits", nbytes - 1)
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def to_graph6(g: Graph) -> str:
    if g.n > 62:
        raise ValueError("graph6 output limited to n <= 62")
    bits = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = (val << 1) | b
        out.append(chr(val + 63))
    return "".join(out)


# edge lists

def parse_edge_list(text: str) -> Graph:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    rows = [(i, ln) for i, ln in enumerate(lines) if ln]
    if not rows:
        raise ParseError("missing vertex count", 0)
    try:
        n = int(rows[0][1])
    except ValueError:
        raise ParseError("first line must be the vertex count", rows[0][0]) from None
    if n < 0:
        raise ParseError("negative vertex count", rows[0][0])
    edges = []
    for lineno, ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v', got {ln!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer vertex in {ln!r}", lineno) from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"vertex out of range 1..{n} in {ln!r}", lineno)
        if u == v:
            raise ParseError(f"self-loop {ln!r}", lineno)
        edges.append((u - 1, v - 1))
    return Graph.from_edges(n, edges)


def to_edge_list(g: Graph) -> str:
    return "\n".join([str(g.n)] + [f"{u + 1} {v + 1}" for u, v in g.sorted_edges()]) + "\n"


# named graphs

def complete(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def empty(n: int) -> Graph:
    return Graph(n)


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(k: int) -> Graph:
    """K_{1,k}: centre 1 and leaves 2..k+1."""
    return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def complete_bipartite(m: int, n: int) -> Graph:
    return Graph.from_edges(m + n, [(i, m + j) for i in range(m) for j in range(n)])


def cube() -> Graph:
    # vertex i+1 carries the bit string of i, so 1 and 8 are antipodal
    return Graph.from_edges(8, [(i, i ^ (1 << b)) for i in range(8) for b in range(3) if i < i ^ (1 << b)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def circulant(n: int, connections) -> Graph:
    conn = set(int(c) for c in connections)
    if any(c % n == 0 for c in conn):
        raise ValueError("circulant connection set must not contain 0 (mod n)")
    return Graph.from_edges(n, [(i, (i + c) % n) for i in range(n) for c in conn])


def disjoint_union(g: Graph, h: Graph) -> Graph:
    return Graph.from_edges(g.n + h.n, list(g.edges) + [(u + g.n, v + g.n) for u, v in h.edges])


def line_graph(g: Graph) -> Graph:
    es = g.sorted_edges()
    out = [(i, j) for i, j in combinations(range(len(es)), 2) if set(es[i]) & set(es[j])]
    return Graph.from_edges(len(es), out)


def random_graph(n: int, p: float = 0.5, seed=None) -> Graph:
    rng = np.random.default_rng(seed)
    mask = np.triu(rng.random((n, n)) < p, 1)
    return Graph.from_edges(n, zip(*np.nonzero(mask)))


def random_relabel(g: Graph, seed=None):
    """Return (π·G, π) for a uniformly random permutation π."""
    perm = np.random.default_rng(seed).permutation(g.n)
    return g.relabel([int(x) for x in perm]), [int(x) for x in perm]


_SIMPLE = {
    "complete": complete, "K": complete, "empty": empty, "cycle": cycle, "C": cycle,
    "path": path, "P": path, "star": star, "cube": cube, "Q3": cube, "petersen": petersen,
    "complete_bipartite": complete_bipartite,
}


def generate_named(name: str, *params) -> Graph:
    """Build a named graph.

    ``params`` are integers for the simple families, ``(n, connections)`` for
    circulant, two graphs for disjoint_union and one graph for line_graph.
    """
    if name == "circulant":
        if len(params) != 2:
            raise ValueError("circulant takes (n, connection set)")
        return circulant(int(params[0]), params[1])
    if name == "disjoint_union":
        if len(params) != 2 or not all(isinstance(p, Graph) for p in params):
            raise ValueError("disjoint_union takes two graphs")
        return disjoint_union(*params)
    if name == "line_graph":
        if len(params) != 1 or not isinstance(params[0], Graph):
            raise ValueError("line_graph takes one graph")
        return line_graph(params[0])
    if name not in _SIMPLE:
        raise ValueError(f"unknown graph name {name!r}")
    try:
        return _SIMPLE[name](*[int(p) for p in params])
    except TypeError as exc:
        raise ValueError(f"invalid parameters for {name}: {params}") from exc


def parse_named(spec: str) -> Graph:
    """Parse the CLI form of a named graph.

    Examples: ``petersen``, ``cycle:5``, ``circulant:8:1,2``,
    ``line_graph(star:3)``, ``disjoint_union(cycle:4,complete:1)``.
    """
    spec = spec.strip()
    if spec.endswith(")") and "(" in spec:
        head, inner = spec.split("(", 1)
        inner = inner[:-1]
        args, depth, cur = [], 0, ""
        for ch in inner:
            if ch == "," and depth == 0:
                args.append(cur)
                cur = ""
                continue
            depth += ch == "("
            depth -= ch == ")"
            cur += ch
        args.append(cur)
        return generate_named(head.strip(), *[parse_named(a) for a in args])
    parts = spec.split(":")
    if parts[0] == "circulant":
        if len(parts) != 3:
            raise ValueError("use circulant:n:c1,c2,...")
        return circulant(int(parts[1]), [int(c) for c in parts[2].split(",")])
    try:
        params = [int(p) for p in parts[1:]]
    except ValueError:
        raise ValueError(f"bad parameters in {spec!r}") from None
    return generate_named(parts[0], *params)


# corpus

def small_graph_corpus(max_n: int = 7, min_n: int = 1) -> list:
    """One representative of every isomorphism class with min_n <= n <= max_n (max_n <= 7).

    Taken from the networkx graph atlas, which lists exactly these classes.
    """
    if max_n > 7:
        raise ValueError("the atlas only covers n <= 7")
    from networkx import graph_atlas_g

    out = []
    for h in graph_atlas_g():
        k = h.number_of_nodes()
        if min_n <= k <= max_n:
            out.append(Graph.from_edges(k, h.edges()))
    return out
