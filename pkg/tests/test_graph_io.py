import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from spectral_iso.graph_io import (
    Graph, ParseError, complete, cube, cycle, generate_named, line_graph, parse_edge_list,
    parse_graph6, parse_named, petersen, random_graph, small_graph_corpus, star, to_edge_list,
    to_graph6,
)
from spectral_iso.oracle import permutation_isomorphic


def test_graph6_k4():
    g = parse_graph6("C~")
    assert g.n == 4 and len(g.edges) == 6


def test_graph6_single_vertex():
    g = parse_graph6("@")
    assert g.n == 1 and not g.edges


def test_graph6_trailing_byte_offset():
    with pytest.raises(ParseError) as exc:
        parse_graph6("D???")
    assert exc.value.offset == 2


@pytest.mark.parametrize("text", ["", "C", "C~~", "C\x7f", "D?\x20"])
def test_graph6_malformed(text):
    with pytest.raises(ParseError):
        parse_graph6(text)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 40), st.integers(0, 2**32 - 1))
def test_graph6_round_trip_matches_networkx(n, seed):
    g = random_graph(n, 0.4, seed=seed)
    text = to_graph6(g)
    assert parse_graph6(text) == g
    h = nx.from_graph6_bytes(text.encode())
    assert {tuple(sorted(e)) for e in h.edges()} == set(g.edges)


def test_edge_list_examples():
    assert parse_edge_list("3\n1 2\n2 3\n1 3") == complete(3)
    g = parse_edge_list("2\n")
    assert g.n == 2 and not g.edges
    with pytest.raises(ParseError):
        parse_edge_list("3\n1 4")
    with pytest.raises(ParseError):
        parse_edge_list("3\n2 2")


def test_edge_list_duplicates_collapse_and_round_trip():
    g = parse_edge_list("4\n1 2\n2 1\n3 4\n")
    assert len(g.edges) == 2
    assert parse_edge_list(to_edge_list(g)) == g


def test_graph_rejects_loops():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 0)])


def test_whitney_pair_line_graphs():
    assert permutation_isomorphic(line_graph(complete(3)), complete(3))
    assert permutation_isomorphic(line_graph(star(3)), complete(3))


def test_named_sizes():
    q = cube()
    assert q.n == 8 and len(q.edges) == 12 and {q.degree(v) for v in range(8)} == {3}
    c = cycle(5)
    assert c.n == 5 and len(c.edges) == 5 and {c.degree(v) for v in range(5)} == {2}
    p = petersen()
    assert p.n == 10 and len(p.edges) == 15
    assert nx.is_isomorphic(nx.Graph(list(p.edges)), nx.petersen_graph())


@pytest.mark.parametrize("n", range(3, 9))
def test_line_graph_of_cycle(n):
    assert permutation_isomorphic(line_graph(cycle(n)), cycle(n))


def test_named_parser_forms():
    assert parse_named("cycle:5") == cycle(5)
    assert parse_named("line_graph(star:3)").n == 3
    assert parse_named("disjoint_union(cycle:4,complete:1)").n == 5
    assert len(parse_named("circulant:8:1,2").edges) == 16


def test_named_errors():
    with pytest.raises(ValueError):
        generate_named("dodecahedron")
    with pytest.raises(ValueError):
        parse_named("circulant:6:0,1")


def test_corpus_counts():
    counts = [0] * 8
    for g in small_graph_corpus(7):
        counts[g.n] += 1
    assert counts[1:] == [1, 2, 4, 11, 34, 156, 1044]
    assert sum(counts) == 1252
