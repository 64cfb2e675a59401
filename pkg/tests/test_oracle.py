import math
from itertools import permutations

import networkx as nx
import pytest

from conftest import cells1
from spectral_iso.graph_io import complete, cube, cycle, path, petersen, random_graph, small_graph_corpus
from spectral_iso.oracle import (
    OracleCapacityError, automorphism_group, brute_force_isomorphism, cycle_notation,
    fastening_sequence, minimal_blocks, orbits, stabilizer, verify_orbit_equation,
)
from spectral_iso.spectral import decompose_graph


def nx_automorphisms(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return sum(1 for _ in nx.algorithms.isomorphism.GraphMatcher(h, h).isomorphisms_iter())


@pytest.mark.parametrize("g, order", [(petersen(), 120), (cube(), 48), (path(3), 2)],
                         ids=["Petersen", "Q3", "P3"])
def test_group_orders(g, order):
    grp = automorphism_group(g)
    assert grp.order == order == nx_automorphisms(g)


def test_p3_generator():
    grp = automorphism_group(path(3))
    assert [cycle_notation(p) for p in grp.generators] == ["(1 3)"]


@pytest.mark.parametrize("n", range(1, 9))
def test_complete_and_cycle_orders(n):
    assert automorphism_group(complete(n), cap=16).order == math.factorial(n)
    if n >= 3:
        assert automorphism_group(cycle(n + 4), cap=16).order == 2 * (n + 4)


def test_orders_against_networkx_on_corpus_sample():
    for g in small_graph_corpus(6)[::7]:
        assert automorphism_group(g).order == nx_automorphisms(g)


def test_elements_are_automorphisms():
    g = random_graph(7, 0.5, seed=11)
    grp = automorphism_group(g)
    brute = [p for p in permutations(range(7)) if all(g.has_edge(p[u], p[v]) for u, v in g.edges)]
    assert sorted(grp.elements()) == sorted(brute)


def test_orbits_and_stabilizers():
    assert cells1(orbits(automorphism_group(cycle(5)))) == {frozenset(range(1, 6))}
    st = stabilizer(automorphism_group(cube()), [0]).orbits()
    assert cells1(st) == {frozenset({1}), frozenset({2, 3, 5}), frozenset({4, 6, 7}), frozenset({8})}


def test_fastening_sequence_k4():
    seq, chain = fastening_sequence(automorphism_group(complete(4)))
    assert len(seq) == 3
    grp = automorphism_group(complete(4))
    orders = [grp.order] + [stabilizer(grp, seq[:i + 1]).order for i in range(3)]
    assert orders == [24, 6, 2, 1]
    assert chain[-1].is_discrete()


def test_minimal_blocks_examples():
    assert cells1(minimal_blocks(automorphism_group(cycle(4)), range(4), [0, 2])) == {
        frozenset({1, 3}), frozenset({2, 4})}
    for seed in ([0, 1], [0, 2]):
        assert minimal_blocks(automorphism_group(cycle(5)), range(5), seed) == [tuple(range(5))]
    assert cells1(minimal_blocks(automorphism_group(cycle(6)), range(6), [0, 3])) == {
        frozenset({1, 4}), frozenset({2, 5}), frozenset({3, 6})}


def test_is_block_needs_whole_group():
    grp = automorphism_group(cycle(5))
    assert not any(grp.is_block((0, j)) for j in range(1, 5))
    assert grp.is_block((0,)) and grp.is_block(tuple(range(5)))


def test_orbit_equation_k3():
    g = complete(3)
    d = decompose_graph(g)
    grp = automorphism_group(g)
    k = next(i for i in range(d.t) if abs(d.eigenvalues[i] + 1) < 1e-9)
    r = verify_orbit_equation(g, d, grp, (0, 1, 2), k)
    assert r["equal"] and r["lhs_dim"] == 0 and r["rhs_dim"] == 0


def test_orbit_equation_c4():
    g = cycle(4)
    d = decompose_graph(g)
    grp = automorphism_group(g)
    k = next(i for i in range(d.t) if abs(d.eigenvalues[i]) < 1e-9)
    assert d.multiplicities[k] == 2
    r = verify_orbit_equation(g, d, grp, (0, 1, 2, 3), k)
    assert r["equal"] and r["lhs_dim"] == r["rhs_dim"] == 0


def test_orbit_equation_cube_every_eigenvalue():
    g = cube()
    d = decompose_graph(g)
    grp = automorphism_group(g)
    for k in range(d.t):
        assert verify_orbit_equation(g, d, grp, tuple(range(8)), k)["equal"]


def test_brute_force_isomorphism():
    g = petersen()
    h = g.relabel([3, 1, 4, 0, 5, 9, 2, 6, 8, 7])
    m = brute_force_isomorphism(g, h)
    assert m is not None and all(h.has_edge(m[u], m[v]) for u, v in g.edges)
    assert brute_force_isomorphism(path(4), cycle(4)) is None


def test_capacity_error():
    with pytest.raises(OracleCapacityError):
        automorphism_group(cycle(20), cap=12)
