import numpy as np
import pytest

from conftest import cells1
from spectral_iso.balanced import all_vertex_partitions
from spectral_iso.graph_io import (
    circulant, complete, cube, cycle, disjoint_union, path, petersen, star,
)
from spectral_iso.oracle import automorphism_group, group_from_generators, setwise_stabilizer, stabilizer
from spectral_iso.partition import Partition
from spectral_iso.spectral import decompose_graph
from spectral_iso.structure import (
    bipartite_components, block_partition, corresponds, multipartite_block_system,
    primitivity_test, select_block_candidate, subspace_cascade, uniform_partition,
)


def pipeline(g):
    d = decompose_graph(g)
    vps = all_vertex_partitions(d, g)
    return d, vps, uniform_partition(d, g, vps)


def stabilizer_partitions(grp, t):
    return {x: stabilizer(grp, [x]).orbits() for x in t}


def S(*cells):
    return {frozenset(c) for c in cells}


@pytest.mark.parametrize("g", [cycle(6), complete(5), cube(), petersen()], ids=["C6", "K5", "Q3", "Petersen"])
def test_uniform_partition_transitive(g):
    assert len(pipeline(g)[2].cells) == 1


def test_uniform_partition_star_and_path():
    assert cells1(pipeline(star(3))[2]) == S({1}, {2, 3, 4})
    assert cells1(pipeline(path(4))[2]) == S({1, 4}, {2, 3})


def test_uniform_partition_cells_are_orbit_unions():
    for g in [circulant(8, [1, 2]), disjoint_union(cycle(4), path(3)), cycle(9)]:
        assert automorphism_group(g).orbits().refines(pipeline(g)[2])


def test_correspondence_is_vertex_invariant():
    g = petersen()
    _, vps, _ = pipeline(g)
    assert all(corresponds(vps[0], vps[v], 1e-9) for v in range(10))
    _, vps, _ = pipeline(path(4))
    assert not corresponds(vps[0], vps[1], 1e-9)


def test_cube_bipartite_components_singletons():
    grp = automorphism_group(cube())
    pg = bipartite_components(stabilizer(grp, [0]).orbits(), stabilizer(grp, [7]).orbits())
    assert pg.component_of(0) == (0,)
    assert pg.component_of(7) == (7,)


def test_bipartite_components_degenerate():
    p = Partition(5, ((0, 1), (2, 3, 4)))
    assert bipartite_components(p, p).components == p.cells
    q = Partition(5, ((0, 3), (1, 2, 4)))
    assert bipartite_components(Partition.discrete(5), q).components == tuple(sorted(q.cells))


def test_primitivity_c5():
    grp = automorphism_group(cycle(5))
    t = range(5)
    assert primitivity_test(stabilizer_partitions(grp, t), t).kind == "Connected"


def test_primitivity_c4():
    grp = automorphism_group(cycle(4))
    res = primitivity_test(stabilizer_partitions(grp, range(4)), range(4))
    assert res.kind == "Imprimitive"
    assert len(res.block) == 2 and grp.is_block(res.block)


def test_primitivity_c7_rotations():
    rot = group_from_generators(7, [tuple((i + 1) % 7 for i in range(7))])
    assert rot.order == 7
    assert primitivity_test(stabilizer_partitions(rot, range(7)), range(7)).kind == "PrimeMatching"


@pytest.mark.parametrize("g", [cycle(5), cycle(6), cube(), petersen(), complete(4),
                               circulant(8, [1, 4]), circulant(8, [2, 3]), cycle(8)],
                         ids=["C5", "C6", "Q3", "Petersen", "K4", "C8(1,4)", "C8(2,3)", "C8"])
def test_primitivity_agrees_with_oracle(g):
    grp = automorphism_group(g)
    t = range(g.n)
    res = primitivity_test(stabilizer_partitions(grp, t), t)
    has_blocks = any(grp.is_block(b) for b in _pairs_and_more(g.n))
    assert (res.kind == "Imprimitive") == has_blocks
    if res.block is not None:
        assert grp.is_block(res.block)


def _pairs_and_more(n):
    from itertools import combinations

    for r in range(2, n // 2 + 1):
        yield from combinations(range(n), r)


def test_multipartite_systems():
    grp = automorphism_group(cycle(4))
    assert cells1(multipartite_block_system(stabilizer_partitions(grp, range(4)), range(4))) == S({1, 3}, {2, 4})
    for g in [petersen(), complete(5)]:
        grp = automorphism_group(g)
        comps = multipartite_block_system(stabilizer_partitions(grp, range(g.n)), range(g.n))
        assert comps == [tuple(range(g.n))]


def test_block_candidate_c4():
    g = cycle(4)
    d, vps, pbar = pipeline(g)
    bc = select_block_candidate(d, g, pbar.cells[0], vps)
    assert bc.B in ((0, 2), (1, 3)) and bc.nontrivial


@pytest.mark.parametrize("g", [petersen(), complete(5), cycle(5)], ids=["Petersen", "K5", "C5"])
def test_block_candidate_trivial(g):
    d, vps, pbar = pipeline(g)
    bc = select_block_candidate(d, g, pbar.cells[0], vps)
    assert not bc.nontrivial
    assert bc.B == tuple(range(g.n))


def test_block_candidates_are_blocks():
    for g in [cycle(6), cube(), circulant(8, [1, 4]), cycle(8), disjoint_union(cycle(3), cycle(3))]:
        d, vps, pbar = pipeline(g)
        grp = automorphism_group(g)
        for s in pbar.cells:
            bc = select_block_candidate(d, g, s, vps)
            if bc.nontrivial:
                assert grp.is_block(bc.B)
                assert len(s) % len(bc.B) == 0


def test_block_partition_c4():
    g = cycle(4)
    d, _, pbar = pipeline(g)
    assert cells1(block_partition(d, g, (0, 2), pbar)) == S({1, 3}, {2, 4})


def test_block_partition_c6():
    g = cycle(6)
    d, _, pbar = pipeline(g)
    p = block_partition(d, g, (0, 3), pbar)
    assert cells1(p) == S({1, 4}, {2, 3, 5, 6})
    assert setwise_stabilizer(automorphism_group(g), (0, 3)).orbits().refines(p)


def test_block_partition_of_a_cell_keeps_pbar():
    g = star(3)
    d, _, pbar = pipeline(g)
    assert block_partition(d, g, pbar.cells[1], pbar).refines(pbar)


def test_cascade_single_cell():
    g = petersen()
    d = decompose_graph(g)
    for c in subspace_cascade(d, g, Partition.unit(10)):
        assert c.error < 1e-9
        assert sum(s.dim for s in c.subspaces()) == c.y.dim


def test_cascade_disjoint_union_orthogonal():
    g = disjoint_union(cycle(5), cycle(3))
    d, _, pbar = pipeline(g)
    assert len(pbar.cells) == 2
    for c in subspace_cascade(d, g, pbar):
        subs = c.subspaces()
        for i, a in enumerate(subs):
            for b in subs[i + 1:]:
                if a.dim and b.dim:
                    assert np.max(np.abs(a.basis.T @ b.basis)) < 1e-9


def test_cascade_p4():
    g = path(4)
    d, _, pbar = pipeline(g)
    cs = subspace_cascade(d, g, pbar)
    assert len(cs) == 4
    assert all(c.error < 1e-9 for c in cs)
