import networkx as nx
import pytest

from spectral_iso.graph_io import (
    complete, cube, cycle, disjoint_union, line_graph, parse_graph6, path, petersen, random_graph,
    random_relabel, star,
)
from spectral_iso.iso import are_isomorphic, fingerprint, fingerprints_match, orbit_report, verify_isomorphism
from spectral_iso.partition import ContractError

RIGID_10 = "Iu@ow@MTo"  # random_graph(10, 0.5, seed=0); trivial group per the enumeration oracle


def nx_iso(g, h):
    a, b = nx.Graph(), nx.Graph()
    a.add_nodes_from(range(g.n))
    a.add_edges_from(g.edges)
    b.add_nodes_from(range(h.n))
    b.add_edges_from(h.edges)
    return nx.is_isomorphic(a, b)


def test_whitney_line_graphs():
    g, h = line_graph(complete(3)), line_graph(star(3))
    c = are_isomorphic(g, h)
    assert c.isomorphic and verify_isomorphism(g, h, c.mapping)


def test_cospectral_pair_rejected():
    g, h = star(4), disjoint_union(cycle(4), complete(1))
    c = are_isomorphic(g, h)
    assert not c.isomorphic and c.reason == "fingerprint-mismatch"


def test_cospectral_non_isomorphic_regular_pair():
    # Shrikhande vs the 4x4 rook graph: same spectrum, same degrees
    rook = nx.cartesian_product(nx.complete_graph(4), nx.complete_graph(4))
    rook = nx.convert_node_labels_to_integers(rook)
    shr = nx.Graph([(4 * a + b, 4 * ((a + da) % 4) + (b + db) % 4)
                    for a in range(4) for b in range(4)
                    for da, db in [(0, 1), (1, 0), (1, 1)]])
    from spectral_iso.graph_io import Graph

    g = Graph.from_edges(16, rook.edges())
    h = Graph.from_edges(16, shr.edges())
    assert not are_isomorphic(g, h).isomorphic
    c = are_isomorphic(h, random_relabel(h, seed=5)[0])
    assert c.isomorphic


@pytest.mark.parametrize("g", [petersen(), cube(), cycle(9), parse_graph6(RIGID_10)],
                         ids=["Petersen", "Q3", "C9", "rigid10"])
def test_relabelled_copies(g):
    for s in range(5):
        h, _ = random_relabel(g, seed=s)
        c = are_isomorphic(g, h)
        assert c.isomorphic and verify_isomorphism(g, h, c.mapping)


def test_random_pairs_agree_with_networkx():
    for s in range(40):
        g = random_graph(8, 0.5, seed=s)
        h = random_graph(8, 0.5, seed=1000 + s)
        if len(g.edges) != len(h.edges):
            continue
        assert are_isomorphic(g, h).isomorphic == nx_iso(g, h)


@pytest.mark.slow
def test_planted_n50():
    for s in range(20):
        g = random_graph(50, 0.5, seed=s)
        h, _ = random_relabel(g, seed=10_000 + s)
        c = are_isomorphic(g, h)
        assert c.isomorphic and verify_isomorphism(g, h, c.mapping)


def test_fingerprint_invariant_under_relabelling():
    for g in [petersen(), path(5), random_graph(9, 0.4, seed=2)]:
        h, _ = random_relabel(g, seed=3)
        assert fingerprints_match(fingerprint(g), fingerprint(h))
    assert not fingerprints_match(fingerprint(star(4)), fingerprint(disjoint_union(cycle(4), complete(1))))


def test_verify_isomorphism_examples():
    g = complete(4)
    assert verify_isomorphism(g, g, range(4))
    assert verify_isomorphism(g, g, [1, 0, 2, 3])
    p = path(3)
    assert not verify_isomorphism(p, p, [1, 0, 2])
    with pytest.raises(ContractError):
        verify_isomorphism(p, p, [0, 0, 1])


def test_certificate_json_is_one_based_and_untimed():
    c = are_isomorphic(path(3), path(3))
    j = c.to_json()
    assert sorted(j["mapping"]) == [1, 2, 3]
    assert "eigentime_ms" not in j["stats"]
    assert "eigentime_ms" in c.to_json(timing=True)["stats"]


def test_orbit_report_examples():
    r = orbit_report(cube())
    assert r["approx"] == r["oracle"] == [list(range(1, 9))] and r["equal"]
    r = orbit_report(path(4))
    assert {frozenset(c) for c in r["approx"]} == {frozenset({1, 4}), frozenset({2, 3})}
    assert r["equal"]
    r = orbit_report(parse_graph6(RIGID_10))
    assert len(r["approx"]) == len(r["oracle"]) == 10 and r["equal"]
