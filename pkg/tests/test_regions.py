import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import cells1
from spectral_iso.graph_io import complete, cycle, petersen
from spectral_iso.oracle import automorphism_group, stabilizer
from spectral_iso.partition import ContractError, Partition, meet
from spectral_iso.regions import (
    OnDividerError, ZeroProjectionError, incidence_membership, incidence_set, region_indicator,
    region_peel_partition, sign_vector,
)
from spectral_iso.spectral import Subspace, decompose_graph, span_of


def walk_member(q, x, u):
    """Walk from x straight to its foot on the divider of u; u separates the region
    when no other sign flips on the way."""
    p = q @ q.T
    pu = p[:, u]
    y = x - (x @ pu) / (pu @ pu) * pu
    s, t = np.sign(p @ x), np.sign(p @ y)
    return all(t[w] == s[w] for w in range(len(x)) if w != u)


def facet_member(q, x, u):
    """Exact separator test: some point of the divider of u keeps every other sign of x."""
    s = np.sign(q @ (q.T @ x))
    rows = [-s[w] * q[w] for w in range(q.shape[0]) if w != u]
    res = linprog(np.zeros(q.shape[1]), A_ub=np.array(rows), b_ub=-np.ones(len(rows)),
                  A_eq=q[u][None], b_eq=[0.0], bounds=[(None, None)] * q.shape[1])
    return res.status == 0


def random_configuration(rng):
    x_space = span_of(rng.standard_normal((6, 3)))
    return x_space, x_space.basis @ rng.standard_normal(3)


def test_sign_vector_zero_band():
    assert sign_vector([1.0, -2.0, 1e-12]).tolist() == [1, -1, 0]
    assert sign_vector([]).size == 0


def test_membership_full_plane():
    assert incidence_membership(Subspace.full(2), [1.0, 1.0], 0)
    assert sorted(incidence_set(Subspace.full(2), np.array([1.0, 1.0]), [0, 1])) == [0, 1]


def test_membership_one_dimensional_rays():
    x_space = span_of([np.array([1.0, 1.0, 0.0]) / np.sqrt(2)])
    assert incidence_membership(x_space, [1.0, 1.0, 0.0], 0)
    assert not incidence_membership(x_space, [-1.0, -1.0, 0.0], 0)


def test_membership_contract_errors():
    x_space = span_of([np.array([1.0, 1.0, 0.0])])
    with pytest.raises(ZeroProjectionError):
        incidence_membership(x_space, [1.0, 1.0, 0.0], 2)
    with pytest.raises(ContractError):
        incidence_membership(x_space, [1.0, 0.0, 0.0], 0)
    with pytest.raises(OnDividerError):
        incidence_membership(Subspace.full(2), [0.0, 1.0], 0)


def test_membership_agrees_with_walk_oracle():
    rng = np.random.default_rng(2024)
    agree = 0
    for _ in range(1000):
        x_space, x = random_configuration(rng)
        u = int(rng.integers(6))
        agree += incidence_membership(x_space, x, u) == walk_member(x_space.basis, x, u)
    assert agree >= 990, f"agreement {agree / 1000:.1%} below 99%"


def test_indicator_examples():
    full = Subspace.full(2)
    np.testing.assert_allclose(region_indicator(full, [0, 1], [1.0, 1.0]), [1.0, 1.0])
    np.testing.assert_allclose(region_indicator(full, [0, 1], [1.0, -1.0]), [1.0, -1.0])


def test_indicator_lies_in_region():
    rng = np.random.default_rng(7)
    inside = 0
    for _ in range(1000):
        x_space, x = random_configuration(rng)
        members = [w for w in range(6) if facet_member(x_space.basis, x, w)]
        ind = region_indicator(x_space, members, x)
        p = x_space.projector
        inside += np.array_equal(np.sign(p @ ind), np.sign(p @ x))
    assert inside == 1000, f"indicator inside its region in {inside}/1000 configurations"


@pytest.mark.parametrize("n", [3, 5, 7])
def test_complete_graph_peel(n):
    d = decompose_graph(complete(n))
    v = 2
    neg = next(k for k in range(d.t) if abs(d.eigenvalues[k] + 1) < 1e-9)
    want = {frozenset({v + 1}), frozenset(set(range(1, n + 1)) - {v + 1})}
    assert cells1(region_peel_partition(d, neg, v)) == want
    p = Partition.unit(n)
    for k in range(d.t):
        p = meet(p, region_peel_partition(d, k, v).partition)
    assert cells1(p) == want


def test_c5_perron_single_cell():
    d = decompose_graph(cycle(5))
    lp = region_peel_partition(d, 0, 0)
    assert abs(d.eigenvalues[0] - 2) < 1e-12
    assert cells1(lp) == {frozenset(range(1, 6))}
    assert lp.layers == (1,)
    assert abs(lp.values[0][1] - 0.2) < 1e-12


def test_petersen_meet_matches_stabilizer_orbits():
    g = petersen()
    d = decompose_graph(g)
    p = Partition.unit(10)
    for k in range(d.t):
        p = meet(p, region_peel_partition(d, k, 0).partition)
    orbits = stabilizer(automorphism_group(g), [0]).orbits()
    assert p.same_cells(orbits)
    assert cells1(p) == {frozenset({1}), frozenset({2, 5, 6}), frozenset({3, 4, 7, 8, 9, 10})}
