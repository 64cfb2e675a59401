import numpy as np
import pytest
import sympy

from spectral_iso.graph_io import Graph, complete, cycle, path, petersen, random_graph
from spectral_iso.oracle import automorphism_group
from spectral_iso.spectral import (
    Subspace, complement_within, decompose_graph, fixed_subspace, intersect, jacobi_eigh,
    project_basis_vector, reconstruction_error, span_of, subspace_equal,
)


def charpoly_roots(g):
    x = sympy.symbols("x")
    poly = sympy.Matrix(g.adjacency.astype(int)).charpoly(x).as_expr()
    roots = sympy.roots(sympy.Poly(poly, x))
    return sorted(((float(r), m) for r, m in roots.items()), reverse=True)


@pytest.mark.parametrize("g", [complete(4), path(3), cycle(5), complete(1)], ids=["K4", "P3", "C5", "K1"])
def test_spectrum_matches_characteristic_polynomial(g):
    d = decompose_graph(g)
    want = charpoly_roots(g)
    assert list(d.multiplicities) == [m for _, m in want]
    np.testing.assert_allclose(d.eigenvalues, [r for r, _ in want], atol=1e-10)


def test_frozen_spectra():
    d = decompose_graph(complete(4))
    np.testing.assert_allclose(d.eigenvalues, [3, -1], atol=1e-12)
    assert d.multiplicities == (1, 3)
    d = decompose_graph(path(3))
    np.testing.assert_allclose(d.eigenvalues, [np.sqrt(2), 0, -np.sqrt(2)], atol=1e-12)


def test_jacobi_against_numpy():
    a = random_graph(30, 0.3, seed=4).adjacency
    w, v = jacobi_eigh(a)
    np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(a), atol=1e-10)
    np.testing.assert_allclose(v.T @ v, np.eye(30), atol=1e-10)
    np.testing.assert_allclose(v @ np.diag(w) @ v.T, a, atol=1e-10)


def test_projection_examples():
    d = decompose_graph(complete(4))
    np.testing.assert_allclose(project_basis_vector(d, 0, 0), [0.25] * 4, atol=1e-12)
    g = petersen()
    d = decompose_graph(g)
    for v in range(g.n):
        total = sum(project_basis_vector(d, k, v) for k in range(d.t))
        np.testing.assert_allclose(total, np.eye(g.n)[v], atol=1e-10)
    d = decompose_graph(complete(1))
    np.testing.assert_allclose(project_basis_vector(d, 0, 0), [1.0])


def test_reconstruction_on_random_graphs():
    for s in range(5):
        g = random_graph(25, 0.5, seed=s)
        assert reconstruction_error(decompose_graph(g)) <= 1e-10 * g.n


def test_projectors_commute_with_automorphisms():
    g = petersen()
    d = decompose_graph(g)
    for sigma in automorphism_group(g).generators:
        p = np.eye(g.n)[:, list(sigma)]
        for k in range(d.t):
            np.testing.assert_allclose(p @ d.projector(k), d.projector(k) @ p, atol=1e-10)


def test_span_examples():
    e = np.eye(3)
    assert span_of([e[0], e[0], e[1]]).dim == 2
    assert span_of([], n=3).dim == 0
    assert span_of([np.zeros(3)]).dim == 0
    s = span_of([(e[0] + e[1]) / np.sqrt(2), (e[0] - e[1]) / np.sqrt(2)])
    assert subspace_equal(s, span_of([e[0], e[1]]))


def test_intersect_and_complement():
    e = np.eye(3)
    s = intersect(span_of([e[0], e[1]]), span_of([e[1], e[2]]))
    assert subspace_equal(s, span_of([e[1]]))
    c = complement_within(span_of([e[0]]), span_of([e[0], e[1]]))
    assert subspace_equal(c, span_of([e[1]]))
    assert subspace_equal(span_of([e[0] + e[1], e[0] - e[1]]), span_of([e[0], e[1]]))


def test_fixed_subspace_examples():
    assert fixed_subspace([0, 1, 2]).dim == 3
    rot = fixed_subspace([1, 2, 0])
    assert subspace_equal(rot, span_of([np.ones(3)]))
    swap = fixed_subspace([1, 0, 2])
    e = np.eye(3)
    assert subspace_equal(swap, span_of([e[0] + e[1], e[2]]))


def test_subspace_zero_and_full():
    assert Subspace.zero(4).dim == 0
    assert Subspace.full(4).dim == 4
