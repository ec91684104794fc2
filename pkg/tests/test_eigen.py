import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from supercoherent.eigen import (
    degeneracy_groups,
    fix_gauge,
    full_spectrum,
    lowest_k,
    residuals,
)
from supercoherent.errors import CapacityError, OrderingError
from supercoherent.spin import CouplingGraph, build_basis, complete_graph, heisenberg_matrix


def ring(n, J=1.0):
    return CouplingGraph(n, tuple((i, (i + 1) % n, J) for i in range(n)))


def test_full_spectrum_residuals():
    H = heisenberg_matrix(complete_graph(6, 1.0))
    spec = full_spectrum(H, want_vectors=True)
    assert residuals(H, spec).max() < 1e-12
    V = spec.eigenvectors
    assert np.allclose(V.T @ V, np.eye(V.shape[1]), atol=1e-12)


def test_complete_graph_levels():
    # K_n Heisenberg: E = (S(S+1) - 3n/4) / 2
    groups = degeneracy_groups(full_spectrum(heisenberg_matrix(complete_graph(4))).eigenvalues)
    assert [(round(e, 12), m) for e, m in groups] == [(-1.5, 2), (-0.5, 9), (1.5, 5)]


@pytest.mark.parametrize("n", [8, 10, 12])
def test_lanczos_matches_dense(n):
    g = ring(n)
    H = heisenberg_matrix(g, build_basis(n, 0))
    exact = full_spectrum(H).eigenvalues[:6]
    got = lowest_k(H, 6).eigenvalues
    assert np.allclose(got, exact, atol=1e-10)


def test_lanczos_on_large_sector():
    H = heisenberg_matrix(ring(16), build_basis(16, 0))
    assert H.is_sparse
    spec = lowest_k(H, 3)
    assert residuals(H, spec).max() < 1e-8
    # ground energy of the 16-site ring, known to many digits
    assert abs(spec.eigenvalues[0] / 16 - (-0.44639)) < 1e-4


def test_capacity():
    H = heisenberg_matrix(ring(16), build_basis(16, 0))
    with pytest.raises(CapacityError):
        full_spectrum(H)


def test_groups_and_ordering():
    assert degeneracy_groups([0.0, 1e-10, 1.0, 1.0 + 5e-9, 2.0]) == [(5e-11, 2), (1.0 + 2.5e-9, 2), (2.0, 1)]
    with pytest.raises(OrderingError):
        degeneracy_groups([1.0, 0.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_gauge_independent_of_rotation(seed):
    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.normal(size=(12, 3)))
    R, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    A, B = fix_gauge(V), fix_gauge(V @ R)
    assert np.allclose(A, B, atol=1e-10)
    assert np.allclose(A.T @ A, np.eye(3), atol=1e-12)


def test_degenerate_vectors_deterministic():
    H = heisenberg_matrix(complete_graph(4))
    a = full_spectrum(H, want_vectors=True).eigenvectors
    # same matrix through a sparse container must give the same canonical vectors
    b = full_spectrum(sp.csr_matrix(H.dense()), want_vectors=True).eigenvectors
    assert np.allclose(a, b, atol=1e-10)
