import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import heisenberg_kron, sector_indices, total_s2_kron, total_sz_kron, zeeman_kron
from supercoherent.errors import InvalidSectorError, NormalizationError, SectorViolationError
from supercoherent.spin import (
    DENSE_LIMIT,
    CouplingGraph,
    build_basis,
    complete_graph,
    full_basis,
    heisenberg_matrix,
    total_spin_squared,
    total_spin_squared_expectation,
    zeeman_matrix,
)


@st.composite
def graphs(draw, min_sites=2, max_sites=10):
    n = draw(st.integers(min_sites, max_sites))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 14)))
    Js = draw(st.lists(st.floats(-2, 2, allow_nan=False), min_size=len(chosen), max_size=len(chosen)))
    return CouplingGraph(n, tuple((i, j, J) for (i, j), J in zip(chosen, Js)))


def test_two_site_singlet_triplet():
    w = np.linalg.eigvalsh(heisenberg_matrix(complete_graph(2, 1.0)).dense())
    assert np.allclose(w, [-0.75, 0.25, 0.25, 0.25])


@settings(max_examples=25, deadline=None)
@given(graphs(max_sites=7))
def test_full_space_matches_kronecker_oracle(g):
    H = heisenberg_matrix(g).dense()
    assert np.allclose(H, heisenberg_kron(g.n_sites, g.edges).real, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(graphs(max_sites=7), st.data())
def test_sector_block_matches_oracle(g, data):
    n = g.n_sites
    sz2 = data.draw(st.sampled_from(range(-n, n + 1, 2)))
    idx = sector_indices(n, sz2)
    H = heisenberg_matrix(g, build_basis(n, sz2)).dense()
    assert np.allclose(H, heisenberg_kron(n, g.edges).real[np.ix_(idx, idx)], atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(graphs(max_sites=10))
def test_sectors_complete_and_disjoint(g):
    n = g.n_sites
    sectors = [build_basis(n, s) for s in range(-n, n + 1, 2)]
    states = np.concatenate([b.states for b in sectors])
    assert len(states) == 2**n
    assert len(np.unique(states)) == 2**n
    if n <= 8:
        w_full = np.linalg.eigvalsh(heisenberg_matrix(g).dense())
        w_blocks = np.sort(np.concatenate([np.linalg.eigvalsh(heisenberg_matrix(g, b).dense()) for b in sectors]))
        assert np.allclose(w_full, w_blocks, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(graphs(max_sites=10))
def test_su2_commutators(g):
    n = g.n_sites
    H = heisenberg_matrix(g).data
    S2 = total_spin_squared(full_basis(n)).data
    assert abs(H @ S2 - S2 @ H).max() < 1e-10
    # S_z is diagonal: [H, Sz] = 0 means H never connects different popcounts
    sz = np.array([bin(s).count("1") for s in range(2**n)])
    r, c = (H.nonzero() if hasattr(H, "nonzero") else np.nonzero(H))
    assert np.all(sz[r] == sz[c])


@settings(max_examples=15, deadline=None)
@given(graphs(max_sites=8))
def test_hermitian_and_real(g):
    H = heisenberg_matrix(g).dense()
    assert np.isrealobj(H)
    assert np.allclose(H, H.T)


def test_total_spin_squared_matches_oracle():
    for n in (2, 3, 5):
        assert np.allclose(total_spin_squared(full_basis(n)).dense(), total_s2_kron(n).real)


def test_singlet_expectation_and_normalization():
    v = np.zeros(4)
    v[1], v[2] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    assert abs(total_spin_squared_expectation(v, full_basis(2))) < 1e-14
    with pytest.raises(NormalizationError):
        total_spin_squared_expectation(2 * v, full_basis(2))


def test_zeeman_matches_oracle():
    rng = np.random.default_rng(3)
    fields = rng.normal(size=(4, 3))
    assert np.allclose(zeeman_matrix(fields).dense(), zeeman_kron(fields), atol=1e-13)
    Z = zeeman_matrix(fields).dense()
    assert np.allclose(Z, Z.conj().T)


def test_uniform_field_shifts_sectors():
    g = complete_graph(4, 1.0)
    h = 0.3
    Hh = heisenberg_matrix(g).dense()
    Z = zeeman_matrix(np.tile([0.0, 0.0, h], (4, 1))).dense()
    assert np.allclose(Z, h * total_sz_kron(4).real)
    assert np.allclose(Hh @ Z, Z @ Hh)
    H = Hh + Z
    for sz2 in range(-4, 5, 2):
        b = build_basis(4, sz2)
        wb = np.linalg.eigvalsh(heisenberg_matrix(g, b).dense())
        wz = np.linalg.eigvalsh(H[np.ix_(b.states, b.states)])
        assert np.allclose(wz, wb + h * sz2 / 2)


def test_transverse_field_rejected_in_sector():
    with pytest.raises(SectorViolationError):
        zeeman_matrix(np.array([[0.1, 0, 0], [0, 0, 0]]), build_basis(2, 0))


def test_invalid_sector():
    with pytest.raises(InvalidSectorError):
        build_basis(4, 1)
    with pytest.raises(InvalidSectorError):
        build_basis(4, 6)


def test_sparse_above_dense_limit():
    g = CouplingGraph(16, tuple((i, (i + 1) % 16, 1.0) for i in range(16)))
    b = build_basis(16, 0)
    assert b.dim > DENSE_LIMIT
    assert heisenberg_matrix(g, b).is_sparse
    assert not heisenberg_matrix(complete_graph(6), build_basis(6, 0)).is_sparse


def test_basis_index_and_embed():
    b = build_basis(5, 1)
    assert np.all(b.index(b.states) == np.arange(b.dim))
    assert b.index([0])[0] == -1
    v = np.arange(b.dim, dtype=float)
    assert np.allclose(b.restrict(b.embed(v)), v)


@settings(max_examples=25, deadline=None)
@given(graphs(max_sites=10))
def test_edgelist_round_trip(g):
    assert CouplingGraph.from_edgelist(g.to_edgelist()) == g


def test_edgelist_comments_and_file(tmp_path):
    text = "# six sites\nsites 3\n0 1 1.0  # bond\n\n1 2 0.5\n"
    g = CouplingGraph.from_edgelist(text)
    assert g.coupling(2, 1) == 0.5
    g.save(tmp_path / "g.txt")
    assert CouplingGraph.load(tmp_path / "g.txt") == g
    with pytest.raises(ValueError):
        CouplingGraph.from_edgelist("0 1 1.0\n")


def test_graph_validation():
    with pytest.raises(IndexError):
        CouplingGraph(2, ((0, 2, 1.0),))
    with pytest.raises(ValueError):
        CouplingGraph(2, ((0, 0, 1.0),))
    with pytest.raises(ValueError):
        CouplingGraph(3, ((0, 1, 1.0), (1, 0, 2.0)))
