import numpy as np
import pytest

from oracles import total_s2_kron
from supercoherent.design import reference_layout
from supercoherent.errors import StructureError, UndefinedAxisError
from supercoherent.logical import (
    bloch_axis_angle,
    edge_operator,
    effective_generator,
    ground_subspace,
    rotation_axes,
)
from supercoherent.spin import complete_graph, heisenberg_matrix


def lowest_two(H):
    return np.linalg.eigvalsh(H)[:2]


def test_k4_axes_at_120_degrees():
    sub = ground_subspace(complete_graph(4), (1, 2))
    angles = {e: a for e, g, a in rotation_axes(sub)}
    assert abs(angles[(1, 3)] - 120) < 1e-8
    assert abs(angles[(1, 4)] - 120) < 1e-8
    assert abs(angles[(3, 4)]) < 1e-6


@pytest.mark.parametrize("row", [1, 2, 3])
def test_logical_states_are_orthonormal_singlets(row):
    sub = ground_subspace(reference_layout(row))
    V = sub.vectors
    assert np.allclose(V.T @ V, np.eye(2), atol=1e-12)
    S2 = total_s2_kron(6).real
    assert np.abs(V.T @ S2 @ V).max() < 1e-8


def test_z_edge_generator_is_diagonal():
    sub = ground_subspace(reference_layout(1))
    g = effective_generator(sub, (5, 6))
    assert abs(g.coeffs[1]) < 1e-12 and abs(g.coeffs[2]) < 1e-12
    assert abs(g.coeffs[3]) > 1e-3


@pytest.mark.parametrize("edge", [(1, 2), (2, 4), (3, 5), (5, 6)])
def test_generator_matches_finite_difference(edge):
    # first-order degenerate perturbation theory: dE/d(delta) = eig(P V P)
    L = reference_layout(1)
    sub = ground_subspace(L)
    H = heisenberg_matrix(L.graph).dense()
    V = edge_operator(6, edge)
    # one-sided: a central difference would pair the split levels in the wrong order
    d = 1e-6
    slope = (lowest_two(H + d * V) - lowest_two(H)) / d
    g = np.linalg.eigvalsh(effective_generator(sub, edge).matrix)
    assert np.allclose(np.sort(slope), g, atol=1e-5)


def test_six_site_axes_real_and_symmetric():
    sub = ground_subspace(reference_layout(1))
    axes = rotation_axes(sub)
    for e, g, a in axes:
        assert abs(g.coeffs[2]) < 1e-12
    rh = [a for e, g, a in axes if e in {(1, 2), (2, 3), (3, 4), (1, 4), (4, 1)}]
    # the four rhombus edges tilt the axis by the same angle
    assert np.ptp(rh) < 1e-8
    assert 0 < rh[0] < 180


def test_subspace_rejects_nondegenerate_ground():
    with pytest.raises(StructureError):
        ground_subspace(reference_layout(1).with_coupling((5, 6), 0.9))


def test_identity_generator_has_no_axis():
    sub = ground_subspace(complete_graph(4), (1, 2))
    g = effective_generator(sub, (1, 2))
    ident = type(g)(np.eye(2), np.array([1.0, 0, 0, 0]), (0, 0))
    with pytest.raises(UndefinedAxisError):
        bloch_axis_angle(g, ident)
