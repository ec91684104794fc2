"""Logical subspace of a supercoherent qubit and single-edge rotation generators.

Edges here use the same 1-based site labels as :mod:`supercoherent.design`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import SqLayout
from .eigen import DEGENERACY_TOL, full_spectrum
from .errors import StructureError, UndefinedAxisError
from .spin import CouplingGraph, heisenberg_matrix

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1j], [1j, 0.0]]),
    "Z": np.diag([1.0, -1.0]),
}


@dataclass(frozen=True, eq=False)
class LogicalSubspace:
    vectors: np.ndarray  # (2**n, 2), columns |0_L>, |1_L>
    gap: float
    graph: CouplingGraph
    z_edge: tuple
    ground_energy: float

    @property
    def zero(self):
        return self.vectors[:, 0]

    @property
    def one(self):
        return self.vectors[:, 1]


@dataclass(frozen=True, eq=False)
class EffectiveGenerator:
    matrix: np.ndarray
    coeffs: np.ndarray  # (c0, cx, cy, cz)
    edge: tuple

    @property
    def axis(self):
        return self.coeffs[1:]


def edge_operator(n_sites, edge):
    """Full-space matrix of S^i . S^j for a 1-based edge."""
    a, b = edge
    return heisenberg_matrix(CouplingGraph(n_sites, ((a - 1, b - 1, 1.0),))).dense()


def _graph_and_edge(system, z_edge):
    if isinstance(system, SqLayout):
        return system.graph, tuple(z_edge or system.z_edge)
    return system, tuple(z_edge or (1, 2))


def ground_subspace(system, z_edge=None, tol=DEGENERACY_TOL):
    """Twofold ground space, rotated to the eigenbasis of the z-edge generator.

    ``|0_L>`` is the lower eigenstate of the projected z-edge operator; each
    basis vector has its leading nonzero amplitude made positive.
    """
    graph, z_edge = _graph_and_edge(system, z_edge)
    H = heisenberg_matrix(graph)
    spec = full_spectrum(H, want_vectors=True, tol=tol)
    w = spec.eigenvalues
    groups = spec.groups()
    if groups[0][1] != 2:
        raise StructureError(f"ground level has multiplicity {groups[0][1]}, expected 2")
    V = spec.eigenvectors[:, :2]
    G = V.T @ edge_operator(graph.n_sites, z_edge) @ V
    g, R = np.linalg.eigh(0.5 * (G + G.T))
    if g[1] - g[0] < 1e-10:
        raise StructureError(f"z-edge {z_edge} acts as identity on the ground space")
    L = V @ R
    for c in range(2):
        lead = np.flatnonzero(np.abs(L[:, c]) > 1e-10)[0]
        L[:, c] *= np.sign(L[lead, c])
    return LogicalSubspace(L, float(w[2] - w[0]), graph, z_edge, float(w[0]))


def pauli_coeffs(M):
    return np.array([np.real(np.trace(PAULI[k].conj().T @ M)) / 2 for k in "IXYZ"])


def effective_generator(subspace, edge):
    """First-order logical action P (S^i . S^j) P in the logical basis."""
    n = subspace.graph.n_sites
    a, b = edge
    if not (1 <= a <= n and 1 <= b <= n) or a == b:
        raise IndexError(f"edge {edge} invalid for {n} sites")
    V = subspace.vectors
    G = V.conj().T @ edge_operator(n, edge) @ V
    G = 0.5 * (G + G.conj().T)
    return EffectiveGenerator(G, pauli_coeffs(G), tuple(edge))


def bloch_axis_angle(g1, g2, eps=1e-10):
    """Angle in degrees between the traceless parts of two generators."""
    u, v = g1.axis, g2.axis
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu < eps or nv < eps:
        raise UndefinedAxisError("generator has no traceless part")
    c = np.clip(u @ v / (nu * nv), -1.0, 1.0)
    return float(np.degrees(np.arccos(c)))


def rotation_axes(subspace, edges=None):
    """``(edge, generator, angle to z)`` for every coupled edge with a defined axis."""
    if edges is None:
        edges = [(i + 1, j + 1) for i, j, _ in subspace.graph.edges]
    gz = effective_generator(subspace, subspace.z_edge)
    out = []
    for e in edges:
        g = effective_generator(subspace, e)
        if np.linalg.norm(g.axis) < 1e-10:
            out.append((tuple(e), g, None))
        else:
            out.append((tuple(e), g, bloch_axis_angle(gz, g)))
    return out
