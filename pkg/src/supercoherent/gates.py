"""Coupled pairs of six-site supercoherent qubits and controlled-phase synthesis.

Inter-SQ edges are given as ``(site_in_A, site_in_B)`` with the 1-based
layout labels of each SQ. In the combined 12-site graph the sites of B are
offset by ``a.n_sites``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .design import reference_layout
from .eigen import DEGENERACY_TOL, full_spectrum, group_slices, lowest_k
from .errors import LeakageError, NoEntanglementError
from .logical import ground_subspace
from .spin import CouplingGraph, build_basis, heisenberg_matrix

LABELS = ("00", "01", "10", "11")
OVERLAP_THRESHOLD = 0.5
MIXING_TOL = 1e-6

# Frozen from discover_schemes(max_edges=2) on two reference row-2 layouts at
# probe J = 0.3: the two-edge set with the largest leakage gap for each
# diagonal signature (ties broken by edge order).
DEFAULT_SCHEMES = {
    "horizontal": ((1, 1), (3, 3)),
    "vertical": ((1, 1), (1, 3)),
}


@dataclass(frozen=True, eq=False)
class TwoSqSystem:
    a: object
    b: object
    edges: tuple
    scheme: str
    logical_a: object = field(repr=False)
    logical_b: object = field(repr=False)
    basis: object = field(repr=False)
    products: np.ndarray = field(repr=False)  # (sector dim, 4) in LABELS order

    @property
    def n_sites(self):
        return self.a.n_sites + self.b.n_sites

    def graph(self, j_inter):
        off = self.a.n_sites
        edges = list(self.a.graph.edges)
        edges += [(i + off, j + off, J) for i, j, J in self.b.graph.edges]
        if j_inter != 0.0:
            edges += [(sa - 1, sb - 1 + off, j_inter) for sa, sb in self.edges]
        return CouplingGraph(self.n_sites, tuple(edges))

    def hamiltonian(self, j_inter):
        return heisenberg_matrix(self.graph(j_inter), self.basis)

    def swapped(self):
        return couple_sqs(self.b, self.a, [(sb, sa) for sa, sb in self.edges], self.scheme)


def couple_sqs(a, b, edges=None, scheme="custom"):
    """Join two solved layouts; ``edges=None`` takes the named default scheme."""
    if edges is None:
        edges = DEFAULT_SCHEMES[scheme]
    edges = tuple((int(sa), int(sb)) for sa, sb in edges)
    for sa, sb in edges:
        if not (1 <= sa <= a.n_sites and 1 <= sb <= b.n_sites):
            raise IndexError(f"inter edge ({sa}, {sb}) outside the two layouts")
    if len(set(edges)) != len(edges):
        raise ValueError("duplicate inter-SQ edge")
    la, lb = ground_subspace(a), ground_subspace(b)
    n = a.n_sites + b.n_sites
    basis = build_basis(n, n % 2)
    cols = []
    for la_bit, lb_bit in ((0, 0), (0, 1), (1, 0), (1, 1)):
        # site k of B is bit k + n_A, so B is the slow index of the product
        full = np.kron(lb.vectors[:, lb_bit], la.vectors[:, la_bit])
        cols.append(basis.restrict(full))
    products = np.column_stack(cols)
    if np.abs(np.linalg.norm(products, axis=0) - 1).max() > 1e-10:
        raise ValueError("logical product states are not confined to the Sz=0 sector")
    return TwoSqSystem(a, b, edges, scheme, la, lb, basis, products)


@dataclass(frozen=True)
class LabeledPoint:
    j_inter: float
    lam: tuple  # (lam00, lam01, lam10, lam11)
    leakage_gap: float
    min_overlap: float
    max_mixing: float = 0.0


def label_spectrum(sys, w, V, j_inter=0.0, tol=DEGENERACY_TOL, strict=True):
    """Attach computational labels to degenerate clusters by projector weight."""
    slices = group_slices(w, tol)
    weights = np.array([
        np.sum(np.abs(V[:, sl].conj().T @ sys.products) ** 2, axis=0) for sl in slices
    ])  # (clusters, 4)
    best = np.argmax(weights, axis=0)
    overlaps = weights[best, np.arange(4)]
    if strict and overlaps.min() < OVERLAP_THRESHOLD:
        bad = LABELS[int(np.argmin(overlaps))]
        raise LeakageError(
            f"state |{bad}> has overlap {overlaps.min():.3f} < {OVERLAP_THRESHOLD} at J={j_inter:g}",
            j_inter,
        )
    # weight an unassigned computational state leaves in a labelled cluster
    mixing = max(
        (weights[best[i], j] for i in range(4) for j in range(4) if best[j] != best[i]),
        default=0.0,
    )
    lam = tuple(float(np.mean(w[slices[c]])) for c in best)
    labeled = set(best.tolist())
    top = max(lam)
    counts = {c: int(np.sum(best == c)) for c in labeled}
    rest = [w[slices[c]][0] for c in range(len(slices)) if c not in labeled]
    rest += [w[slices[c]][0] for c in labeled if slices[c].stop - slices[c].start > counts[c]]
    gap = (min(rest) - top) if rest else np.inf
    point = LabeledPoint(float(j_inter), lam, float(gap), float(overlaps.min()), float(mixing))
    return point, best, slices


def _spectrum_at(sys, j_inter, k=None):
    H = sys.hamiltonian(j_inter)
    if k is None:
        return full_spectrum(H, want_vectors=True)
    return lowest_k(H, k)


@dataclass(frozen=True)
class GateSweep:
    points: tuple

    @property
    def j_values(self):
        return np.array([p.j_inter for p in self.points])

    @property
    def lam(self):
        return np.array([p.lam for p in self.points])

    @property
    def leakage_gap(self):
        return np.array([p.leakage_gap for p in self.points])

    @property
    def min_overlap(self):
        return np.array([p.min_overlap for p in self.points])

    def rows(self):
        for p in self.points:
            yield (p.j_inter, *p.lam, p.leakage_gap, p.min_overlap)


SWEEP_COLUMNS = ("J", "lam00", "lam01", "lam10", "lam11", "leakage_gap", "min_overlap")


def sweep_inter_coupling(sys, j_values, k=None, map_fn=map):
    """Labelled low-lying spectrum of the coupled pair at each inter-SQ coupling."""
    j_values = [float(j) for j in j_values]
    if any(j < 0 for j in j_values) or j_values != sorted(j_values):
        raise ValueError("j_values must be non-negative and sorted")

    def one(j):
        spec = _spectrum_at(sys, j, k)
        return label_spectrum(sys, spec.eigenvalues, spec.eigenvectors, j)[0]

    return GateSweep(tuple(map_fn(one, j_values)))


def classify(point, tol=DEGENERACY_TOL):
    l00, l01, l10, l11 = point.lam
    pairs = [abs(x - y) for x, y in itertools.combinations(point.lam, 2)]
    if abs(l01 - l10) < tol and abs(l00 - l11) > tol and abs(l00 - l01) > tol and abs(l11 - l01) > tol:
        return "DIAGONAL-DEGENERATE"
    if min(pairs) > tol:
        return "DIAGONAL-DISTINCT"
    return "OTHER"


def candidate_edge_sets(n_a, n_b, max_edges):
    if max_edges not in (1, 2):
        raise ValueError("max_edges must be 1 or 2")
    singles = [(sa, sb) for sa in range(1, n_a + 1) for sb in range(1, n_b + 1)]
    sets = [(e,) for e in singles]
    if max_edges == 2:
        sets += list(itertools.combinations(singles, 2))
    return sets


def discover_schemes(a, b, max_edges=2, probe_j=0.3, k=10, map_fn=map):
    """Classify every 1- or 2-edge equal-strength inter-SQ coupling at ``probe_j``.

    Returns ``(edges, classification, leakage_gap)`` sorted by descending
    leakage gap. Sets whose labelled clusters fall below the overlap
    threshold, or mix computational states beyond ``MIXING_TOL``, are
    classified ``OTHER``.
    """
    base = couple_sqs(a, b, (), "custom")

    def one(edges):
        sys = TwoSqSystem(a, b, edges, "custom", base.logical_a, base.logical_b, base.basis, base.products)
        spec = _spectrum_at(sys, probe_j, k)
        point, _, _ = label_spectrum(sys, spec.eigenvalues, spec.eigenvectors, probe_j, strict=False)
        if point.min_overlap < OVERLAP_THRESHOLD or point.max_mixing > MIXING_TOL:
            return edges, "OTHER", point.leakage_gap
        return edges, classify(point), point.leakage_gap

    results = list(map_fn(one, candidate_edge_sets(a.n_sites, b.n_sites, max_edges)))
    results.sort(key=lambda r: (-round(r[2], 9), len(r[0]), r[0]))
    return results


def default_pair(row=2):
    layout = reference_layout(row)
    return layout, layout


@dataclass(frozen=True)
class CPhasePulse:
    j_inter: float
    duration: float
    alpha_a: float
    alpha_b: float
    global_phase: float
    omega: float
    lam: tuple
    fidelity: float
    phase_error: float


TARGET = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def local_z_phases(alpha_a, alpha_b):
    """Diagonal of Rz(alpha_A) x Rz(alpha_B), Rz(a) = diag(e^{-ia/2}, e^{ia/2})."""
    s = np.array([1.0, -1.0])
    return np.array([np.exp(-0.5j * (alpha_a * s[x] + alpha_b * s[y])) for x in (0, 1) for y in (0, 1)])


def phase_matching(lam, t):
    """Local z angles and global phase turning diag(e^{-i lam t}) into CZ."""
    theta = -np.asarray(lam) * t
    alpha_b = theta[0] - theta[1]
    alpha_a = theta[0] - theta[2]
    phi = theta[0] - 0.5 * (alpha_a + alpha_b)
    # alphas are only defined mod 4*pi (Rz has a sign ambiguity at 2*pi);
    # wrapping both together shifts phi by a multiple of 2*pi
    wrap = lambda x: (x + 2 * np.pi) % (4 * np.pi) - 2 * np.pi
    alpha_a, alpha_b = wrap(alpha_a), wrap(alpha_b)
    phi = float(np.angle(np.exp(1j * (theta[0] - 0.5 * (alpha_a + alpha_b)))))
    return float(alpha_a), float(alpha_b), phi


def dressed_states(V, best, slices, products):
    cols = []
    for label in range(4):
        Vc = V[:, slices[best[label]]]
        cols.append(Vc @ (Vc.conj().T @ products[:, label]))
    D = np.column_stack(cols)
    # Loewdin orthonormalisation keeps each column closest to its projection
    u, _, vh = np.linalg.svd(D, full_matrices=False)
    return u @ vh


def cphase_pulse(sys, j_inter):
    """Single-interval controlled-phase pulse at inter-SQ coupling ``j_inter``."""
    H = sys.hamiltonian(j_inter)
    spec = full_spectrum(H, want_vectors=True)
    point, best, slices = label_spectrum(sys, spec.eigenvalues, spec.eigenvectors, j_inter)
    l00, l01, l10, l11 = point.lam
    omega = l00 + l11 - l01 - l10
    if abs(omega) < 1e-9:
        raise NoEntanglementError(f"entangling rate {omega:.3e} vanishes at J={j_inter:g}")
    t = np.pi / abs(omega)
    alpha_a, alpha_b, phi = phase_matching(point.lam, t)

    D = dressed_states(spec.eigenvectors, best, slices, sys.products)
    U = expm(-1j * t * H.dense())
    Up = D.conj().T @ U @ D
    W = np.exp(-1j * phi) * np.diag(local_z_phases(alpha_a, alpha_b)) @ Up
    fidelity = abs(np.trace(TARGET.conj().T @ W)) ** 2 / 16
    d = np.angle(np.diag(Up))
    extracted = d[0] + d[3] - d[1] - d[2]
    phase_err = abs(np.angle(np.exp(1j * (extracted + omega * t))))
    return CPhasePulse(
        float(j_inter), float(t), alpha_a, alpha_b, phi, float(omega), point.lam,
        float(fidelity), float(phase_err),
    )
