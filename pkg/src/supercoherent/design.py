"""Supercoherent-qubit layouts and the mediator-coupling degeneracy solver.

Layout-level APIs label sites 1-based as in the rhombus picture: rhombus
sites 1-4 with the short diagonal 2-4, and a mediator chain
3 - 5 - 6 - ... - (4 + L) - 1 across the long diagonal. The underlying
``CouplingGraph`` is 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .eigen import DEGENERACY_TOL, full_spectrum
from .errors import (
    BracketError,
    NoDegeneracyError,
    ParityError,
    StructureError,
)
from .spin import CouplingGraph, build_basis, heisenberg_matrix, total_spin_squared

SPLIT_TOL = 1e-9
SINGLET_TOL = 1e-8
SINGLET_TOL_PERTURBED = 1e-6


@dataclass(frozen=True)
class SqLayout:
    graph: CouplingGraph
    chain_len: int
    z_edge: tuple = (5, 6)

    @property
    def n_sites(self):
        return self.graph.n_sites

    @property
    def rhombus_edges(self):
        return ((1, 2), (2, 3), (3, 4), (4, 1))

    @property
    def diagonal(self):
        return (2, 4)

    @property
    def mediator_sites(self):
        return tuple(range(5, 5 + self.chain_len))

    @property
    def attach_edges(self):
        return ((3, 5), (4 + self.chain_len, 1))

    @property
    def chain_edges(self):
        m = self.mediator_sites
        return tuple(zip(m[:-1], m[1:]))

    @property
    def middle_edge(self):
        return self.chain_edges[(self.chain_len - 1) // 2]

    def coupling(self, edge):
        a, b = edge
        return self.graph.coupling(a - 1, b - 1)

    def with_coupling(self, edge, J):
        a, b = edge
        _check_sites(self, edge)
        return replace(self, graph=self.graph.with_coupling(a - 1, b - 1, J))

    def scaled(self, c):
        return replace(self, graph=self.graph.scaled(c))


def _check_sites(layout, edge):
    a, b = edge
    if not (1 <= a <= layout.n_sites and 1 <= b <= layout.n_sites) or a == b:
        raise IndexError(f"edge {edge} invalid for a {layout.n_sites}-site layout")


def rhombus_layout(chain_len, j_attach, j_chain, z_edge=None):
    if chain_len < 2 or chain_len % 2:
        raise ParityError(f"mediator chain length must be even and >= 2, got {chain_len}")
    j_chain = list(j_chain)
    if len(j_chain) != chain_len - 1:
        raise ValueError(f"need {chain_len - 1} chain couplings, got {len(j_chain)}")
    n = 4 + chain_len
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (1, 3, 1.0)]
    mediators = list(range(4, n))
    edges.append((2, mediators[0], j_attach))
    for (a, b), J in zip(zip(mediators[:-1], mediators[1:]), j_chain):
        edges.append((a, b, J))
    edges.append((mediators[-1], 0, j_attach))
    layout = SqLayout(CouplingGraph(n, tuple(edges)), chain_len)
    if z_edge is None:
        z_edge = layout.middle_edge
    return replace(layout, z_edge=tuple(z_edge))


def j56_closed_form(j16):
    """Mediator coupling giving the degenerate singlet ground state (two mediators)."""
    x = j16
    root = math.sqrt(x**4 + 8 * x**3 + 12 * x**2 + 8 * x + 4)
    return (x * root + x**3 + 4 * x**2 - 2 * x - 4) / (4 * x + 4)


def j16_for_j56(j56, bracket=(0.8, 20.0)):
    """Invert ``j56_closed_form`` on its increasing branch."""
    return brentq(lambda x: j56_closed_form(x) - j56, *bracket, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def reference_layout(row):
    """Reference 6-site designs: 1) J16 = 1, 2) J56 = 1, 3) J16 = 2.

    The free coupling of each comes from the closed form or its inverse.
    """
    if row == 1:
        j16 = 1.0
        j56 = j56_closed_form(j16)
    elif row == 2:
        j56 = 1.0
        j16 = j16_for_j56(j56)
    elif row == 3:
        j16 = 2.0
        j56 = j56_closed_form(j16)
    else:
        raise ValueError(f"reference row must be 1, 2 or 3, got {row}")
    return rhombus_layout(2, j16, [j56])


def _sector_spectrum(layout, want_vectors=False):
    basis = build_basis(layout.n_sites, layout.n_sites % 2)
    H = heisenberg_matrix(layout.graph, basis)
    return basis, full_spectrum(H, want_vectors)


def ground_splitting(layout):
    """E1 - E0 of the lowest total-Sz sector."""
    _, spec = _sector_spectrum(layout)
    return float(spec.eigenvalues[1] - spec.eigenvalues[0])


def golden_minimize(f, a, b, xtol=1e-14, max_iter=200):
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= xtol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def check_ground_structure(layout, singlet_tol=SINGLET_TOL, tol=DEGENERACY_TOL):
    """Return ``None`` if the ground level is a twofold singlet, else a reason."""
    basis, spec = _sector_spectrum(layout, want_vectors=True)
    w, v = spec.eigenvalues, spec.eigenvectors
    if w[1] - w[0] > tol:
        return f"ground not degenerate (E1-E0={w[1] - w[0]:.3e})"
    if len(w) > 2 and w[2] - w[1] <= tol:
        return "threefold or higher ground degeneracy"
    S2 = total_spin_squared(basis)
    s2 = [abs(float(v[:, k] @ S2.matvec(v[:, k]))) for k in (0, 1)]
    if max(s2) > singlet_tol:
        return f"ground states not singlets (<S^2>={max(s2):.3g})"
    return None


def _local_minima(f, lo, hi, n):
    grid = np.linspace(lo, hi, n)
    vals = np.array([f(x) for x in grid])
    out = []
    for k in range(n):
        left = vals[k - 1] if k > 0 else np.inf
        right = vals[k + 1] if k < n - 1 else np.inf
        if vals[k] <= left and vals[k] <= right:
            a, b = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
            out.append((*golden_minimize(f, a, b), b - a))
    return out


def solve_mediator_coupling(
    layout,
    free_edge=None,
    bracket=None,
    grid_step=0.01,
    singlet_tol=SINGLET_TOL,
    split_tol=SPLIT_TOL,
    refine_depth=4,
):
    """Coupling on ``free_edge`` that makes the ground level a twofold singlet.

    A coarse scan of the ground splitting over ``bracket`` is followed by
    golden-section refinement of every local minimum. Candidates that touch
    zero splitting but fail the structure checks (typically a triplet
    crossing) get their neighbourhood rescanned on a 10x finer grid, since a
    valid singlet crossing may hide next to them.

    The default bracket is ``(0.05, 5) * max(1, largest other coupling)``.
    """
    if free_edge is None:
        free_edge = layout.middle_edge
    if bracket is None:
        key = tuple(sorted(free_edge))
        others = [abs(J) for i, j, J in layout.graph.edges if tuple(sorted((i + 1, j + 1))) != key]
        scale = max([1.0] + others)
        bracket = (0.05 * scale, 5.0 * scale)
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError(f"bracket must be positive and ordered, got {bracket}")
    _check_sites(layout, free_edge)

    def split(J):
        return ground_splitting(layout.with_coupling(free_edge, J))

    n_grid = max(50, int(math.ceil((hi - lo) / grid_step)) + 1)
    pending = [(c, 0) for c in _local_minima(split, lo, hi, n_grid)]
    best_split = min((c[1] for c, _ in pending), default=np.inf)
    reasons = []
    seen = set()
    while pending:
        pending.sort(key=lambda item: item[0][1])
        (J, s, width), depth = pending.pop(0)
        key = round(J, 12)
        if key in seen:
            continue
        seen.add(key)
        if s < split_tol:
            reason = check_ground_structure(layout.with_coupling(free_edge, J), singlet_tol)
            if reason is None:
                return float(J)
            reasons.append(f"J={J:.6g}: {reason}")
        if depth < refine_depth and s < 1e-2:
            a, b = max(lo, J - 2 * width), min(hi, J + 2 * width)
            pending += [(c, depth + 1) for c in _local_minima(split, a, b, 41)]
    if reasons:
        raise StructureError("degeneracy points found but none valid: " + "; ".join(reasons[:3]))
    raise NoDegeneracyError(
        f"no coupling in {bracket} on edge {free_edge} reaches splitting < {split_tol:g} "
        f"(best {best_split:.3e})"
    )


def solved_layout(layout, free_edge=None, **kwargs):
    if free_edge is None:
        free_edge = layout.middle_edge
    J = solve_mediator_coupling(layout, free_edge, **kwargs)
    return layout.with_coupling(free_edge, J)


def energy_gap(layout, tol=DEGENERACY_TOL):
    """E2 - E0 of the full spectrum, requiring a twofold ground level."""
    H = heisenberg_matrix(layout.graph)
    w = full_spectrum(H).eigenvalues
    if w[1] - w[0] > tol:
        raise StructureError(f"ground state not twofold degenerate: E1-E0={w[1] - w[0]:.3e}")
    if w[2] - w[1] <= tol:
        raise StructureError("ground level more than twofold degenerate")
    return float(w[2] - w[0])


def correct_coupling(layout, perturbed_edge, perturbed_value, free_edge=None, **kwargs):
    if free_edge is None:
        free_edge = layout.middle_edge
    if sorted(perturbed_edge) == sorted(free_edge):
        raise ValueError("perturbed edge and free edge must differ")
    kwargs.setdefault("singlet_tol", SINGLET_TOL_PERTURBED)
    return solve_mediator_coupling(
        layout.with_coupling(perturbed_edge, perturbed_value), free_edge, **kwargs
    )


def attachment_layout(chain_len, j_attach, j_outer=1.0):
    """Layout with all non-middle chain couplings at ``j_outer``; middle left at 1."""
    return rhombus_layout(chain_len, j_attach, [j_outer] * (chain_len - 1))


def attachment_feasibility(j_attach, chain_len=2, bracket=(1e-3, 10.0)):
    """``(feasible, reason)`` for a given attachment coupling."""
    layout = attachment_layout(chain_len, j_attach)
    try:
        solve_mediator_coupling(layout, layout.middle_edge, bracket)
    except (NoDegeneracyError, StructureError) as exc:
        return False, str(exc)
    return True, "ok"


def min_attachment(chain_len=2, search_range=(0.5, 1.5), xtol=1e-3):
    """Smallest attachment coupling admitting a twofold singlet ground level."""
    lo, hi = search_range
    ok_lo = attachment_feasibility(lo, chain_len)[0]
    ok_hi = attachment_feasibility(hi, chain_len)[0]
    if ok_lo == ok_hi:
        raise BracketError(f"feasibility is {ok_lo} at both ends of {search_range}")
    if ok_lo:
        raise BracketError(f"feasible at the low end {lo} but not at {hi}")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if attachment_feasibility(mid, chain_len)[0]:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
