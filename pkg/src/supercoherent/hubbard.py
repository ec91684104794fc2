"""One-band Hubbard model at half filling as a cross-check of the spin model.

Fermion ordering for Jordan-Wigner signs: all spin-up orbitals (site order)
precede all spin-down orbitals, so a same-spin hop i <-> j picks up a sign
from the occupied same-spin orbitals strictly between i and j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .design import _local_minima, energy_gap
from .eigen import DEGENERACY_TOL, SpectrumResult, lowest_k
from .errors import CapacityError, DomainError, NoDegeneracyError, StructureError
from .spin import DENSE_LIMIT, _states_with_popcount


@dataclass(frozen=True)
class HubbardModel:
    n_sites: int
    hoppings: tuple  # ((i, j, t_ij), ...) with 0-based sites
    u: float
    n_electrons: int
    sz_twice: int = 0

    @property
    def n_up(self):
        return (self.n_electrons + self.sz_twice) // 2

    @property
    def n_down(self):
        return (self.n_electrons - self.sz_twice) // 2


def hopping_from_exchange(j, u):
    """Hopping amplitude whose strong-coupling exchange 4t^2/U equals ``j``."""
    if j < 0:
        raise DomainError(f"exchange must be non-negative, got {j}")
    if u <= 0:
        raise DomainError(f"U must be positive, got {u}")
    return math.sqrt(u * j / 4)


def _hop_matrix(n_sites, states, hoppings):
    index = {int(s): k for k, s in enumerate(states)}
    rows, cols, vals = [], [], []
    for i, j, t in hoppings:
        if t == 0.0:
            continue
        lo, hi = min(i, j), max(i, j)
        between = ((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1)
        for k, s in enumerate(states):
            s = int(s)
            bi, bj = (s >> i) & 1, (s >> j) & 1
            if bi == bj:
                continue
            # c_i^dag c_j + c_j^dag c_i moves the electron to the empty site
            target = s ^ ((1 << i) | (1 << j))
            sign = -1.0 if bin(s & between).count("1") % 2 else 1.0
            rows.append(index[target])
            cols.append(k)
            vals.append(sign * t)
    d = len(states)
    return sp.coo_matrix((vals, (rows, cols)), shape=(d, d)).tocsr()


def hubbard_matrix(model):
    """Sparse Hamiltonian in the (N_up, N_down) occupation basis, up index slow."""
    n = model.n_sites
    if model.n_electrons > 2 * n or model.n_electrons < 0:
        raise CapacityError(f"{model.n_electrons} electrons do not fit on {n} sites")
    if (model.n_electrons + model.sz_twice) % 2 or abs(model.sz_twice) > model.n_electrons:
        raise ValueError(f"2Sz={model.sz_twice} incompatible with N={model.n_electrons}")
    if model.n_up > n or model.n_down > n:
        raise CapacityError("sector needs more than one electron per spin-orbital")
    up = _states_with_popcount(n, model.n_up)
    dn = _states_with_popcount(n, model.n_down)
    T_up = _hop_matrix(n, up, model.hoppings)
    T_dn = _hop_matrix(n, dn, model.hoppings)
    H = sp.kron(T_up, sp.identity(len(dn))) + sp.kron(sp.identity(len(up)), T_dn)
    double = np.array([bin(int(a) & int(b)).count("1") for a in up for b in dn], dtype=float)
    return (H + sp.diags(model.u * double)).tocsr()


def half_filled_spectrum(model, k):
    if model.n_electrons > 2 * model.n_sites:
        raise CapacityError(f"{model.n_electrons} electrons exceed {2 * model.n_sites} orbitals")
    if model.n_electrons != model.n_sites:
        raise ValueError(f"not half filled: N={model.n_electrons}, sites={model.n_sites}")
    H = hubbard_matrix(model)
    dim = H.shape[0]
    if dim <= DENSE_LIMIT:
        w = la.eigvalsh(H.toarray(), subset_by_index=[0, min(k, dim) - 1])
        return SpectrumResult(w)
    return lowest_k(H, k)


def model_from_layout(layout, u, overrides=None):
    """Map every exchange edge of ``layout`` to t = sqrt(U J / 4)."""
    overrides = {tuple(sorted(e)): t for e, t in (overrides or {}).items()}
    hops = []
    for i, j, J in layout.graph.edges:
        key = tuple(sorted((i + 1, j + 1)))
        t = overrides.get(key, hopping_from_exchange(J, u))
        hops.append((i, j, t))
    n = layout.n_sites
    return HubbardModel(n, tuple(hops), float(u), n, 0)


def _hubbard_splitting(model):
    w = half_filled_spectrum(model, 3).eigenvalues
    return float(w[1] - w[0]), w


def heisenberg_limit_error(layout, u):
    """Hubbard ground-manifold splitting E1 - E0 in units of the Heisenberg gap."""
    split, _ = _hubbard_splitting(model_from_layout(layout, u))
    return split / energy_gap(layout)


@dataclass(frozen=True)
class HoppingTuning:
    u_over_j: float
    naive_t: float
    tuned_t: float
    residual_splitting: float
    gap_ratio: float


HUBBARD_COLUMNS = ("U_over_J", "naive_t56", "tuned_t56", "residual_splitting", "gap_ratio")


def tune_hoppings(layout, u, free_hopping=None, bracket=None, split_tol=1e-9, n_grid=151):
    """Hopping on ``free_hopping`` restoring a degenerate Hubbard ground level."""
    if free_hopping is None:
        free_hopping = layout.middle_edge
    edge = tuple(sorted(free_hopping))
    naive = hopping_from_exchange(layout.coupling(edge), u)
    if bracket is None:
        bracket = (0.5 * naive, 2.0 * naive)
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError(f"bracket must be positive and ordered, got {bracket}")

    def split(t):
        return _hubbard_splitting(model_from_layout(layout, u, {edge: t}))[0]

    candidates = sorted(_local_minima(split, lo, hi, n_grid), key=lambda c: c[1])
    for t, s, _ in candidates:
        if s >= split_tol:
            break
        _, w = _hubbard_splitting(model_from_layout(layout, u, {edge: t}))
        if w[2] - w[1] > DEGENERACY_TOL:
            return float(t)
        raise StructureError(f"threefold degeneracy at t={t:.6g}")
    best = candidates[0][1] if candidates else float("inf")
    raise NoDegeneracyError(f"no hopping in {bracket} reaches splitting < {split_tol:g} (best {best:.3e})")


def tuning_report(layout, u_over_j_values, free_hopping=None):
    """One ``HoppingTuning`` per U/J (J is the unit rhombus coupling)."""
    if free_hopping is None:
        free_hopping = layout.middle_edge
    edge = tuple(sorted(free_hopping))
    out = []
    for r in u_over_j_values:
        u = float(r)
        naive = hopping_from_exchange(layout.coupling(edge), u)
        tuned = tune_hoppings(layout, u, edge)
        resid, _ = _hubbard_splitting(model_from_layout(layout, u, {edge: tuned}))
        out.append(HoppingTuning(u, naive, tuned, resid, heisenberg_limit_error(layout, u)))
    return out
