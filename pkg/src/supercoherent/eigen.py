"""Spectra, low-lying eigenpairs and degeneracy grouping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from .errors import CapacityError, ConvergenceError, OrderingError
from .spin import DENSE_LIMIT, HamiltonianMatrix

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    degeneracy_tol: float = DEGENERACY_TOL

    def groups(self):
        return degeneracy_groups(self.eigenvalues, self.degeneracy_tol)

    def __len__(self):
        return len(self.eigenvalues)


def _as_array(M):
    return M.data if isinstance(M, HamiltonianMatrix) else M


def full_spectrum(M, want_vectors=False, max_dim=DENSE_LIMIT, tol=DEGENERACY_TOL):
    """All eigenvalues (ascending) of a Hermitian matrix by dense diagonalization."""
    A = _as_array(M)
    dim = A.shape[0]
    if dim > max_dim:
        raise CapacityError(f"dimension {dim} exceeds dense limit {max_dim}")
    if hasattr(A, "toarray"):
        A = A.toarray()
    if not want_vectors:
        return SpectrumResult(la.eigvalsh(A), None, tol)
    w, v = la.eigh(A)
    return SpectrumResult(w, fix_gauge_by_groups(w, v, tol), tol)


def _norm_bound(A):
    # max absolute row sum bounds the spectral norm of a Hermitian matrix
    if hasattr(A, "toarray"):
        return float(abs(A).sum(axis=1).max())
    return float(np.abs(A).sum(axis=1).max())


def residuals(M, spectrum):
    A = _as_array(M)
    V = spectrum.eigenvectors
    R = A @ V - V * spectrum.eigenvalues
    return np.linalg.norm(R, axis=0)


def lowest_k(M, k, tol=DEGENERACY_TOL, v0_seed=0):
    """The ``k`` smallest eigenpairs via implicitly restarted Lanczos (ARPACK).

    The restart count is capped so the total work stays within roughly
    ``10 * dim`` matrix-vector products.
    """
    A = _as_array(M)
    if not sp.issparse(A):
        A = sp.csr_matrix(A)
    dim = A.shape[0]
    if not 1 <= k < dim:
        raise ValueError(f"need 1 <= k < dim, got k={k}, dim={dim}")
    ncv = min(dim, max(2 * k + 1, 20))
    maxiter = max(1, (10 * dim) // ncv)
    v0 = np.random.default_rng(v0_seed).standard_normal(dim)
    if np.iscomplexobj(A):
        v0 = v0.astype(complex)
    try:
        w, v = sla.eigsh(A, k=k, which="SA", ncv=ncv, maxiter=maxiter, v0=v0, tol=0)
    except sla.ArpackNoConvergence as exc:
        best = None
        if exc.eigenvectors is not None and len(exc.eigenvalues):
            r = A @ exc.eigenvectors - exc.eigenvectors * exc.eigenvalues
            best = float(np.linalg.norm(r, axis=0).max())
        raise ConvergenceError(f"Lanczos did not converge for k={k}", best) from exc
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    # ARPACK returns Ritz vectors; orthonormalise within degenerate clusters
    v = fix_gauge_by_groups(w, v, tol)
    res = np.linalg.norm(A @ v - v * w, axis=0)
    bound = 1e-9 * max(1.0, _norm_bound(A))
    if res.max() > bound:
        raise ConvergenceError(f"residual {res.max():.2e} above {bound:.2e}", float(res.max()))
    return SpectrumResult(w, v, tol)


def degeneracy_groups(eigs, tol=DEGENERACY_TOL):
    """Greedy grouping of sorted eigenvalues into ``(mean value, multiplicity)``."""
    eigs = np.asarray(eigs, dtype=float)
    if np.any(np.diff(eigs) < 0):
        raise OrderingError("eigenvalues must be sorted ascending")
    groups = []
    members = []
    for e in eigs:
        if members and abs(e - np.mean(members)) <= tol:
            members.append(e)
        else:
            if members:
                groups.append((float(np.mean(members)), len(members)))
            members = [e]
    if members:
        groups.append((float(np.mean(members)), len(members)))
    return groups


def group_slices(eigs, tol=DEGENERACY_TOL):
    start = 0
    out = []
    for _, mult in degeneracy_groups(eigs, tol):
        out.append(slice(start, start + mult))
        start += mult
    return out


def fix_gauge(V, pivot_tol=1e-6):
    """Canonical orthonormal basis of span(V), independent of the input rotation.

    Rows are scanned in ascending basis index; the first rows that raise the
    rank become pivots, V is transformed so those rows form the identity, and
    the result is Gram-Schmidt orthonormalised in pivot order. The leading
    nonzero amplitude of every column is made real positive.
    """
    V = np.asarray(V)
    n, m = V.shape
    if m == 1:
        return _fix_phase(V / np.linalg.norm(V))
    scale = np.abs(V).max()
    pivots = []
    Q = np.zeros((0, m), dtype=V.dtype)
    for r in range(n):
        row = V[r]
        if Q.shape[0]:
            row = row - (row @ Q.conj().T) @ Q
        nrm = np.linalg.norm(row)
        if nrm > pivot_tol * scale:
            pivots.append(r)
            Q = np.vstack([Q, row.conj() / nrm])
            if len(pivots) == m:
                break
    W = V @ np.linalg.inv(V[pivots])
    W, _ = np.linalg.qr(W)
    return _fix_phase(W)


def _fix_phase(V, eps=1e-10):
    V = V.copy()
    for c in range(V.shape[1]):
        col = V[:, c]
        lead = np.flatnonzero(np.abs(col) > eps)[0]
        phase = col[lead] / abs(col[lead])
        V[:, c] = col / phase if np.iscomplexobj(V) else col * np.sign(col[lead].real)
    return V


def fix_gauge_by_groups(w, V, tol=DEGENERACY_TOL):
    V = V.copy()
    for sl in group_slices(w, tol):
        V[:, sl] = fix_gauge(V[:, sl])
    return V
