"""Spin-1/2 bases and Heisenberg / Zeeman operators on arbitrary coupling graphs.

Site ``k`` maps to bit ``k`` of the integer basis label, bit value 1 = spin up.
Spin operators follow the S = sigma/2 convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import InvalidSectorError, NormalizationError, SectorViolationError

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class CouplingGraph:
    """Weighted undirected graph of spin sites; edges are ``(i, j, J_ij)``."""

    n_sites: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {self.n_sites}")
        seen = set()
        clean = []
        for i, j, J in self.edges:
            i, j = int(i), int(j)
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise IndexError(f"edge ({i}, {j}) outside [0, {self.n_sites})")
            if i == j:
                raise ValueError(f"self-loop on site {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            clean.append((i, j, float(J)))
        object.__setattr__(self, "edges", tuple(clean))

    def coupling(self, i, j):
        key = (min(i, j), max(i, j))
        for a, b, J in self.edges:
            if (min(a, b), max(a, b)) == key:
                return J
        return 0.0

    def with_coupling(self, i, j, J):
        """Return a copy with edge (i, j) set to ``J`` (added if absent)."""
        key = (min(i, j), max(i, j))
        edges = [e for e in self.edges if (min(e[0], e[1]), max(e[0], e[1])) != key]
        edges.append((i, j, J))
        return CouplingGraph(self.n_sites, tuple(edges))

    def scaled(self, c):
        return CouplingGraph(self.n_sites, tuple((i, j, c * J) for i, j, J in self.edges))

    def to_edgelist(self):
        lines = [f"sites {self.n_sites}"]
        lines += [f"{i} {j} {J!r}" for i, j, J in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text):
        n_sites = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "sites":
                if n_sites is not None or len(parts) != 2:
                    raise ValueError(f"line {lineno}: bad header {raw!r}")
                n_sites = int(parts[1])
                continue
            if n_sites is None:
                raise ValueError(f"line {lineno}: edge before 'sites N' header")
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected 'i j J', got {raw!r}")
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        if n_sites is None:
            raise ValueError("missing 'sites N' header")
        return cls(n_sites, tuple(edges))

    def save(self, path):
        Path(path).write_text(self.to_edgelist())

    @classmethod
    def load(cls, path):
        return cls.from_edgelist(Path(path).read_text())


def complete_graph(n_sites, J=1.0):
    return CouplingGraph(
        n_sites, tuple((i, j, J) for i in range(n_sites) for j in range(i + 1, n_sites))
    )


@dataclass(frozen=True, eq=False)
class SpinBasis:
    """Ordered computational basis; ``sz_twice is None`` means the full space."""

    n_sites: int
    sz_twice: int | None
    states: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return len(self.states)

    @property
    def is_full(self):
        return self.sz_twice is None

    def index(self, labels):
        """Positions of integer basis labels (``-1`` where absent)."""
        labels = np.asarray(labels, dtype=np.int64)
        if self.is_full:
            return labels
        pos = np.searchsorted(self.states, labels)
        pos = np.clip(pos, 0, self.dim - 1)
        return np.where(self.states[pos] == labels, pos, -1)

    def embed(self, vec):
        """Lift a sector vector into the full 2**n space."""
        out = np.zeros(2**self.n_sites, dtype=np.asarray(vec).dtype)
        out[self.states] = vec
        return out

    def restrict(self, full_vec):
        return np.asarray(full_vec)[self.states]


def build_basis(n_sites, sz_twice):
    if abs(sz_twice) > n_sites or (n_sites + sz_twice) % 2:
        raise InvalidSectorError(f"no sector 2Sz={sz_twice} for {n_sites} sites")
    n_up = (n_sites + sz_twice) // 2
    states = _states_with_popcount(n_sites, n_up)
    assert len(states) == comb(n_sites, n_up)
    return SpinBasis(n_sites, sz_twice, states)


def full_basis(n_sites):
    return SpinBasis(n_sites, None, np.arange(2**n_sites, dtype=np.int64))


def _popcount(x):
    x = np.asarray(x, dtype=np.int64)
    count = np.zeros_like(x)
    while np.any(x):
        count += x & 1
        x = x >> 1
    return count


def _states_with_popcount(n_sites, n_up):
    allstates = np.arange(2**n_sites, dtype=np.int64)
    return allstates[_popcount(allstates) == n_up]


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """Operator on a basis, stored dense below ``DENSE_LIMIT`` and CSR above."""

    data: object = field(repr=False)
    basis: SpinBasis

    @property
    def dim(self):
        return self.data.shape[0]

    @property
    def is_sparse(self):
        return sp.issparse(self.data)

    def dense(self):
        return self.data.toarray() if self.is_sparse else np.asarray(self.data)

    def matvec(self, v):
        return self.data @ v

    def __add__(self, other):
        if other.basis.n_sites != self.basis.n_sites or other.dim != self.dim:
            raise ValueError("operators act on different bases")
        return HamiltonianMatrix(self.data + other.data, self.basis)


def _assemble(rows, cols, vals, dim, dtype, force_dense=None):
    dense = dim <= DENSE_LIMIT if force_dense is None else force_dense
    if dense:
        M = np.zeros((dim, dim), dtype=dtype)
        np.add.at(M, (rows, cols), vals)
        return M
    return sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=dtype).tocsr()


def heisenberg_matrix(graph, basis=None, dense=None):
    """Matrix of sum_ij J_ij S^i . S^j on ``basis`` (full space if omitted)."""
    if basis is None:
        basis = full_basis(graph.n_sites)
    if basis.n_sites != graph.n_sites:
        raise ValueError(f"basis has {basis.n_sites} sites, graph has {graph.n_sites}")
    states = basis.states
    dim = basis.dim
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []
    cols_all = np.arange(dim)
    for i, j, J in graph.edges:
        if J == 0.0:
            continue
        bi = (states >> i) & 1
        bj = (states >> j) & 1
        anti = bi != bj
        diag += np.where(anti, -0.25 * J, 0.25 * J)
        flipped = states[anti] ^ ((1 << i) | (1 << j))
        rows.append(basis.index(flipped))
        cols.append(cols_all[anti])
        vals.append(np.full(int(anti.sum()), 0.5 * J))
    rows.append(cols_all)
    cols.append(cols_all)
    vals.append(diag)
    data = _assemble(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), dim, float, dense)
    return HamiltonianMatrix(data, basis)


def zeeman_matrix(fields, basis=None, dense=None):
    """Matrix of sum_i h_i . S^i for per-site field vectors ``fields`` (n, 3)."""
    fields = np.asarray(fields, dtype=float)
    if fields.ndim != 2 or fields.shape[1] != 3:
        raise ValueError(f"fields must have shape (n_sites, 3), got {fields.shape}")
    n_sites = fields.shape[0]
    if basis is None:
        basis = full_basis(n_sites)
    if basis.n_sites != n_sites:
        raise ValueError(f"{n_sites} field vectors for a {basis.n_sites}-site basis")
    transverse = np.any(fields[:, :2] != 0.0)
    if transverse and not basis.is_full:
        raise SectorViolationError("transverse fields break Sz conservation; use the full basis")
    states = basis.states
    dim = basis.dim
    cols_all = np.arange(dim)
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []
    for k, (hx, hy, hz) in enumerate(fields):
        bit = (states >> k) & 1
        diag += hz * (bit - 0.5)
        if hx == 0.0 and hy == 0.0:
            continue
        # S+ raises bit k: <s|H|s'> = (hx - i hy)/2 for s = s' with bit set
        down = bit == 0
        rows.append(states[down] | (1 << k))
        cols.append(cols_all[down])
        vals.append(np.full(int(down.sum()), 0.5 * (hx - 1j * hy)))
        up = ~down
        rows.append(states[up] & ~(1 << k))
        cols.append(cols_all[up])
        vals.append(np.full(int(up.sum()), 0.5 * (hx + 1j * hy)))
    rows.append(cols_all)
    cols.append(cols_all)
    vals.append(diag.astype(complex) if transverse else diag)
    dtype = complex if transverse else float
    data = _assemble(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), dim, dtype, dense)
    return HamiltonianMatrix(data, basis)


def total_spin_squared(basis, dense=None):
    """S_tot^2 = sum_{i<j} 2 S^i.S^j + 3n/4."""
    n = basis.n_sites
    M = heisenberg_matrix(complete_graph(n, 2.0), basis, dense)
    shift = 0.75 * n * (sp.identity(basis.dim, format="csr") if M.is_sparse else np.eye(basis.dim))
    return HamiltonianMatrix(M.data + shift, basis)


def total_spin_squared_expectation(state, basis, s2=None):
    state = np.asarray(state)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"state norm {norm:.3e} is not 1")
    if s2 is None:
        s2 = total_spin_squared(basis)
    return float(np.real(np.vdot(state, s2.matvec(state))))
