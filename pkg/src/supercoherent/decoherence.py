"""Hyperfine dephasing of encoded qubits under static random nuclear fields.

Energies are in ueV and times in ns. Each dot sees a field of fixed
magnitude ``hb`` pointing in an independent uniformly random direction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .design import reference_layout
from .errors import DomainError, ManifoldError
from .spin import CouplingGraph, complete_graph, heisenberg_matrix, zeeman_matrix

HBAR_UEV_NS = 0.6582119569


@dataclass(frozen=True)
class Encoding:
    label: str
    n_sites: int
    manifold_dim: int

    def graph(self, j):
        if self.label == "single":
            return CouplingGraph(1)
        if self.label == "triangle3":
            return complete_graph(3, j)
        if self.label == "sq4":
            return complete_graph(4, j)
        if self.label == "sq6":
            return reference_layout(1).graph.scaled(j)
        raise ValueError(f"unknown encoding {self.label!r}")


ENCODINGS = {
    "single": Encoding("single", 1, 2),
    "triangle3": Encoding("triangle3", 3, 4),
    "sq4": Encoding("sq4", 4, 2),
    "sq6": Encoding("sq6", 6, 2),
}


def get_encoding(enc):
    return enc if isinstance(enc, Encoding) else ENCODINGS[enc]


FIELD_MODELS = ("fixed", "gaussian")


def sample_nuclear_fields(n_sites, hb, seed, model="fixed"):
    """``(n_sites, 3)`` random static fields.

    ``fixed``: magnitude ``hb`` with isotropic directions. ``gaussian``:
    independent components of standard deviation ``hb / sqrt(3)``, so the
    rms magnitude is ``hb``. ``seed`` may be an int or a sequence of ints.
    """
    if hb < 0:
        raise DomainError(f"field magnitude must be non-negative, got {hb}")
    if model not in FIELD_MODELS:
        raise ValueError(f"field model must be one of {FIELD_MODELS}, got {model!r}")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n_sites, 3))
    if model == "gaussian":
        return hb / np.sqrt(3) * v
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return hb * v


def logical_splitting(encoding, j, fields):
    """Spread of the ``d`` lowest levels of H_Heisenberg(j) + H_Zeeman(fields)."""
    enc = get_encoding(encoding)
    fields = np.asarray(fields, dtype=float)
    if fields.shape != (enc.n_sites, 3):
        raise ValueError(f"{enc.label} needs fields of shape ({enc.n_sites}, 3), got {fields.shape}")
    hb = float(np.linalg.norm(fields, axis=1).max())
    if enc.n_sites > 1 and hb / j > 0.1:
        warnings.warn(f"hb/J = {hb / j:.3g} exceeds 0.1; manifold splitting is not perturbative")
    H = heisenberg_matrix(enc.graph(j)).dense() + zeeman_matrix(fields).dense()
    w = np.linalg.eigvalsh(H)
    d = enc.manifold_dim
    delta = float(w[d - 1] - w[0])
    if len(w) > d and w[d] - w[d - 1] < 10 * delta:
        raise ManifoldError(
            f"{enc.label}: logical manifold not separated (gap {w[d] - w[d - 1]:.3g}, spread {delta:.3g})"
        )
    return delta


def precession_time(delta_e):
    """Precession time in ns for a splitting in ueV."""
    if delta_e <= 0:
        raise DomainError(f"splitting must be positive, got {delta_e}")
    return HBAR_UEV_NS / (2 * np.pi * delta_e)


@dataclass(frozen=True)
class PrecessionResult:
    encoding: str
    j: float
    hb: float
    n_samples: int
    delta_e: tuple
    dt_median: float
    dt_mean: float
    dt_q1: float
    dt_q3: float
    seed: int
    excluded: int

    def row(self):
        return (self.encoding, self.j, self.hb, self.n_samples, self.dt_median, self.dt_mean,
                self.dt_q1, self.dt_q3, self.excluded)


PRECESSION_COLUMNS = ("encoding", "J_ueV", "Hb_ueV", "n", "dT_median_ns", "dT_mean_ns",
                      "dT_q1_ns", "dT_q3_ns", "excluded")


def sample_seed(seed, encoding, index):
    # No J in the key: every J sees the same field draws (common random numbers).
    return [int(seed), list(ENCODINGS).index(get_encoding(encoding).label), int(index)]


def precession_point(encoding, j, hb, n_samples=200, seed=0, model="fixed"):
    enc = get_encoding(encoding)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if j <= 0:
        raise ValueError(f"J must be positive, got {j}")
    deltas = []
    excluded = 0
    for k in range(n_samples):
        fields = sample_nuclear_fields(enc.n_sites, hb, sample_seed(seed, enc, k), model)
        try:
            de = logical_splitting(enc, j, fields)
        except ManifoldError:
            excluded += 1
            continue
        deltas.append(de)
    dts = np.array([precession_time(de) for de in deltas if de > 0])
    excluded += len(deltas) - len(dts)
    if len(dts):
        q1, med, q3 = np.percentile(dts, [25, 50, 75])
        mean = float(dts.mean())
    else:
        q1 = med = q3 = mean = float("nan")
    return PrecessionResult(enc.label, float(j), float(hb), n_samples, tuple(deltas),
                            float(med), mean, float(q1), float(q3), int(seed), excluded)


def precession_sweep(encodings, j_values, hb, n_samples=200, seed=0, map_fn=map, model="fixed"):
    """Precession statistics for every (encoding, J) pair, ordered encoding-major."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if any(j <= 0 for j in j_values):
        raise ValueError("J values must be positive")
    jobs = [(get_encoding(e), float(j)) for e in encodings for j in j_values]
    return list(map_fn(lambda job: precession_point(job[0], job[1], hb, n_samples, seed, model), jobs))
