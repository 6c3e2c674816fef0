"""Single-particle matrices of the disordered oscillator system.

H = sum_xy q_x hq_xy q_y + p_x hp_xy p_y with hq = lambda * (graph Laplacian)
+ diag(g k_x / 2) and, by default, hp = I / (2m).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import spectra
from .errors import AssumptionViolation, NotPositiveDefinite
from .graph import Graph, Region

PD_REL_THRESHOLD = 1e-13


@dataclass(frozen=True, eq=False)
class OscillatorSystem:
    graph: Graph
    region0: Region
    hq: np.ndarray
    hp: np.ndarray
    m: float = 1.0
    lam: float = 1.0
    g: float = 1.0
    beta: Optional[float] = None

    @property
    def n(self):
        return self.hq.shape[0]


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    """h = hp^{1/2} hq hp^{1/2} with its eigendecomposition.

    ``hp_scalar`` is set when hp is a multiple of the identity; the square
    roots of hp are then diagonal.
    """

    h: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    hp_sqrt: np.ndarray
    hp_inv_sqrt: np.ndarray
    hp_scalar: Optional[float] = None

    @property
    def min_eig(self):
        return float(self.eigenvalues[0])

    @property
    def max_eig(self):
        return float(self.eigenvalues[-1])

    @property
    def condition_number(self):
        return self.max_eig / self.min_eig

    @property
    def frequencies(self):
        """Normal-mode frequencies gamma_l = sqrt(eigenvalues of h)."""
        return np.sqrt(self.eigenvalues)

    @property
    def ground_state_gap(self):
        return 2.0 * np.sqrt(self.min_eig)

    def residuals(self):
        return spectra.decomposition_residuals(self.h, self.eigenvalues, self.eigenvectors)


def assemble_hq(g: Graph, k, lam: float, g_disorder: float) -> np.ndarray:
    k = np.asarray(getattr(k, "k", k), dtype=float)
    if k.shape != (g.n_vertices,):
        raise ValueError(f"need {g.n_vertices} spring constants, got shape {k.shape}")
    hq = lam * g.laplacian()
    hq[np.diag_indices_from(hq)] += 0.5 * g_disorder * k
    return hq


def assemble_hp(g: Graph, m: Optional[float] = None, c: Optional[float] = None, delta: float = 0.0) -> np.ndarray:
    """Kinetic matrix: ``I/(2m)`` when ``m`` is given, else the band ``c I + delta A``."""
    n = g.n_vertices
    if m is not None:
        if not m > 0:
            raise ValueError("mass must be positive")
        return np.eye(n) / (2.0 * m)
    if c is None or not c > 0:
        raise ValueError("band kinetic matrix needs c > 0")
    hp = c * np.eye(n) + delta * g.adjacency()
    w = np.linalg.eigvalsh(hp)
    if w[0] <= 0:
        raise NotPositiveDefinite(w[0], what="hp")
    return hp


def _scalar_multiple_of_identity(mat):
    d = np.diag(mat)
    if np.count_nonzero(mat - np.diag(d)) == 0 and np.all(d == d[0]):
        return float(d[0])
    return None


def effective_h(hq: np.ndarray, hp: np.ndarray, rel_threshold: float = PD_REL_THRESHOLD) -> EffectiveHamiltonian:
    """Form h = hp^{1/2} hq hp^{1/2} and decompose it.

    Raises NotPositiveDefinite (carrying ``min_eig``) when the smallest
    eigenvalue is at or below ``rel_threshold * ||h||``.
    """
    n = hq.shape[0]
    c = _scalar_multiple_of_identity(hp)
    if c is not None:
        if not c > 0:
            raise NotPositiveDefinite(c, what="hp")
        s = np.sqrt(c)
        hp_sqrt, hp_inv_sqrt = s * np.eye(n), np.eye(n) / s
        h = c * hq
    else:
        w, v = spectra.eigh(hp)
        if w[0] <= 0:
            raise NotPositiveDefinite(w[0], what="hp")
        hp_sqrt = spectra.from_eig(np.sqrt(w), v)
        hp_inv_sqrt = spectra.from_eig(1.0 / np.sqrt(w), v)
        h = hp_sqrt @ hq @ hp_sqrt
    h = 0.5 * (h + h.T)
    vals, vecs = spectra.eigh(h)
    threshold = rel_threshold * max(abs(vals[0]), abs(vals[-1]))
    if vals[0] <= threshold:
        raise NotPositiveDefinite(vals[0], threshold, what="effective Hamiltonian")
    return EffectiveHamiltonian(h, vals, vecs, hp_sqrt, hp_inv_sqrt, c)


def build_system(graph, k, region0, m=1.0, lam=1.0, g=1.0, hp=None, beta=None) -> OscillatorSystem:
    """Convenience constructor for the disordered model with hp = I/(2m) unless ``hp`` is given."""
    hq = assemble_hq(graph, k, lam, g)
    if hp is None:
        hp = assemble_hp(graph, m=m)
    if not isinstance(region0, Region):
        region0 = Region(tuple(region0), graph.n_vertices)
    return OscillatorSystem(graph, region0, hq, np.asarray(hp, dtype=float), m, lam, g, beta)


def hq_norm_bound(graph: Graph, lam: float, g: float, k_max: float) -> float:
    return 2.0 * lam * graph.max_degree + 0.5 * g * k_max


def assumption_report(sys: OscillatorSystem, bound: Optional[float] = None) -> dict:
    """Operator norms ||hp||, ||hp^{-1}||, ||hq||; raises if any exceeds ``bound``."""
    wp = np.linalg.eigvalsh(sys.hp)
    wq = np.linalg.eigvalsh(sys.hq)
    if wp[0] <= 0:
        raise NotPositiveDefinite(wp[0], what="hp")
    if wq[0] <= 0:
        raise NotPositiveDefinite(wq[0], what="hq")
    report = {"hp_norm": float(wp[-1]), "hp_inv_norm": float(1.0 / wp[0]), "hq_norm": float(wq[-1])}
    if bound is not None:
        bad = {k: v for k, v in report.items() if not v <= bound}
        if bad:
            raise AssumptionViolation(f"norms exceed C={bound}: {bad}")
    return report
