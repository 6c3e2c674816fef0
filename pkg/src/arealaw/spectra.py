"""Functional calculus on a symmetric positive-definite matrix via one eigendecomposition."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotPositiveDefinite

COTH_SERIES_CUTOFF = 1e-4

TAGS = ("inv_sqrt", "sqrt", "sqrt_coth", "inv_sqrt_coth", "sqrt_tanh", "inv_sqrt_tanh", "log")
_THERMAL = {"sqrt_coth", "inv_sqrt_coth", "sqrt_tanh", "inv_sqrt_tanh"}


def coth_stable(x):
    """coth for x > 0: ``1 + 2/(e^{2x} - 1)`` above 1e-4, Laurent series below."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise ValueError("coth_stable needs x > 0")
    small = xa < COTH_SERIES_CUTOFF
    with np.errstate(over="ignore"):
        big = 1.0 + 2.0 / np.expm1(2.0 * np.where(small, 1.0, xa))
    xs = np.where(small, xa, 1.0)
    series = 1.0 / xs + xs / 3.0 - xs**3 / 45.0
    out = np.where(small, series, big)
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class SpectralFunction:
    tag: str
    beta: Optional[float] = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown spectral function {self.tag!r}")
        if self.tag in _THERMAL:
            if self.beta is None or not self.beta > 0:
                raise ValueError(f"{self.tag} needs beta > 0")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(~(t > 0)):
            raise NotPositiveDefinite(np.min(t), what=f"argument of {self.tag}")
        s = np.sqrt(t)
        tag = self.tag
        if tag == "sqrt":
            return s
        if tag == "inv_sqrt":
            return 1.0 / s
        if tag == "log":
            return np.log(t)
        b = self.beta
        if tag == "sqrt_coth":
            return s * coth_stable(b * s)
        if tag == "inv_sqrt_coth":
            return coth_stable(b * s) / s
        if tag == "sqrt_tanh":
            return s * np.tanh(b * s)
        return np.tanh(b * s) / s  # inv_sqrt_tanh


def inv_sqrt():
    return SpectralFunction("inv_sqrt")


def sqrt():
    return SpectralFunction("sqrt")


def eigh(mat):
    """Symmetric eigendecomposition with ascending eigenvalues."""
    mat = np.asarray(mat, dtype=float)
    w, v = np.linalg.eigh(0.5 * (mat + mat.T))
    return w, v


def from_eig(values, vectors):
    """V diag(values) V^T, symmetrised."""
    out = (vectors * values) @ vectors.T
    return 0.5 * (out + out.T)


def apply(f: SpectralFunction, H) -> np.ndarray:
    """f(H) for any object with ``eigenvalues``/``eigenvectors`` (ascending, orthonormal)."""
    w = np.asarray(H.eigenvalues)
    if w[0] <= 0:
        raise NotPositiveDefinite(w[0], what="effective Hamiltonian")
    return from_eig(f(w), H.eigenvectors)


def decomposition_residuals(mat, values, vectors):
    """(||V D V^T - A|| / ||A||, ||V^T V - I||) in spectral norm."""
    recon = from_eig(values, vectors)
    scale = max(np.linalg.norm(mat, 2), np.finfo(float).tiny)
    res = np.linalg.norm(recon - mat, 2) / scale
    orth = np.linalg.norm(vectors.T @ vectors - np.eye(len(values)), 2)
    return float(res), float(orth)


def sqrtm_psd(mat):
    """Symmetric square root of a positive-definite matrix; raises if not PD."""
    w, v = eigh(mat)
    if w[0] <= 0:
        raise NotPositiveDefinite(w[0])
    return from_eig(np.sqrt(w), v)
