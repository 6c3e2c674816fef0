"""Covariance blocks, symplectic spectra, logarithmic negativity and entropy.

States are described by the block-diagonal matrix M = diag(M1, M2) in the
(q, p) basis, with characteristic function exp(-(f, M f)/4).  Partial
transposition on a subregion flips the sign of the momentum components
there: M2 -> P M2 P.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import xlogy

from . import _kernels, spectra
from .errors import NotPositiveDefinite, NumericalConsistencyError
from .graph import Region
from .oscillator import EffectiveHamiltonian, OscillatorSystem
from .spectra import SpectralFunction

CLIP_TOL = 1e-10
STATE_TOL = 1e-8
ROUTES = ("block_shortcut", "general_JM")


@dataclass(frozen=True, eq=False)
class CovariancePair:
    M1: np.ndarray
    M2: np.ndarray
    kind: str = "ground"
    beta: Optional[float] = None


@dataclass(frozen=True, eq=False)
class SignMatrix:
    diag: np.ndarray

    @classmethod
    def for_region(cls, region0: Region):
        return cls(np.where(region0.mask, -1.0, 1.0))

    def conjugate(self, mat):
        """P @ mat @ P."""
        return mat * np.outer(self.diag, self.diag)


@dataclass(frozen=True, eq=False)
class SymplecticSpectrum:
    lambdas: np.ndarray
    route: str = "block_shortcut"


@dataclass
class NegativityReport:
    negativity: float
    lambdas_below_one: int
    negativity_bound: float
    entropy: Optional[float] = None
    sample_meta: dict = field(default_factory=dict)


def sign_matrix(region0: Region) -> SignMatrix:
    return SignMatrix.for_region(region0)


def covariance_blocks(sys: OscillatorSystem, H: EffectiveHamiltonian, beta: Optional[float] = None) -> CovariancePair:
    """Ground-state blocks, or thermal blocks when ``beta`` (or ``sys.beta``) is set."""
    beta = sys.beta if beta is None else beta
    if beta is None:
        f1, f2, kind = SpectralFunction("inv_sqrt"), SpectralFunction("sqrt"), "ground"
    else:
        f1, f2, kind = SpectralFunction("inv_sqrt_coth", beta), SpectralFunction("sqrt_coth", beta), "thermal"
    s, si = H.hp_sqrt, H.hp_inv_sqrt
    m1 = s @ spectra.apply(f1, H) @ s
    m2 = si @ spectra.apply(f2, H) @ si
    return CovariancePair(0.5 * (m1 + m1.T), 0.5 * (m2 + m2.T), kind, beta)


def transposed_core(cov: CovariancePair, P: SignMatrix) -> np.ndarray:
    """L = M1^{1/2} P M2 P M1^{1/2}."""
    if cov.M1.shape != cov.M2.shape or cov.M1.shape[0] != len(P.diag):
        raise ValueError("dimension mismatch between covariance blocks and sign matrix")
    r = spectra.sqrtm_psd(cov.M1)
    core = r @ P.conjugate(cov.M2) @ r
    return 0.5 * (core + core.T)


def _standard_J(n):
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = -np.eye(n)
    j[n:, :n] = np.eye(n)
    return j


def symplectic_spectrum(M1, M2, route: str = "block_shortcut") -> SymplecticSpectrum:
    """Symplectic eigenvalues of diag(M1, M2), ascending.

    ``block_shortcut``: square roots of eig(M1^{1/2} M2 M1^{1/2}).
    ``general_JM``: positive eigenvalues of i M^{1/2} J M^{1/2} for the full
    2n x 2n matrix.
    """
    M1 = np.asarray(M1, dtype=float)
    M2 = np.asarray(M2, dtype=float)
    n = M1.shape[0]
    if route == "block_shortcut":
        r = spectra.sqrtm_psd(M1)
        w = np.linalg.eigvalsh(r @ M2 @ r)
        if w[0] <= 0:
            raise NotPositiveDefinite(w[0], what="M2")
        lam = np.sqrt(w)
    elif route == "general_JM":
        full = np.zeros((2 * n, 2 * n))
        full[:n, :n] = M1
        full[n:, n:] = M2
        root = spectra.sqrtm_psd(full)
        herm = 1j * (root @ _standard_J(n) @ root)
        w = np.linalg.eigvalsh(0.5 * (herm + herm.conj().T))
        lam = w[n:]
    else:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    return SymplecticSpectrum(np.sort(lam), route)


def transposed_spectrum(cov: CovariancePair, region0: Region, route: str = "block_shortcut") -> SymplecticSpectrum:
    """Symplectic spectrum of the partially transposed state on ``region0``."""
    P = sign_matrix(region0)
    return symplectic_spectrum(cov.M1, P.conjugate(cov.M2), route)


def log_negativity(spectrum, tau: float = CLIP_TOL) -> float:
    """Sum of log(1/lambda_j) over lambda_j < 1 - tau."""
    lam = np.asarray(getattr(spectrum, "lambdas", spectrum), dtype=float)
    below = lam[lam < 1.0 - tau]
    return float(-np.log(below).sum()) if below.size else 0.0


def count_below_one(spectrum, tau: float = CLIP_TOL) -> int:
    lam = np.asarray(getattr(spectrum, "lambdas", spectrum), dtype=float)
    return int(np.count_nonzero(lam < 1.0 - tau))


def _entropy_terms(nu):
    a = 0.5 * (nu + 1.0)
    b = 0.5 * (nu - 1.0)
    return xlogy(a, a) - xlogy(b, b)


def entanglement_entropy(cov: CovariancePair, region0: Region) -> float:
    """Von Neumann entropy of the ground state restricted to ``region0``."""
    if cov.kind != "ground":
        raise ValueError("entanglement entropy is defined here for ground states only")
    idx = region0.index
    if idx.size == 0:
        return 0.0
    sub = np.ix_(idx, idx)
    nu = symplectic_spectrum(cov.M1[sub], cov.M2[sub]).lambdas
    if nu[0] < 1.0 - STATE_TOL:
        raise NumericalConsistencyError(f"reduced symplectic eigenvalue {nu[0]:.12g} < 1")
    nu = np.maximum(nu, 1.0)
    return float(np.sum(_entropy_terms(nu)))


def inverse_blocks(H: EffectiveHamiltonian, beta: Optional[float] = None):
    """(M1^{-1}, M2^{-1}) as used by the negativity bound; tanh-weighted when ``beta`` is set."""
    if beta is None:
        g1, g2 = SpectralFunction("sqrt"), SpectralFunction("inv_sqrt")
    else:
        g1, g2 = SpectralFunction("sqrt_tanh", beta), SpectralFunction("inv_sqrt_tanh", beta)
    s, si = H.hp_sqrt, H.hp_inv_sqrt
    m1inv = si @ spectra.apply(g1, H) @ si
    m2inv = s @ spectra.apply(g2, H) @ s
    return m1inv, m2inv, g1


def negativity_upper_bound(sys: OscillatorSystem, H: EffectiveHamiltonian, beta: Optional[float] = None) -> float:
    """2 ||M1^{-1}|| sum_{x in region0, y outside} |M2^{-1}[x, y]|."""
    beta = sys.beta if beta is None else beta
    m1inv, m2inv, g1 = inverse_blocks(H, beta)
    if H.hp_scalar is not None:
        norm = float(np.max(g1(H.eigenvalues))) / H.hp_scalar
    else:
        norm = float(np.linalg.eigvalsh(0.5 * (m1inv + m1inv.T))[-1])
    mask = sys.region0.mask
    if mask.all() or not mask.any():
        return 0.0
    return 2.0 * norm * _kernels.cross_abs_sum(m2inv, mask)


def analyze(sys: OscillatorSystem, H: EffectiveHamiltonian, beta: Optional[float] = None,
            with_entropy: bool = True, route: str = "block_shortcut", tau: float = CLIP_TOL) -> NegativityReport:
    """Negativity, bound and (ground state) entropy for one system."""
    beta = sys.beta if beta is None else beta
    cov = covariance_blocks(sys, H, beta)
    spec = transposed_spectrum(cov, sys.region0, route)
    ent = entanglement_entropy(cov, sys.region0) if (with_entropy and cov.kind == "ground") else None
    return NegativityReport(
        negativity=log_negativity(spec, tau),
        lambdas_below_one=count_below_one(spec, tau),
        negativity_bound=negativity_upper_bound(sys, H, beta),
        entropy=ent,
        sample_meta={"condition_number": H.condition_number, "min_eig": H.min_eig},
    )
