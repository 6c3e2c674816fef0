"""Brute-force checks in a truncated number basis.

Everything here is independent of the symplectic pipeline: states are built
by diagonalising the many-body Hamiltonian on a product of truncated
oscillator spaces, and the partial transpose is a literal index swap.
Only meant for at most three sites.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

MAX_SITES = 3
MAX_BASIS = 100_000
_DENSE_LIMIT = 600
# pure states above this basis size use the Schmidt-coefficient identity
EXPLICIT_PT_LIMIT = 2000


class TruncatedMode:
    """One oscillator truncated to ``dim`` number states.

    ``scale`` stretches the position width (q -> scale q, p -> p / scale);
    the basis functions stay real, so transposition is unaffected.
    """

    def __init__(self, dim: int, scale: float = 1.0):
        if dim < 2:
            raise ValueError("dim must be at least 2")
        self.dim = dim
        self.scale = float(scale)
        self.a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
        ad = self.a.T
        self.q = self.scale * (self.a + ad) / np.sqrt(2.0)
        # p = i * p_real with p_real real antisymmetric
        self.p_real = (ad - self.a) / (np.sqrt(2.0) * self.scale)

    @property
    def p(self):
        return 1j * self.p_real

    def squares(self):
        """Exact matrix elements of q^2 and p^2 within the truncated space."""
        big = TruncatedMode(self.dim + 2, self.scale)
        d = self.dim
        q2 = (big.q @ big.q)[:d, :d]
        p2 = -(big.p_real @ big.p_real)[:d, :d]
        return q2, p2

    def commutator_defect(self):
        """max |[q, p] - i| on the upper-left (dim-1) block."""
        c = self.q @ self.p - self.p @ self.q
        k = self.dim - 1
        return float(np.abs(c[:k, :k] - 1j * np.eye(k)).max())


def weyl_matrix(z: complex, mode: TruncatedMode) -> np.ndarray:
    """exp(i (Re z q + Im z p)) on the truncated space."""
    gen = z.real * mode.q + z.imag * mode.p
    return sla.expm(1j * gen)


def weyl_diagonal_series(n: int, z: complex, max_terms: int = 400) -> float:
    """<n|W(z)|n> from its power series in |z|^2."""
    x = abs(z) ** 2
    term = 1.0
    total = 1.0
    for m in range(max_terms):
        term *= (-x / 2.0) * (n + m + 1) / (m + 1) ** 2
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-300) and m > n:
            break
    return math.exp(x / 4.0) * total


@dataclass(frozen=True)
class RhoLambda:
    """Diagonal operator with entries (1 - alpha) alpha^n, alpha = (lam - 1)/(lam + 1)."""

    lam: float
    dim: int

    @property
    def alpha(self):
        return (self.lam - 1.0) / (self.lam + 1.0)

    @property
    def diag(self):
        a = self.alpha
        return (1.0 - a) * a ** np.arange(self.dim)

    @property
    def trace(self):
        return float(self.diag.sum())

    @property
    def trace_deficit(self):
        """1 - truncated trace = alpha**dim."""
        return self.alpha**self.dim

    def trace_norm(self):
        return float(np.abs(self.diag).sum())


def rho_lambda(lam: float, dim: int) -> RhoLambda:
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return RhoLambda(float(lam), int(dim))


def characteristic(lam: float, z: complex, dim: int) -> complex:
    rho = rho_lambda(lam, dim)
    w = weyl_matrix(z, TruncatedMode(dim))
    return complex(np.dot(rho.diag, np.diag(w)))


def verify_gaussian_char(lam: float, z: complex, dim: int = 200) -> float:
    """|Tr(rho_lam W(z)) - exp(-lam |z|^2 / 4)|."""
    return abs(characteristic(lam, z, dim) - math.exp(-lam * abs(z) ** 2 / 4.0))


# ---------------------------------------------------------------------------
# many-body oracle
# ---------------------------------------------------------------------------


def _embed(op, site, n, d):
    mats = [sp.identity(d, format="csr")] * n
    mats[site] = sp.csr_matrix(op)
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out


def partial_transpose(rho, n_sites, dim, sites):
    """Transpose the tensor factors listed in ``sites`` of a density matrix on ``dim**n_sites``."""
    t = rho.reshape((dim,) * (2 * n_sites))
    axes = list(range(2 * n_sites))
    for s in sites:
        axes[s], axes[n_sites + s] = axes[n_sites + s], axes[s]
    return t.transpose(axes).reshape(rho.shape)


def trace_norm(mat):
    return float(np.abs(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))).sum())


def many_body_hamiltonian(hq, hp, dim, scales=None):
    """Sparse real matrix of sum_xy q_x hq_xy q_y + p_x hp_xy p_y."""
    n = hq.shape[0]
    scales = np.ones(n) if scales is None else np.asarray(scales)
    modes = [TruncatedMode(dim, s) for s in scales]
    H = sp.csr_matrix((dim**n, dim**n))
    for x in range(n):
        q2, p2 = modes[x].squares()
        H = H + _embed(hq[x, x] * q2 + hp[x, x] * p2, x, n, dim)
        for y in range(x + 1, n):
            if hq[x, y] != 0:
                H = H + 2.0 * hq[x, y] * (_embed(modes[x].q, x, n, dim) @ _embed(modes[y].q, y, n, dim))
            if hp[x, y] != 0:
                # p_x p_y = -p_real_x p_real_y on distinct sites
                H = H - 2.0 * hp[x, y] * (_embed(modes[x].p_real, x, n, dim) @ _embed(modes[y].p_real, y, n, dim))
    return H


def _local_scales(hq, hp):
    # width of the single-site ground state of hq_xx q^2 + hp_xx p^2
    return (np.diag(hp) / np.diag(hq)) ** 0.25


def _ground_vector(H):
    D = H.shape[0]
    if D <= _DENSE_LIMIT:
        w, v = np.linalg.eigh(H.toarray())
        return v[:, 0]
    w, v = spla.eigsh(H, k=1, which="SA", tol=1e-14, v0=np.ones(D))
    return v[:, 0]


def _schmidt(psi, n, dim, sites):
    t = psi.reshape((dim,) * n)
    rest = [s for s in range(n) if s not in sites]
    mat = t.transpose(list(sites) + rest).reshape(dim ** len(sites), -1)
    return np.linalg.svd(mat, compute_uv=False)


def pure_trace_norm_pt(psi, n, dim, sites):
    """||(|psi><psi|)^{T_1}||_1 = (sum of Schmidt coefficients)^2, without forming the D x D matrix."""
    return float(_schmidt(psi, n, dim, sites).sum() ** 2)


def _entropy_of_vector(psi, n, dim, sites):
    p = _schmidt(psi, n, dim, sites) ** 2
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def brute_state(hq, hp, dim, beta=None, scaled=True, need_rho=True):
    """Density matrix of the ground (beta=None) or thermal state, plus the ground vector if pure."""
    n = hq.shape[0]
    scales = _local_scales(hq, hp) if scaled else None
    H = many_body_hamiltonian(hq, hp, dim, scales)
    if beta is None:
        psi = _ground_vector(H)
        return (np.outer(psi, psi) if need_rho else None), psi
    E, V = np.linalg.eigh(H.toarray())
    w = np.exp(-beta * (E - E[0]))
    w /= w.sum()
    return (V * w) @ V.T, None


def _single_run(sys, dim, beta, scaled):
    n = sys.hq.shape[0]
    sites = list(sys.region0.members)
    explicit = beta is not None or dim**n <= EXPLICIT_PT_LIMIT
    rho, psi = brute_state(sys.hq, sys.hp, dim, beta, scaled, need_rho=explicit)
    if explicit:
        tn = trace_norm(partial_transpose(rho, n, dim, sites))
    else:
        tn = pure_trace_norm_pt(psi, n, dim, sites)
    ent = _entropy_of_vector(psi, n, dim, sites) if psi is not None else None
    return math.log(tn), ent


@dataclass
class OracleResult:
    negativity: float
    entropy: Optional[float]
    dim: int
    delta: float
    converged: bool
    coarse_negativity: float
    coarse_entropy: Optional[float]


def brute_negativity(sys, dim_per_mode: int, beta: Optional[float] = None, tol: float = 1e-5,
                     step: int = 10, scaled: bool = True) -> OracleResult:
    """Log-negativity (and ground-state entropy) by exact diagonalisation.

    Runs at ``dim_per_mode`` and ``dim_per_mode + step`` and reports the finer
    value; ``converged`` is False when the two differ by more than ``tol``.
    ``beta`` defaults to ``sys.beta``; None means ground state.
    """
    beta = sys.beta if beta is None else beta
    n = sys.hq.shape[0]
    if n > MAX_SITES:
        raise ValueError(f"oracle supports at most {MAX_SITES} sites, got {n}")
    fine = dim_per_mode + step
    if fine**n > MAX_BASIS:
        raise ValueError(f"basis size {fine}**{n} exceeds {MAX_BASIS}")
    n0, s0 = _single_run(sys, dim_per_mode, beta, scaled)
    n1, s1 = _single_run(sys, fine, beta, scaled)
    delta = abs(n1 - n0)
    if s0 is not None:
        delta = max(delta, abs(s1 - s0))
    return OracleResult(n1, s1, fine, delta, bool(delta < tol), n0, s0)


def converged_negativity(sys, dim_per_mode: int, beta: Optional[float] = None, tol: float = 1e-5,
                         step: int = 10, scaled: bool = True) -> OracleResult:
    """Like ``brute_negativity`` but raises ``dim_per_mode`` by ``step`` until converged or the basis cap is hit."""
    n = sys.hq.shape[0]
    dim = dim_per_mode
    while True:
        res = brute_negativity(sys, dim, beta, tol, step, scaled)
        if res.converged or (dim + 2 * step) ** n > MAX_BASIS:
            return res
        dim += step
