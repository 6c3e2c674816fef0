"""Invariant suite with optional fault injection.

``inject="clip"`` raises the clipping tolerance of the negativity sum to 0.5;
``inject="sign"`` drops the sign flip of the partial transpose.  Either must
make at least one check fail.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csgraph

from .. import _kernels, disorder, fock_oracle, gaussian, graph as gr, oscillator as osc
from .config import ExperimentConfig

INJECTIONS = (None, "clip", "sign")


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class SelfcheckReport:
    results: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r.ok for r in self.results)

    def lines(self):
        return [f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}" for r in self.results]

    def as_dict(self):
        return {"ok": self.ok, "checks": [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in self.results]}


def pipeline_negativity(sys, H, beta=None, inject=None):
    """Negativity through the symplectic route, with an optional planted fault."""
    cov = gaussian.covariance_blocks(sys, H, beta)
    tau = 0.5 if inject == "clip" else gaussian.CLIP_TOL
    if inject == "sign":
        spec = gaussian.symplectic_spectrum(cov.M1, cov.M2)
    else:
        spec = gaussian.transposed_spectrum(cov, sys.region0)
    return gaussian.log_negativity(spec, tau)


def _chain_samples(cfg: ExperimentConfig):
    g = gr.path(2 * cfg.sizes[0] + 1)
    reg = gr.centered_region(g, min(cfg.radius, cfg.sizes[0]))
    spec = cfg.disorder_spec()
    for i in range(cfg.samples):
        k = disorder.draw(spec, i, g.n_vertices, g.site_keys).k
        sys = osc.build_system(g, k, reg, m=cfg.m, lam=cfg.lam, g=cfg.g)
        yield i, sys, osc.effective_h(sys.hq, sys.hp)


def check_kernels(cfg, inject):
    rng = np.random.default_rng(cfg.seed)
    g = gr.box(2, 5)
    indptr, indices = gr._csr(g.n_vertices, g.edges)
    a = _kernels.bfs_all_pairs_numpy(indptr, indices, g.n_vertices)
    b = _kernels.bfs_all_pairs_numba(indptr, indices, g.n_vertices)
    mat = rng.standard_normal((30, 30))
    inside = rng.random(30) < 0.4
    c1 = _kernels.cross_abs_sum_numpy(mat, inside)
    c2 = float(_kernels.cross_abs_sum_numba(mat, inside))
    ok = np.array_equal(a, b) and abs(c1 - c2) <= 1e-12 * abs(c1)
    return ok, f"backend={_kernels.BACKEND}, |cross-sum diff|={abs(c1 - c2):.2e}"


def check_distances(cfg, inject):
    worst = 0
    for g in (gr.box(2, 5), gr.bethe(2, 3), gr.path(9)):
        ref = csgraph.shortest_path(g.adjacency(), unweighted=True)
        worst = max(worst, int(np.abs(ref - g.dist).max()))
    return worst == 0, f"max |BFS - reference| = {worst}"


def check_disorder(cfg, inject):
    spec = cfg.disorder_spec()
    a = disorder.draw(spec, 3, 500).k
    b = disorder.draw(spec, 3, 500).k
    ok = np.array_equal(a, b) and a.min() > 0 and a.max() <= spec.k_max
    return ok, f"repeatable={np.array_equal(a, b)}, range=({a.min():.3g}, {a.max():.3g}]"


def check_decomposition(cfg, inject):
    worst = 0.0
    for _, _, H in _chain_samples(cfg):
        worst = max(worst, *H.residuals())
    return worst < 1e-12, f"max residual {worst:.2e}"


def check_pure_state(cfg, inject):
    worst = 0.0
    for _, sys, H in _chain_samples(cfg):
        cov = gaussian.covariance_blocks(sys, H)
        lam = gaussian.symplectic_spectrum(cov.M1, cov.M2).lambdas
        worst = max(worst, float(np.abs(lam - 1).max()))
    return worst < 1e-8, f"max |nu - 1| = {worst:.2e}"


def check_thermal_state(cfg, inject):
    low = math.inf
    for _, sys, H in _chain_samples(cfg):
        cov = gaussian.covariance_blocks(sys, H, beta=1.0)
        low = min(low, float(gaussian.symplectic_spectrum(cov.M1, cov.M2).lambdas[0]))
    return low >= 1 - 1e-8, f"min nu = {low:.12g}"


def check_ordering(cfg, inject):
    """S <= N <= bound, and N unchanged under region <-> complement."""
    msgs = []
    for i, sys, H in _chain_samples(cfg):
        n = pipeline_negativity(sys, H, inject=inject)
        rep = gaussian.analyze(sys, H)
        comp = osc.OscillatorSystem(sys.graph, sys.region0.complement(), sys.hq, sys.hp)
        n_c = pipeline_negativity(comp, H, inject=inject)
        if rep.entropy > n + 1e-9:
            msgs.append(f"sample {i}: S={rep.entropy:.6g} > N={n:.6g}")
        if n > rep.negativity_bound * (1 + 1e-9):
            msgs.append(f"sample {i}: N={n:.6g} > bound={rep.negativity_bound:.6g}")
        if abs(n - n_c) > 1e-10 * max(1.0, n):
            msgs.append(f"sample {i}: N={n:.6g} but complement gives {n_c:.6g}")
    return not msgs, "; ".join(msgs[:3]) or "S <= N <= bound, partition symmetric"


def check_det_and_routes(cfg, inject):
    worst_det, worst_route = 0.0, 0.0
    for _, sys, H in _chain_samples(cfg):
        cov = gaussian.covariance_blocks(sys, H)
        a = gaussian.transposed_spectrum(cov, sys.region0, "block_shortcut").lambdas
        b = gaussian.transposed_spectrum(cov, sys.region0, "general_JM").lambdas
        worst_route = max(worst_route, float(np.abs(a - b).max()))
        worst_det = max(worst_det, abs(float(np.sum(2 * np.log(a)))))
    ok = worst_det < 1e-8 and worst_route < 1e-9
    return ok, f"|log det L| <= {worst_det:.2e}, route gap {worst_route:.2e}"


def check_oracle(cfg, inject):
    g = gr.path(2)
    sys = osc.build_system(g, [1.0, 1.0], [0], m=1.0, lam=1.0, g=1.0)
    H = osc.effective_h(sys.hq, sys.hp)
    gaps = []
    for beta in (None, 1.0 / math.sqrt(H.min_eig)):
        ref = fock_oracle.brute_negativity(sys, 30, beta=beta)
        if not ref.converged:
            return False, f"oracle not converged (delta {ref.delta:.2e})"
        gaps.append(abs(pipeline_negativity(sys, H, beta, inject) - ref.negativity))
    worst = max(gaps)
    return worst < 1e-4, f"max |symplectic - brute force| = {worst:.2e}"


def check_trace_norm(cfg, inject):
    worst = 0.0
    for lam in (0.25, 0.5, 0.9, 1.0, 2.0, 5.0):
        worst = max(worst, abs(fock_oracle.rho_lambda(lam, 200).trace_norm() - max(1.0, 1.0 / lam)))
    return worst < 1e-8, f"max deviation {worst:.2e}"


def check_boundary_sum_bound(cfg, inject):
    g = gr.path(12)
    fails = 0
    for mu in (0.5, 1.0, 2.0):
        c = gr.c_mu(g, mu)
        for lo in range(12):
            for hi in range(lo + 1, 13):
                reg = gr.region(g, range(lo, hi))
                if gr.boundary_sum(g, reg, mu) > c**2 * len(gr.boundary(g, reg)):
                    fails += 1
    return fails == 0, f"{fails} interval(s) violate the bound"


CHECKS = [
    ("kernel backends agree", check_kernels),
    ("BFS distances", check_distances),
    ("disorder determinism and support", check_disorder),
    ("eigendecomposition residuals", check_decomposition),
    ("pure-state symplectic eigenvalues = 1", check_pure_state),
    ("thermal symplectic eigenvalues >= 1", check_thermal_state),
    ("S <= N <= bound, partition symmetry", check_ordering),
    ("det L = 1 and Williamson route", check_det_and_routes),
    ("two-site oracle agreement", check_oracle),
    ("trace norm of rho_lambda", check_trace_norm),
    ("boundary sum bound on 12-chain", check_boundary_sum_bound),
]


def run_selfcheck(cfg: ExperimentConfig, inject=None) -> SelfcheckReport:
    if inject not in INJECTIONS:
        raise ValueError(f"unknown injection {inject!r}; expected one of {INJECTIONS[1:]}")
    report = SelfcheckReport()
    for name, fn in CHECKS:
        try:
            ok, detail = fn(cfg, inject)
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        report.results.append(CheckResult(name, bool(ok), detail))
    return report
