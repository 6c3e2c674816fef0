"""Disorder-averaged experiments: area law, thermal sweep, correlator decay."""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from threadpoolctl import threadpool_limits

from .. import _kernels, disorder, gaussian, graph as gr, oscillator as osc, spectra
from ..errors import NotPositiveDefinite
from . import output
from .config import ConfigError, ExperimentConfig

BOUND_RTOL = 1e-9
BOUND_ATOL = 1e-12
ENTROPY_ATOL = 1e-9


class AllRejected(RuntimeError):
    def __init__(self, n, requested, min_eigs):
        self.n = n
        self.requested = requested
        finite = [x for x in min_eigs if np.isfinite(x)]
        detail = f"; min_eig range [{min(finite):.3g}, {max(finite):.3g}]" if finite else ""
        super().__init__(f"all {requested} samples rejected at n={n}{detail}")


@dataclass
class EnsembleResult:
    kind: str
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    correlator: Optional[dict] = None
    timing: dict = field(default_factory=dict)

    def summary(self) -> dict:
        out = {
            "kind": self.kind,
            "config": self.config.echo(),
            "config_hash": self.config.digest(),
            "aggregates": self.aggregates,
            "checks": self.checks,
            "violations": self.violations,
        }
        if self.correlator is not None:
            out["correlator"] = {k: v for k, v in self.correlator.items() if k != "tables"}
        return out


# ---------------------------------------------------------------------------
# volumes and samples
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def volume_graph(cfg: ExperimentConfig, n: int) -> gr.Graph:
    if cfg.family == "path":
        return gr.path(2 * n + 1)
    if cfg.family == "box":
        return gr.box(cfg.dimension, 2 * n + 1)
    if cfg.family == "bethe":
        return gr.bethe(cfg.branching, n, cfg.regular_root)
    return gr.load_edge_list(cfg.edge_file)


def volume_region(cfg: ExperimentConfig, g: gr.Graph) -> gr.Region:
    if cfg.sites is not None:
        reg = gr.region(g, cfg.sites)
    else:
        reg = gr.centered_region(g, cfg.radius)
    return reg.complement() if cfg.complement else reg


def sample_system(cfg: ExperimentConfig, n: int, index: int):
    g = volume_graph(cfg, n)
    k = disorder.draw(cfg.disorder_spec(), index, g.n_vertices, g.site_keys)
    return osc.build_system(g, k.k, volume_region(cfg, g), m=cfg.m, lam=cfg.lam, g=cfg.g)


def _beta_list(cfg):
    return ([None] if cfg.ground else []) + list(cfg.betas)


def _negativity_task(args):
    cfg, n, index = args
    sys = sample_system(cfg, n, index)
    betas = _beta_list(cfg)
    try:
        H = osc.effective_h(sys.hq, sys.hp)
    except NotPositiveDefinite as exc:
        nan = float("nan")
        rows = [(index, n, math.inf if b is None else b, nan, nan, nan, exc.min_eig, 1) for b in betas]
        return rows, nan, []
    rows, bad = [], []
    for b in betas:
        rep = gaussian.analyze(sys, H, beta=b, with_entropy=b is None)
        ent = rep.entropy if rep.entropy is not None else float("nan")
        if rep.negativity > rep.negativity_bound * (1 + BOUND_RTOL) + BOUND_ATOL:
            bad.append(f"sample {index}, n={n}, beta={b}: negativity {rep.negativity!r} exceeds bound {rep.negativity_bound!r}")
        if b is None and ent > rep.negativity + ENTROPY_ATOL:
            bad.append(f"sample {index}, n={n}: entropy {ent!r} exceeds negativity {rep.negativity!r}")
        rows.append((index, n, math.inf if b is None else b, rep.negativity, ent, rep.negativity_bound, H.min_eig, 0))
    return rows, H.condition_number, bad


def _init_worker():
    threadpool_limits(1)


def map_samples(fn, tasks, workers: int):
    """fn over tasks, results in task order; linear algebra pinned to one thread."""
    if workers <= 1 or len(tasks) <= 1:
        with threadpool_limits(1):
            return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def mean_se(values):
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return float("nan"), float("nan")
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else float("nan")
    return float(np.mean(v)), se


def _aggregate(cfg, n, beta, rows, conds):
    g = volume_graph(cfg, n)
    reg = volume_region(cfg, g)
    acc = [r for r in rows if not r[7]]
    neg_mean, neg_se = mean_se([r[3] for r in acc])
    bnd_mean, bnd_se = mean_se([r[5] for r in acc])
    agg = {
        "n": n,
        "beta": "ground" if beta is None else beta,
        "n_vertices": g.n_vertices,
        "region_size": len(reg),
        "boundary_size": len(gr.boundary(g, reg)),
        "requested": len(rows),
        "accepted": len(acc),
        "rejected": len(rows) - len(acc),
        "mean_negativity": neg_mean,
        "se_negativity": neg_se,
        "mean_bound": bnd_mean,
        "se_bound": bnd_se,
    }
    if beta is None:
        agg["mean_entropy"], agg["se_entropy"] = mean_se([r[4] for r in acc])
    b = agg["boundary_size"]
    agg["negativity_per_boundary"] = neg_mean / b if b else float("nan")
    finite = [c for c in conds if np.isfinite(c)]
    agg["max_condition_number"] = max(finite) if finite else float("nan")
    return agg


def _ensemble(cfg: ExperimentConfig, kind: str) -> EnsembleResult:
    t0 = time.perf_counter()
    res = EnsembleResult(kind, cfg)
    betas = _beta_list(cfg)
    sizes = list(cfg.sizes) if cfg.family != "custom" else [cfg.sizes[0]]
    for n in sizes:
        tasks = [(cfg, n, i) for i in range(cfg.samples)]
        results = map_samples(_negativity_task, tasks, cfg.workers)
        conds = [c for _, c, _ in results]
        for j, b in enumerate(betas):
            rows_b = [rows[j] for rows, _, _ in results]
            res.rows.extend(rows_b)
            agg = _aggregate(cfg, n, b, rows_b, conds)
            res.aggregates.append(agg)
            if agg["accepted"] == 0:
                raise AllRejected(n, cfg.samples, [r[6] for r in rows_b])
        for _, _, bad in results:
            res.violations.extend(bad)
    res.rows.sort(key=lambda r: (r[1], r[0], betas.index(None if math.isinf(r[2]) else r[2])))
    res.checks["invariant_violations"] = len(res.violations)
    res.timing["wall_seconds"] = time.perf_counter() - t0
    return res


def _joint(a, b):
    diff = a["mean_negativity"] - b["mean_negativity"]
    se = math.hypot(a["se_negativity"], b["se_negativity"])
    return diff, se


def plateau_check(aggregates, n_small, n_large, beta="ground", k=2.0) -> dict:
    """|mean N(n_large) - mean N(n_small)| <= k joint standard errors."""
    pick = {(a["n"], a["beta"]): a for a in aggregates}
    diff, se = _joint(pick[(n_large, beta)], pick[(n_small, beta)])
    ok = abs(diff) <= k * se if se > 0 else abs(diff) <= 1e-12
    return {"n_small": n_small, "n_large": n_large, "beta": beta, "difference": diff, "joint_se": se, "within": bool(ok)}


def run_area_law(cfg: ExperimentConfig) -> EnsembleResult:
    res = _ensemble(cfg, "area_law")
    sizes = sorted(set(cfg.sizes))
    if len(sizes) >= 2 and cfg.family != "custom":
        res.checks["plateau"] = [plateau_check(res.aggregates, sizes[-2], sizes[-1], b if b is not None else "ground")
                                 for b in _beta_list(cfg)]
    return res


def run_thermal_sweep(cfg: ExperimentConfig) -> EnsembleResult:
    if not cfg.betas:
        raise ConfigError("thermal sweep needs thermal.betas")
    res = _ensemble(cfg, "thermal_sweep")
    if cfg.ground:
        comp = []
        for n in sorted(set(cfg.sizes)):
            pick = {a["beta"]: a for a in res.aggregates if a["n"] == n}
            bmax = max(cfg.betas)
            diff, se = _joint(pick[bmax], pick["ground"])
            ok = abs(diff) <= 2 * se if se > 0 else abs(diff) <= 1e-12
            comp.append({"n": n, "beta": bmax, "difference": diff, "joint_se": se, "within": bool(ok)})
        res.checks["large_beta_vs_ground"] = comp
    return res


# ---------------------------------------------------------------------------
# correlator decay
# ---------------------------------------------------------------------------


MIN_FIT_POINTS = 4


def _correlator_task(args):
    cfg, n, index, max_d = args
    sys = sample_system(cfg, n, index)
    try:
        H = osc.effective_h(sys.hq, sys.hp)
    except NotPositiveDefinite:
        return None
    g = sys.graph
    x0 = g.center()
    w, v = H.eigenvalues, H.eigenvectors
    funcs = [spectra.SpectralFunction("inv_sqrt")]
    funcs += [spectra.SpectralFunction("inv_sqrt_tanh", b) for b in cfg.betas]
    dist = np.ascontiguousarray(g.dist[x0])
    means = []
    for f in funcs:
        row = (v[x0] * f(w)) @ v.T
        sums, counts = _kernels.bin_by_distance(np.abs(row), dist, max_d)
        with np.errstate(invalid="ignore"):
            means.append(np.where(counts > 0, sums / np.maximum(counts, 1), np.nan))
    return np.array(means), 1.0 / math.sqrt(H.min_eig)


def fit_decay(distances, means, stderrs, noise_floor=0.0) -> dict:
    """Weighted least squares of log(mean) = log C' - mu' d over d >= 1.

    Bins whose mean is at or below ``noise_floor`` are dropped; fewer than four
    remaining distances refuses the fit.
    """
    d = np.asarray(distances, dtype=float)
    m = np.asarray(means, dtype=float)
    s = np.asarray(stderrs, dtype=float)
    keep = (d >= 1) & np.isfinite(m) & (m > noise_floor)
    if np.count_nonzero(keep) < MIN_FIT_POINTS:
        return {"status": "refused", "reason": f"only {int(np.count_nonzero(keep))} usable distances",
                "distances_used": [int(x) for x in d[keep]]}
    d, m, s = d[keep], m[keep], s[keep]
    y = np.log(m)
    rel = s / m
    if np.all(np.isfinite(rel)) and np.all(rel > 0):
        w = 1.0 / rel**2
    else:
        w = np.ones_like(y)
    coef, cov = np.polyfit(d, y, 1, w=np.sqrt(w), cov="unscaled")
    slope, icpt = coef
    fitted = slope * d + icpt
    ybar = np.average(y, weights=w)
    ss_res = float(np.sum(w * (y - fitted) ** 2))
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    dof = len(d) - 2
    scale = ss_res / dof if dof > 0 else float("nan")
    return {
        "status": "ok",
        "log_c": float(icpt),
        "mu": float(-slope),
        "mu_stderr": float(math.sqrt(cov[0, 0] * scale)),
        "r2": 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan"),
        "distances_used": [int(x) for x in d],
    }


def run_correlator(cfg: ExperimentConfig) -> EnsembleResult:
    t0 = time.perf_counter()
    res = EnsembleResult("correlator", cfg)
    n = cfg.sizes[0]
    max_d = cfg.max_distance
    results = map_samples(_correlator_task, [(cfg, n, i, max_d) for i in range(cfg.samples)], cfg.workers)
    ok = [r for r in results if r is not None]
    if not ok:
        raise AllRejected(n, cfg.samples, [])
    stack = np.stack([r[0] for r in ok])  # samples x functions x distances
    norm = max(r[1] for r in ok)
    floor = 10 * np.finfo(float).eps * norm
    names = ["inv_sqrt"] + [f"inv_sqrt_tanh_beta_{output.fmt(b)}" for b in cfg.betas]
    dists = np.arange(max_d + 1)
    tables, fits = {}, {}
    for j, name in enumerate(names):
        per = stack[:, j, :]
        present = np.isfinite(per).all(axis=0)
        mean = np.full(max_d + 1, np.nan)
        se = np.full(max_d + 1, np.nan)
        for dd in np.flatnonzero(present):
            mean[dd], se[dd] = mean_se(per[:, dd])
        count = np.where(present, per.shape[0], 0)
        tables[name] = [(int(dd), mean[dd], se[dd], int(count[dd])) for dd in np.flatnonzero(present)]
        fits[name] = fit_decay(dists[present], mean[present], se[present], floor)
    res.correlator = {
        "reference_site": int(volume_graph(cfg, n).center()),
        "n_vertices": volume_graph(cfg, n).n_vertices,
        "accepted": len(ok),
        "rejected": len(results) - len(ok),
        "noise_floor": floor,
        "fits": fits,
        "tables": tables,
    }
    res.aggregates = [{"function": k, "fit_status": v["status"]} for k, v in fits.items()]
    res.timing["wall_seconds"] = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------


def write_outputs(res: EnsembleResult, prefix: Optional[str] = None) -> list:
    """Write the result files under ``prefix`` (default: the config's ``out``); return their paths."""
    prefix = res.config.out if prefix is None else prefix
    paths = []
    if res.kind in ("area_law", "thermal_sweep"):
        p = output.prefix_path(prefix, "samples.csv")
        output.write_csv(p, output.SAMPLE_HEADER, res.rows)
        paths.append(p)
    if res.correlator is not None:
        for j, (name, table) in enumerate(res.correlator["tables"].items()):
            suffix = "correlator.csv" if j == 0 else f"correlator_{name}.csv"
            p = output.prefix_path(prefix, suffix)
            output.write_csv(p, output.CORRELATOR_HEADER, table)
            paths.append(p)
    p = output.prefix_path(prefix, "summary.json")
    output.write_json(p, res.summary())
    paths.append(p)
    t = output.prefix_path(prefix, "timing.json")
    output.write_json(t, {"config_hash": res.config.digest(), "workers": res.config.workers, **res.timing})
    return paths
