"""Reproducible i.i.d. spring constants.

Every value is a pure function of ``(master_seed, sample_index, site_key)``:
a Philox bit generator is keyed with ``(master_seed, sample_index)`` and its
counter is positioned at ``(site_key, attempt)``.  Nothing depends on call
order, thread count or how many sites are requested together.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

_MASK64 = (1 << 64) - 1
_TO_UNIT = 2.0**-53


@dataclass(frozen=True)
class DisorderSpec:
    """Distribution of the k_x: uniform on (0, k_max] or a piecewise-constant density.

    For ``distribution="table"``, ``edges`` are the bin upper edges (strictly
    increasing, last one equal to ``k_max``; the first bin starts at 0) and
    ``density`` the value on each bin.  The table is normalised on construction.
    """

    distribution: str = "uniform"
    k_max: float = 1.0
    master_seed: int = 0
    edges: Optional[tuple] = None
    density: Optional[tuple] = None

    def __post_init__(self):
        if not self.k_max > 0:
            raise ValueError("k_max must be positive")
        if self.distribution == "uniform":
            return
        if self.distribution != "table":
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.edges is None or self.density is None:
            raise ValueError("table distribution needs edges and density")
        edges = np.asarray(self.edges, dtype=float)
        dens = np.asarray(self.density, dtype=float)
        if edges.shape != dens.shape or edges.ndim != 1 or len(edges) == 0:
            raise ValueError("edges and density must be 1-d of equal length")
        if np.any(np.diff(edges) <= 0) or edges[0] <= 0:
            raise ValueError("bin upper edges must be positive and strictly increasing")
        if not np.isclose(edges[-1], self.k_max, rtol=1e-12, atol=0):
            raise ValueError("last bin edge must equal k_max")
        if np.any(dens < 0) or not np.all(np.isfinite(dens)):
            raise ValueError("density must be finite and non-negative")
        widths = np.diff(np.concatenate([[0.0], edges]))
        mass = float(dens @ widths)
        if mass <= 0:
            raise ValueError("density has zero total mass")
        object.__setattr__(self, "edges", tuple(float(e) for e in edges))
        object.__setattr__(self, "density", tuple(float(d) for d in dens / mass))

    def cdf(self, k):
        k = np.asarray(k, dtype=float)
        if self.distribution == "uniform":
            return np.clip(k / self.k_max, 0.0, 1.0)
        lo, cum, dens, _ = self._table()
        i = np.clip(np.searchsorted(np.asarray(self.edges), k, side="left"), 0, len(lo) - 1)
        val = cum[i] + dens[i] * (k - lo[i])
        return np.clip(np.where(k <= 0, 0.0, val), 0.0, 1.0)

    def _table(self):
        upper = np.asarray(self.edges)
        lo = np.concatenate([[0.0], upper[:-1]])
        dens = np.asarray(self.density)
        mass = dens * (upper - lo)
        cum = np.concatenate([[0.0], np.cumsum(mass)[:-1]])
        return lo, cum, dens, mass


@dataclass(frozen=True)
class DisorderSample:
    k: np.ndarray
    sample_index: int


def load_density_table(path, k_max=None, master_seed=0):
    """Two whitespace-separated columns: bin upper edge, density value."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns")
    edges, dens = data[:, 0], data[:, 1]
    k_max = float(edges[-1]) if k_max is None else float(k_max)
    return DisorderSpec("table", k_max, master_seed, tuple(edges), tuple(dens))


def inverse_cdf(spec: DisorderSpec, u):
    """Quantile function; non-decreasing in ``u`` in [0, 1)."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0) | (u_arr >= 1)) or np.any(np.isnan(u_arr)):
        raise ValueError("u must lie in [0, 1)")
    if spec.distribution == "uniform":
        out = u_arr * spec.k_max
    else:
        lo, cum, dens, mass = spec._table()
        # first bin with positive mass whose cumulative upper end exceeds u
        upper_cum = cum + mass
        i = np.searchsorted(upper_cum, u_arr, side="right")
        i = np.minimum(i, len(lo) - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(dens[i] > 0, lo[i] + (u_arr - cum[i]) / dens[i], lo[i])
        out = np.clip(out, lo[i], np.asarray(spec.edges)[i])
    return float(out) if np.ndim(u) == 0 else out


def _uniform_at(seed, sample_index, site_key, attempt):
    bg = np.random.Philox(
        key=[seed & _MASK64, sample_index & _MASK64],
        counter=[site_key & _MASK64, attempt & _MASK64, 0, 0],
    )
    return int(bg.random_raw() >> 11) * _TO_UNIT


def draw(spec: DisorderSpec, sample_index: int, n: int, site_keys=None) -> DisorderSample:
    """n i.i.d. spring constants for one disorder sample.

    ``site_keys`` (default ``0..n-1``) name the sites; the value at a site does
    not depend on which other sites are drawn.  A draw of exactly 0 is
    redrawn with the next attempt counter.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    keys = np.arange(n, dtype=np.int64) if site_keys is None else np.asarray(site_keys, dtype=np.int64)
    if keys.shape != (n,):
        raise ValueError("site_keys must have length n")
    seed = int(spec.master_seed)
    k = np.empty(n)
    for i, key in enumerate(keys.tolist()):
        attempt = 0
        while True:
            val = inverse_cdf(spec, _uniform_at(seed, int(sample_index), key, attempt))
            if val > 0:
                break
            attempt += 1
        k[i] = val
    k.setflags(write=False)
    return DisorderSample(k, int(sample_index))
