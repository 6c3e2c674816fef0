"""Numba vs NumPy timings for the loop kernels, plus one full sample for context.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are always importable, so a single process times both; the
AREALAW_DISABLE_NUMBA flag only changes which one the library dispatches to.
"""

import argparse
import timeit

import numpy as np

from arealaw import _kernels, disorder, gaussian, graph as gr, oscillator as osc


def best(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"library backend: {_kernels.BACKEND}")
    print(f"{'kernel':<34}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")

    cases = []
    for g in (gr.box(2, 30), gr.bethe(2, 10), gr.box(3, 12)):
        ip, ix = gr._csr(g.n_vertices, g.edges)
        cases.append((f"bfs_all_pairs {g.family} n={g.n_vertices}",
                      lambda ip=ip, ix=ix, n=g.n_vertices: _kernels.bfs_all_pairs_numpy(ip, ix, n),
                      lambda ip=ip, ix=ix, n=g.n_vertices: _kernels.bfs_all_pairs_numba(ip, ix, n)))
    for n in (321, 1500):
        mat = rng.standard_normal((n, n))
        inside = np.zeros(n, dtype=bool)
        inside[n // 2 - 2: n // 2 + 3] = True
        cases.append((f"cross_abs_sum n={n}",
                      lambda m=mat, i=inside: _kernels.cross_abs_sum_numpy(m, i),
                      lambda m=mat, i=inside: _kernels.cross_abs_sum_numba(m, i)))
    vals = rng.random(4000)
    dist = rng.integers(0, 40, 4000)
    cases.append(("bin_by_distance n=4000",
                  lambda: _kernels.bin_by_distance_numpy(vals, dist, 30),
                  lambda: _kernels.bin_by_distance_numba(vals, dist, 30)))

    for name, f_np, f_nb in cases:
        a, b = f_np(), f_nb()
        if isinstance(a, tuple):
            assert all(np.allclose(x, y) for x, y in zip(a, b))
        else:
            assert np.allclose(a, b)
        t_np, t_nb = best(f_np, args.repeat), best(f_nb, args.repeat)
        print(f"{name:<34}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}")

    g = gr.path(321)
    k = disorder.draw(disorder.DisorderSpec(), 0, g.n_vertices, g.site_keys).k
    sys = osc.build_system(g, k, gr.centered_region(g, 2))

    def one_sample():
        H = osc.effective_h(sys.hq, sys.hp)
        gaussian.analyze(sys, H)

    print(f"\nfull ground-state sample, chain of 321 sites: {1e3 * best(one_sample, args.repeat):.1f} ms "
          "(dominated by LAPACK eigendecompositions)")


if __name__ == "__main__":
    main()
