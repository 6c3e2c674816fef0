import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arealaw import _kernels, graph as gr


@pytest.mark.parametrize("g", [gr.path(12), gr.box(2, 6), gr.box(3, 3), gr.bethe(3, 3)])
def test_bfs_backends_agree(g):
    indptr, indices = gr._csr(g.n_vertices, g.edges)
    a = _kernels.bfs_all_pairs_numpy(indptr, indices, g.n_vertices)
    b = _kernels.bfs_all_pairs_numba(indptr, indices, g.n_vertices)
    np.testing.assert_array_equal(a, b)


def test_bfs_marks_unreachable():
    indptr, indices = gr._csr(4, np.array([[0, 1], [2, 3]]))
    for fn in (_kernels.bfs_all_pairs_numpy, _kernels.bfs_all_pairs_numba):
        d = fn(indptr, indices, 4)
        assert d[0, 2] == -1 and d[0, 1] == 1


@given(st.integers(2, 40), st.integers(0, 2**31))
def test_cross_sum_backends_agree(n, seed):
    rng = np.random.default_rng(seed)
    mat = rng.standard_normal((n, n))
    inside = rng.random(n) < 0.5
    ref = sum(abs(mat[x, y]) for x in range(n) for y in range(n) if inside[x] and not inside[y])
    assert _kernels.cross_abs_sum_numpy(mat, inside) == pytest.approx(ref, rel=1e-12, abs=1e-300)
    assert float(_kernels.cross_abs_sum_numba(mat, inside)) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@given(st.integers(1, 60), st.integers(0, 2**31))
def test_bin_by_distance_backends_agree(n, seed):
    rng = np.random.default_rng(seed)
    values = rng.random(n)
    dist = rng.integers(-1, 8, size=n)
    s1, c1 = _kernels.bin_by_distance_numpy(values, dist, 5)
    s2, c2 = _kernels.bin_by_distance_numba(values, dist, 5)
    np.testing.assert_allclose(s1, s2, rtol=1e-13, atol=0)
    np.testing.assert_array_equal(c1, c2)
    assert c1.sum() == np.count_nonzero((dist >= 0) & (dist <= 5))


def test_env_flag_selects_numpy():
    code = "from arealaw import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, AREALAW_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
