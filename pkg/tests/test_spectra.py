import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from arealaw import spectra
from arealaw.errors import NotPositiveDefinite
from arealaw.spectra import SpectralFunction


class Diag:
    def __init__(self, vals):
        self.eigenvalues = np.asarray(vals, dtype=float)
        self.eigenvectors = np.eye(len(vals))


def random_spd(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    return a @ a.T + 0.5 * np.eye(n)


class Dec:
    def __init__(self, mat):
        self.eigenvalues, self.eigenvectors = spectra.eigh(mat)


def test_apply_examples():
    np.testing.assert_allclose(spectra.apply(SpectralFunction("inv_sqrt"), Diag([4, 9])), np.diag([0.5, 1 / 3]), rtol=1e-15)
    s, beta = 2.3, 0.7
    out = spectra.apply(SpectralFunction("sqrt_tanh", beta), Diag([s, s, s]))
    np.testing.assert_allclose(out, math.sqrt(s) * math.tanh(beta * math.sqrt(s)) * np.eye(3), rtol=1e-15)


@given(st.integers(0, 2**31))
def test_inverse_and_semigroup(seed):
    A = random_spd(8, seed)
    D = Dec(A)
    isq = spectra.apply(SpectralFunction("inv_sqrt"), D)
    sq = spectra.apply(SpectralFunction("sqrt"), D)
    scale = np.linalg.norm(A, 2)
    assert np.linalg.norm(isq @ isq - np.linalg.inv(A), 2) <= 1e-9 * np.linalg.norm(np.linalg.inv(A), 2)
    assert np.linalg.norm(sq @ sq - A, 2) <= 1e-9 * scale
    assert np.linalg.norm(isq @ sq - np.eye(8), 2) <= 1e-9
    res, orth = spectra.decomposition_residuals(A, D.eigenvalues, D.eigenvectors)
    assert res <= 1e-10 and orth <= 1e-10


@given(st.integers(0, 2**31), st.floats(0.1, 5.0))
def test_product_rule_thermal(seed, beta):
    D = Dec(random_spd(6, seed))
    a = spectra.apply(SpectralFunction("sqrt_coth", beta), D)
    b = spectra.apply(SpectralFunction("inv_sqrt_tanh", beta), D)
    np.testing.assert_allclose(a @ b, np.eye(6), atol=1e-9)


def test_thermal_to_ground_limit():
    D = Dec(random_spd(6, 3))
    beta = 50 / math.sqrt(D.eigenvalues[0])
    g = spectra.apply(SpectralFunction("inv_sqrt"), D)
    t = spectra.apply(SpectralFunction("inv_sqrt_coth", beta), D)
    assert np.linalg.norm(t - g, 2) <= 1e-8 * np.linalg.norm(g, 2)


def test_coth_examples():
    assert spectra.coth_stable(20.0) - 1 < 1e-16
    ref = float(mpmath.coth(mpmath.mpf("1e-6")))
    assert spectra.coth_stable(1e-6) == pytest.approx(ref, rel=1e-15)
    x = np.array([0.01, 0.1, 0.5, 1, 2, 5, 10])
    np.testing.assert_allclose(spectra.coth_stable(x) * np.tanh(x), 1.0, atol=1e-14)
    with pytest.raises(ValueError):
        spectra.coth_stable(0.0)


def test_coth_seam_and_monotone():
    x0 = spectra.COTH_SERIES_CUTOFF
    below = spectra.coth_stable(np.nextafter(x0, 0))
    above = spectra.coth_stable(x0)
    assert abs(below - above) <= 1e-12 * above
    xs = np.logspace(-8, 2, 2000)
    vals = spectra.coth_stable(xs)
    assert np.all(np.diff(vals) <= 0) and np.all(vals >= 1)
    with mpmath.workdps(40):
        for x in (1e-5, 9.9e-5, 1e-4, 3e-3, 0.7):
            assert spectra.coth_stable(x) == pytest.approx(float(mpmath.coth(x)), rel=1e-14)


def test_function_validation():
    with pytest.raises(ValueError):
        SpectralFunction("sqrt_coth")
    with pytest.raises(ValueError):
        SpectralFunction("cube")
    with pytest.raises(NotPositiveDefinite):
        SpectralFunction("inv_sqrt")(np.array([1.0, 0.0]))
    with pytest.raises(NotPositiveDefinite):
        spectra.apply(SpectralFunction("sqrt"), Diag([-1.0, 1.0]))
    np.testing.assert_allclose(SpectralFunction("log")(np.array([1.0, math.e])), [0, 1])
