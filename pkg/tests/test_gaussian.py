import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arealaw import disorder as dis, gaussian as ga, graph as gr, oscillator as osc
from arealaw.errors import NumericalConsistencyError

# two-site chain, m = g = lam = 1, k = (1, 1), region {0}; both values were
# produced by the truncated number-basis oracle (dims 30 and 40 agree to 1e-14)
TWO_SITE_NEGATIVITY = 0.4023594781085253
TWO_SITE_ENTROPY = 0.1728627832214091


def system(g, k, region, lam=1.0, gd=1.0, m=1.0):
    sys = osc.build_system(g, k, region, m=m, lam=lam, g=gd)
    return sys, osc.effective_h(sys.hq, sys.hp)


def chain_sample(seed, n=15, lam=1.0):
    g = gr.path(n)
    k = dis.draw(dis.DisorderSpec("uniform", 1.0, seed), 0, n).k
    return system(g, k, gr.centered_region(g, 2), lam=lam)


def test_single_site_blocks():
    sys, H = system(gr.path(1), [4.0], [0], lam=0.0)
    cov = ga.covariance_blocks(sys, H)
    assert cov.M1[0, 0] == pytest.approx(0.5, rel=1e-15)
    assert cov.M2[0, 0] == pytest.approx(2.0, rel=1e-15)


@given(st.integers(0, 2**31))
def test_block_relations(seed):
    sys, H = chain_sample(seed)
    g = ga.covariance_blocks(sys, H)
    np.testing.assert_allclose(g.M1 @ g.M2, np.eye(sys.n), atol=1e-9)
    t = ga.covariance_blocks(sys, H, beta=0.8)
    assert t.kind == "thermal"
    assert np.linalg.eigvalsh(t.M1 - g.M1)[0] >= -1e-9
    big = ga.covariance_blocks(sys, H, beta=60 / math.sqrt(H.min_eig))
    np.testing.assert_allclose(big.M1, g.M1, rtol=0, atol=1e-8 * np.abs(g.M1).max())
    np.testing.assert_allclose(big.M2, g.M2, rtol=0, atol=1e-8 * np.abs(g.M2).max())


def test_transposed_core_trivial_signs():
    sys, H = chain_sample(1, n=6)
    cov = ga.covariance_blocks(sys, H)
    plus = ga.transposed_core(cov, ga.sign_matrix(gr.Region((), 6)))
    minus = ga.transposed_core(cov, ga.sign_matrix(gr.Region(tuple(range(6)), 6)))
    np.testing.assert_allclose(plus, np.eye(6), atol=1e-12)
    np.testing.assert_array_equal(plus, minus)


def test_two_site_core_reciprocal_pair():
    sys, H = system(gr.path(2), [0.4, 0.9], [0])
    cov = ga.covariance_blocks(sys, H)
    w = np.linalg.eigvalsh(ga.transposed_core(cov, ga.sign_matrix(sys.region0)))
    assert w[0] * w[1] == pytest.approx(1.0, rel=1e-12)


def test_symplectic_examples():
    np.testing.assert_allclose(ga.symplectic_spectrum(np.eye(3), np.eye(3)).lambdas, 1.0, rtol=1e-14)
    for route in ga.ROUTES:
        lam = ga.symplectic_spectrum(np.array([[3.0]]), np.array([[1.5]]), route).lambdas
        assert lam[0] == pytest.approx(math.sqrt(4.5), rel=1e-14)
    with pytest.raises(ValueError):
        ga.symplectic_spectrum(np.eye(2), np.eye(2), "other")


@given(st.integers(0, 2**31))
def test_routes_agree_on_random_pairs(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal((2, 6, 6))
    M1, M2 = a @ a.T + 0.3 * np.eye(6), b @ b.T + 0.3 * np.eye(6)
    x = ga.symplectic_spectrum(M1, M2, "block_shortcut").lambdas
    y = ga.symplectic_spectrum(M1, M2, "general_JM").lambdas
    np.testing.assert_allclose(x, y, rtol=1e-9)


def test_log_negativity_examples():
    assert ga.log_negativity(np.array([1.0, 1.0, 1.0])) == 0.0
    assert ga.log_negativity(np.array([0.5, 2.0])) == pytest.approx(math.log(2), rel=1e-15)
    assert ga.log_negativity(np.array([1 - 1e-11, 1.0])) == 0.0
    assert ga.count_below_one(np.array([0.5, 1 - 1e-11, 2.0])) == 1


def test_two_site_closed_form_and_oracle_values():
    sys, H = system(gr.path(2), [1.0, 1.0], [0])
    rep = ga.analyze(sys, H)
    # normal modes h_- = gk/(4m), h_+ = (gk/2 + 2 lam)/(2m); N = log(h_+/h_-)/4
    assert rep.negativity == pytest.approx(0.25 * math.log(5.0), rel=1e-13)
    assert rep.negativity == pytest.approx(TWO_SITE_NEGATIVITY, abs=1e-12)
    assert rep.entropy == pytest.approx(TWO_SITE_ENTROPY, abs=1e-12)
    assert rep.lambdas_below_one == 1


def test_two_site_bound_single_term():
    sys, H = system(gr.path(2), [0.3, 0.6], [0])
    m1inv, m2inv, _ = ga.inverse_blocks(H)
    expected = 2 * np.linalg.norm(m1inv, 2) * abs(m2inv[0, 1])
    assert ga.negativity_upper_bound(sys, H) == pytest.approx(expected, rel=1e-12)


def test_decoupled_region_is_trivial():
    sys, H = system(gr.path(5), [0.2, 0.4, 0.6, 0.8, 1.0], [1, 2], lam=0.0)
    rep = ga.analyze(sys, H)
    assert rep.negativity == 0.0 and rep.entropy == 0.0 and rep.negativity_bound == 0.0


def test_entropy_guards():
    sys, H = chain_sample(2, n=5)
    th = ga.covariance_blocks(sys, H, beta=1.0)
    with pytest.raises(ValueError):
        ga.entanglement_entropy(th, sys.region0)
    bad = ga.CovariancePair(0.5 * np.eye(2), np.eye(2))
    with pytest.raises(NumericalConsistencyError):
        ga.entanglement_entropy(bad, gr.Region((0,), 2))
    assert float(ga._entropy_terms(np.array([1.0]))[0]) == 0.0


@given(st.integers(0, 2**31), st.sampled_from([0.3, 1.0, 5.0]))
def test_sample_invariants(seed, beta):
    sys, H = chain_sample(seed, n=21)
    ground = ga.covariance_blocks(sys, H)
    np.testing.assert_allclose(ga.symplectic_spectrum(ground.M1, ground.M2).lambdas, 1.0, atol=1e-8)
    thermal = ga.covariance_blocks(sys, H, beta)
    assert ga.symplectic_spectrum(thermal.M1, thermal.M2).lambdas[0] >= 1 - 1e-8

    for b in (None, beta):
        rep = ga.analyze(sys, H, beta=b)
        assert 0 <= rep.negativity <= rep.negativity_bound + 1e-8
        comp = osc.OscillatorSystem(sys.graph, sys.region0.complement(), sys.hq, sys.hp)
        assert ga.analyze(comp, H, beta=b, with_entropy=False).negativity == rep.negativity
        if b is None:
            assert rep.entropy <= rep.negativity + 1e-8
        cov = ga.covariance_blocks(sys, H, b)
        x = ga.transposed_spectrum(cov, sys.region0, "block_shortcut").lambdas
        y = ga.transposed_spectrum(cov, sys.region0, "general_JM").lambdas
        np.testing.assert_allclose(x, y, rtol=1e-9)
    L = ga.transposed_core(ground, ga.sign_matrix(sys.region0))
    sign, logdet = np.linalg.slogdet(L)
    assert sign == 1 and abs(logdet) <= 1e-8


def test_negativity_is_log_trace_norm_formula():
    # N = 1/2 Tr[P+ log L^{-1}] with P+ the spectral projection onto L < 1
    sys, H = chain_sample(5, n=11)
    L = ga.transposed_core(ga.covariance_blocks(sys, H), ga.sign_matrix(sys.region0))
    w = np.linalg.eigvalsh(L)
    half_trace = 0.5 * float(-np.log(w[w < 1 - 1e-10]).sum())
    assert ga.analyze(sys, H).negativity == pytest.approx(half_trace, rel=1e-12)


def test_high_temperature_extinction():
    g = gr.path(15)
    spec = dis.DisorderSpec("table", 1.0, 3, (0.5, 1.0), (0.0, 2.0))
    for i in range(5):
        k = dis.draw(spec, i, 15).k
        sys, H = system(g, k, gr.centered_region(g, 2))
        beta = 1e-4 / math.sqrt(H.max_eig)
        assert ga.analyze(sys, H, beta=beta).negativity == 0.0
        assert ga.analyze(sys, H).negativity > 0


def test_band_kinetic_matrix_consistency():
    g = gr.path(6)
    rng = np.random.default_rng(0)
    hp = osc.assemble_hp(g, c=1.0, delta=0.2)
    sys = osc.build_system(g, rng.random(6), [0, 1], hp=hp)
    H = osc.effective_h(sys.hq, sys.hp)
    cov = ga.covariance_blocks(sys, H)
    np.testing.assert_allclose(cov.M1 @ cov.M2, np.eye(6), atol=1e-10)
    rep = ga.analyze(sys, H)
    assert rep.entropy <= rep.negativity <= rep.negativity_bound
