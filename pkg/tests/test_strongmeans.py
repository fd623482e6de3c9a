import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from strongapprox import strongmeans as sm
from strongapprox.characteristics import w_psi
from strongapprox.fourier import CORPUS_IDS, coefficients, get_function
from strongapprox.nfunction import exp_pair, power_pair

EXP = exp_pair()
P2 = power_pair(2)


def test_constant_has_zero_mean():
    f = get_function("const")
    for pair in (EXP, P2):
        assert sm.strong_mean(pair, f, 0.3, 50) == 0.0


@pytest.mark.parametrize("fn_id,x", [("square", 1.0), ("cusp", 0.0), ("step", 0.0)])
def test_n_zero_is_single_term(fn_id, x):
    f = get_function(fn_id)
    expected = abs(coefficients(f, 0).a0 / 2 - f(x))
    for pair in (EXP, P2):
        assert sm.strong_mean(pair, f, x, 0) == pytest.approx(expected, rel=1e-12)


def test_quadratic_mean_square_wave():
    f = get_function("square")
    c = coefficients(f, 31)
    k = np.arange(1, 32)
    s = np.cumsum(np.r_[c.a0 / 2, c.b * np.sin(k * math.pi / 2)])
    literal = math.sqrt(np.mean((s - 1.0) ** 2))
    assert sm.strong_mean(P2, f, math.pi / 2, 31) == pytest.approx(literal, rel=1e-12)
    assert sm.direct_quadratic_mean(f, math.pi / 2, 31) == pytest.approx(literal, rel=1e-12)


def test_strong_means_vector_matches_scalar():
    f = get_function("sawtooth")
    ns = [3, 10, 63]
    vec = sm.strong_means(EXP, f, 1.0, ns)
    for n, v in zip(ns, vec):
        assert v == pytest.approx(sm.strong_mean(EXP, f, 1.0, n), rel=1e-14)


def test_log_domain_path():
    # deviations large enough that Phi overflows: H must still be the common value
    dev = np.full(5, 800.0)
    h = sm.strong_means_from_deviations(EXP.phi, dev)
    np.testing.assert_allclose(h, 800.0, rtol=1e-12)
    mixed = np.array([0.0, 750.0, 1.0])
    h = sm.strong_means_from_deviations(EXP.phi, mixed)
    assert h[2] == pytest.approx(750.0 - math.log(3), rel=1e-9)


def test_rhs_zero_when_phi_vanishes():
    assert sm.theorem_rhs(EXP, get_function("sawtooth"), 0.0, 31) == 0.0


def test_rhs_asymmetric_step_closed_form():
    f = get_function("step")
    n = 31
    k1 = np.arange(1, n + 2)
    psi1 = float(EXP.psi(1.0))
    inner = psi1 * (np.sum(np.log1p(1.0 / k1) / np.sqrt(k1)) + (n + 1) * float(EXP.psi(1.0 / (n + 1))))
    assert sm.theorem_rhs(EXP, f, 0.0, n) == pytest.approx(float(EXP.psi.inverse(inner)), rel=1e-10)


@pytest.mark.parametrize("fn_id", CORPUS_IDS)
def test_rhs_literal_oracle_power2(fn_id):
    f = get_function(fn_id)
    x = 1.0
    lit = oracles.rhs_thm_literal(lambda t: t * t, math.sqrt, lambda s: 2 * s,
                                  lambda d: w_psi(P2, f, x, d), 7)
    assert sm.theorem_rhs(P2, f, x, 7) == pytest.approx(lit, rel=1e-12, abs=1e-15)


def test_rhs_variants_present():
    v = sm.theorem_rhs_variants(EXP, get_function("cusp"), 1.0, 15)
    assert set(v) == set(sm.WEIGHTS)
    assert all(val > 0 for val in v.values())
    with pytest.raises(ValueError):
        sm.rhs_inner(EXP, np.ones(4), 3, "bogus")


def test_chain_all_zero():
    rec = sm.psi_domain_chain(EXP, get_function("sawtooth"), 0.0, 15)
    assert all(v == 0 for v in rec.chain)


def test_chain_square_wave_orders():
    rec = sm.psi_domain_chain(EXP, get_function("square"), math.pi / 2, 63)
    assert all(math.isfinite(v) and v > 0 for v in rec.chain)
    assert rec.psi_g == pytest.approx(rec.psi_g_definition, rel=1e-12)
    assert rec.lemma_sum <= rec.jensen_sum * (1 + 1e-12)
    assert rec.abel_sum == pytest.approx(rec.jensen_sum, rel=1e-12)
    assert rec.abel_sum <= rec.mvt_bound * (1 + 1e-12)
    assert rec.mvt_bound <= rec.rhs_thm * (1 + 1e-12)


def test_chain_cusp_closed_form_power2():
    # phi_0(t) = 2t: A_k = t^2 and I_k = 4t^3/3 over each block
    n = 15
    rec = sm.psi_domain_chain(P2, get_function("cusp"), 0.0, n)
    e = math.pi * np.arange(n + 2) / (n + 1)
    a = np.diff(e ** 2)
    blocks = np.diff(4 * e ** 3 / 3)
    prefix = np.cumsum(blocks)
    k1 = np.arange(1, n + 2, dtype=float)
    scale = (n + 1) / math.pi
    psi_k = 1.0 / k1 ** 2
    expected = {
        "psi_g": np.sum((scale * a / k1) ** 2),
        "lemma_sum": np.sum(psi_k * (scale * a) ** 2),
        "jensen_sum": np.sum(psi_k * scale * blocks),
        "mvt_bound": scale * np.sum(2 / k1[:-1] / k1[:-1] ** 2 * prefix[:-1]) + scale * psi_k[-1] * prefix[-1],
        "rhs_thm": np.sum(2 / k1 / np.sqrt(k1) * prefix * (n + 1) / (math.pi * k1))
        + (n + 1) * psi_k[-1] * prefix[-1] / math.pi,
    }
    for name, val in expected.items():
        assert getattr(rec, name) == pytest.approx(val, rel=1e-10), name


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CORPUS_IDS), st.floats(min_value=-3.0, max_value=3.0),
       st.integers(min_value=1, max_value=64))
def test_chain_inequalities(fn_id, x, n):
    rec = sm.psi_domain_chain(EXP, get_function(fn_id), x, n)
    tol = 1e-10 * max(1.0, rec.rhs_thm)
    assert rec.lemma_sum <= rec.jensen_sum + tol
    assert abs(rec.abel_sum - rec.jensen_sum) <= tol
    assert rec.abel_sum <= rec.mvt_bound + tol
    assert rec.mvt_bound <= rec.rhs_thm + tol


def test_safe_ratio_conventions():
    assert sm.safe_ratio(0.0, 0.0) == (0.0, "zero_over_zero")
    assert sm.safe_ratio(1.0, 0.0)[1] == "zero_denominator"
    assert sm.safe_ratio(1.0, 4.0) == (0.25, "")
    assert sm.hn_vs_g_ratio(EXP, get_function("const"), 0.0, 8) == 0.0


@pytest.mark.parametrize("fn_id,x", [("square", math.pi / 2), ("sawtooth", math.pi / 3)])
def test_h_over_g_bounded(fn_id, x):
    f = get_function(fn_id)
    ratios = [sm.hn_vs_g_ratio(EXP, f, x, n) for n in (3, 7, 15, 31, 63, 127, 255, 511)]
    assert all(math.isfinite(r) for r in ratios)
    assert max(ratios) < 10 * min(ratios)


def test_series_record():
    s = sm.strong_mean_series(EXP, get_function("cusp"), 1.0, [15, 3, 7])
    assert s.n_grid == [3, 7, 15]
    assert len(s.h_values) == len(s.g_values) == len(s.rhs_values) == 3
    assert min(s.h_values + s.g_values + s.rhs_values) >= 0
