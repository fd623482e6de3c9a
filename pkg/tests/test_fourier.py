import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongapprox import fourier as fo

SMOOTH = ("const", "cos3", "cusp")


def midpoint_coefficients(f, n, panels=2 ** 14):
    """Independent oracle: midpoint Riemann sums of f cos kx, f sin kx."""
    t = -math.pi + (np.arange(panels) + 0.5) * (2 * math.pi / panels)
    y = f(t)
    k = np.arange(1, n + 1)[:, None]
    h = 2.0 / panels
    return h * y.sum(), h * (y * np.cos(k * t)).sum(axis=1), h * (y * np.sin(k * t)).sum(axis=1)


def test_constant_coefficients():
    c = fo.coefficients(fo.get_function("const"), 16)
    assert c.a0 == pytest.approx(2.0)
    assert np.all(c.a == 0) and np.all(c.b == 0)


def test_square_coefficients():
    c = fo.coefficients(fo.get_function("square"), 64)
    k = np.arange(1, 65)
    expected = np.where(k % 2 == 1, 4 / (math.pi * k), 0.0)
    np.testing.assert_allclose(c.b, expected, atol=1e-15)
    np.testing.assert_allclose(c.a, 0.0, atol=1e-15)


def test_cos3_coefficients():
    c = fo.coefficients(fo.get_function("cos3"), 10)
    expected = np.zeros(10)
    expected[2] = 1.0
    np.testing.assert_allclose(c.a, expected, atol=1e-15)
    np.testing.assert_allclose(c.b, 0.0, atol=1e-15)


@pytest.mark.parametrize("fn_id", [i for i in fo.CORPUS_IDS if i != "oscillator"])
def test_numeric_matches_analytic(fn_id):
    f = fo.get_function(fn_id)
    exact = fo.coefficients(f, 256, method="analytic")
    num = fo.numeric_coefficients(f, 256)
    assert num.a0 == pytest.approx(exact.a0, abs=1e-8)
    np.testing.assert_allclose(num.a, exact.a, atol=1e-8)
    np.testing.assert_allclose(num.b, exact.b, atol=1e-8)


def test_oscillator_numeric_vs_midpoint():
    f = fo.get_function("oscillator")
    c = fo.coefficients(f, 32)
    a0, a, b = midpoint_coefficients(f, 32, panels=2 ** 20)
    assert c.a0 == pytest.approx(a0, abs=1e-6)
    np.testing.assert_allclose(c.a, a, atol=1e-6)
    np.testing.assert_allclose(c.b, 0.0, atol=1e-15)


def test_partial_sum_examples():
    const = fo.coefficients(fo.get_function("const"), 8)
    sq = fo.coefficients(fo.get_function("square"), 64)
    assert fo.partial_sum(const, 5, 0.3) == pytest.approx(1.0)
    assert fo.partial_sum(sq, 1, math.pi / 2) == pytest.approx(4 / math.pi)
    for nu in (0, 3, 17, 64):
        assert fo.partial_sum(sq, nu, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_parseval_square():
    c = fo.coefficients(fo.get_function("square"), 512)
    energy = np.cumsum(c.a ** 2 + c.b ** 2)
    assert np.all(np.diff(energy) >= 0)
    assert energy[-1] == pytest.approx(2.0, rel=0.01)


@pytest.mark.parametrize("fn_id,panels", [("const", 2 ** 14), ("cos3", 2 ** 14), ("cusp", 2 ** 16)])
def test_partial_sum_against_dft_oracle(fn_id, panels):
    # the kink of |x| leaves an O((hk)^2) aliasing error in a 2^14 oracle
    f = fo.get_function(fn_id)
    nu = 512
    a0, a, b = midpoint_coefficients(f, nu, panels)
    x = np.array([-2.0, 0.0, 0.7, 3.0])
    k = np.arange(1, nu + 1)[:, None]
    oracle = a0 / 2 + (a[:, None] * np.cos(k * x) + b[:, None] * np.sin(k * x)).sum(axis=0)
    got = [fo.partial_sum(fo.coefficients(f, nu), nu, xi) for xi in x]
    np.testing.assert_allclose(got, oracle, atol=1e-6)


def test_partial_sums_all_orders():
    c = fo.coefficients(fo.get_function("sawtooth"), 40)
    all_nu = fo.partial_sums(c, 1.1, 40)
    assert all_nu.shape == (41,)
    assert all_nu[23] == pytest.approx(fo.partial_sum(c, 23, 1.1), abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(fo.CORPUS_IDS), st.floats(min_value=-math.pi, max_value=math.pi),
       st.integers(min_value=-3, max_value=3))
def test_periodicity(fn_id, x, m):
    f = fo.get_function(fn_id)
    shifted = x + 2 * math.pi * m
    assert f(shifted) == pytest.approx(f(x), abs=1e-9) or any(
        abs(fo.wrap(shifted) - d.point) < 1e-9 for d in f.discontinuities)


@pytest.mark.parametrize("fn_id", ["square", "step", "sawtooth", "spikes"])
def test_discontinuity_limits(fn_id):
    f = fo.get_function(fn_id)
    for d in f.discontinuities:
        eps = 1e-12 * max(1.0, abs(d.point)) if fn_id != "spikes" else 1e-3 * 1e-12
        assert f(d.point - max(eps, 1e-15)) == pytest.approx(d.left, abs=1e-9)
        assert f(d.point + max(eps, 1e-15)) == pytest.approx(d.right, abs=1e-9)
        assert f(d.point) == pytest.approx(d.value)


def test_labels_carry_reasons():
    for fn_id in fo.CORPUS_IDS:
        for p in fo.get_function(fn_id).labeled_points:
            assert p.label in (fo.Label.LPSI, fo.Label.NON_LPSI)
            if p.label is fo.Label.NON_LPSI:
                assert p.reason


def test_phi_x_examples():
    t = np.linspace(0.1, 3.0, 9)
    saw = fo.get_function("sawtooth")
    step = fo.get_function("step")
    square = fo.get_function("square")
    np.testing.assert_allclose(fo.phi_x(saw, 0.0, t), 0.0, atol=1e-15)
    assert step(0.0) == 1.0
    np.testing.assert_allclose(fo.phi_x(step, 0.0, t), -1.0)
    np.testing.assert_allclose(fo.phi_x(square, 0.0, t), 0.0)


def test_spikes_between_l1_and_lp():
    # Psi-mass converges, the L^p mass diverges (slowly for p near 1)
    psi = [fo.spike_series_masses(c, 1.05)[1] for c in (100, 1000, 10000)]
    assert psi[2] - psi[1] < psi[1] - psi[0] < 0.05
    logs = [fo.spike_series_masses(c, 1.05)[0] for c in (100, 1000, 10000)]
    assert logs[2] > logs[1] + 100


def test_spikes_truncated_masses():
    f = fo.get_function("spikes")
    heights, widths, _, _ = fo.spike_layout()
    assert fo.coefficients(f, 0).a0 == pytest.approx((heights * widths).sum() / math.pi)


def test_table_function(tmp_path):
    xs = -math.pi + np.arange(256) * (2 * math.pi / 256)
    path = tmp_path / "cos.txt"
    np.savetxt(path, np.c_[xs, np.cos(xs)])
    f = fo.get_function(f"table:{path}")
    assert f(0.3) == pytest.approx(math.cos(0.3), abs=1e-3)
    c = fo.coefficients(f, 4)
    assert c.a[0] == pytest.approx(1.0, abs=1e-3)


def test_table_rejects_nonuniform(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n0.1 2\n0.5 3\n")
    with pytest.raises(ValueError):
        fo.from_samples(path)


def test_unknown_function():
    with pytest.raises(KeyError):
        fo.get_function("zigzag")


def test_coefficient_limit():
    with pytest.raises(ValueError):
        fo.coefficients(fo.get_function("square"), fo.MAX_COEFFICIENTS + 1)
