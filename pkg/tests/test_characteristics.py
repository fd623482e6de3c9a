import math

import numpy as np
import pytest

import oracles
from strongapprox import characteristics as ch
from strongapprox.fourier import get_function
from strongapprox.nfunction import exp_pair

EXP = exp_pair()
PSI1 = 2 * math.log(2) - 1
GRID = [2 ** m - 1 for m in range(2, 11)]


def test_partition_tiles():
    part = ch.Partition(7)
    iv = part.intervals
    assert len(iv) == 8
    assert iv[0][0] == 0.0 and iv[-1][1] == pytest.approx(math.pi)
    np.testing.assert_allclose(np.diff(part.edges), math.pi / 8)


def test_block_count():
    assert ch.block_count(math.pi / 8) == 8
    assert ch.block_count(math.pi / 2.5) == 2


def test_w_p_examples():
    saw, step, sq = (get_function(i) for i in ("sawtooth", "step", "square"))
    assert ch.w_p(saw, 0.0, 1.3) == pytest.approx(0.0, abs=1e-14)
    assert ch.w_p(step, 0.0, 0.7) == pytest.approx(1.0)
    for delta in (1.5, 0.5, 0.01):
        assert ch.w_p(sq, math.pi / 2, delta) == 0.0


def test_w_psi_examples():
    saw, step, cusp = (get_function(i) for i in ("sawtooth", "step", "cusp"))
    assert ch.w_psi(EXP, saw, 0.0, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert ch.w_psi(EXP, step, 0.0, 0.3) == pytest.approx(1.0, rel=1e-12)
    assert ch.w_psi(EXP, cusp, 0.0, math.pi / 8) == pytest.approx(
        oracles.w_psi(cusp, 0.0, math.pi / 8), rel=1e-6)


def test_g_ps_examples():
    step, sq = get_function("step"), get_function("square")
    assert ch.g_ps(get_function("const"), 0.4, math.pi / 4) == 0.0
    # |phi| = 1 and block k is normalized by 1/(k delta): averages are 1/k
    for m in (1, 4, 16):
        k = np.arange(1, m + 1)
        assert ch.g_ps(step, 0.0, math.pi / m) == pytest.approx(math.sqrt(np.sum(1.0 / k ** 2)), rel=1e-12)
    assert ch.g_ps(sq, math.pi / 2, math.pi / 8) == pytest.approx(
        oracles.g_ps(sq, math.pi / 2, 8), rel=1e-8)


def test_g_ps_needs_s_above_p():
    with pytest.raises(ValueError):
        ch.g_ps(get_function("step"), 0.0, 1.0, p=2.0, s=2.0)


def test_g_p_psi_examples():
    step, sq = get_function("step"), get_function("square")
    assert ch.g_p_psi(EXP, get_function("const"), 0.0, 0.5) == 0.0
    for m in (1, 5, 32):
        expected = float(EXP.psi.inverse(np.sum(EXP.psi(1.0 / np.arange(1, m + 1)))))
        assert ch.g_p_psi(EXP, step, 0.0, math.pi / m) == pytest.approx(expected, rel=1e-12)
    assert ch.g_p_psi(EXP, sq, math.pi / 2, math.pi / 16) == pytest.approx(
        oracles.g_p_psi(sq, math.pi / 2, 16), rel=1e-8)


def test_m_of_x_examples():
    assert ch.m_of_x(EXP, get_function("const"), 0.0, 16) == 0.0
    assert ch.m_of_x(EXP, get_function("step"), 0.0, 64) == pytest.approx(PSI1, rel=1e-12)
    # phi = 0 on (0, pi/2) and -4 on (pi/2, pi): the best average is over (0, pi)
    sq = ch.m_of_x(EXP, get_function("square"), math.pi / 2, 256)
    assert sq == pytest.approx(float(EXP.psi(4.0)) / 2, rel=1e-12)


def test_m_profile_running_max():
    prof = ch.m_profile(EXP, get_function("cusp"), 1.0, 40)
    assert prof.shape == (41,)
    assert np.all(np.diff(prof) >= 0)
    assert prof[12] == pytest.approx(oracles.m_of_x(get_function("cusp"), 1.0, 12, 2 ** 14), rel=1e-6)


def test_single_block_consistency():
    """One block: the Delta-indexed and k-indexed G agree, and both equal
    the plain average w_1(pi), which Jensen bounds by w_Psi(pi)."""
    for fn_id, x in (("cusp", 1.0), ("step", 0.0), ("sawtooth", 1.0)):
        f = get_function(fn_id)
        c = ch.partition_characteristics(EXP, f, x, 0)
        g = ch.g_p_psi(EXP, f, x, math.pi)
        assert c["g1psi"] == pytest.approx(g, rel=1e-12)
        assert g == pytest.approx(ch.w_p(f, x, math.pi), rel=1e-10)
        assert g <= ch.w_psi(EXP, f, x, math.pi) * (1 + 1e-12)
    step = get_function("step")
    assert ch.g_p_psi(EXP, step, 0.0, math.pi) == pytest.approx(ch.w_psi(EXP, step, 0.0, math.pi))


def test_partition_characteristics_match_standalone():
    f = get_function("sawtooth")
    n = 31
    c = ch.partition_characteristics(EXP, f, 1.0, n)
    delta = math.pi / (n + 1)
    assert c["delta"] == delta
    assert c["w1"] == pytest.approx(ch.w_p(f, 1.0, delta), rel=1e-12)
    assert c["wpsi"] == pytest.approx(ch.w_psi(EXP, f, 1.0, delta), rel=1e-12)
    assert c["g12"] == pytest.approx(ch.g_ps(f, 1.0, delta), rel=1e-12)
    assert c["g1psi"] == pytest.approx(ch.g_p_psi(EXP, f, 1.0, delta), rel=1e-12)


def test_profile_fields():
    prof = ch.profile(EXP, get_function("cos3"), 0.0, [3, 7, 15])
    assert list(prof.delta_grid) == sorted(prof.delta_grid, reverse=True)
    assert all(v["w_psi"] >= 0 and v["G_pPsi"] >= 0 for v in prof.values)


def _lpsi_points():
    from strongapprox.fourier import CORPUS_IDS, Label
    for fn_id in CORPUS_IDS:
        for p in get_function(fn_id).labeled_points:
            if p.label is Label.LPSI:
                yield fn_id, p.x


@pytest.mark.parametrize("fn_id,x", list(_lpsi_points()))
def test_monotone_refinement(fn_id, x):
    f = get_function(fn_id)
    vals = [ch.w_psi(EXP, f, x, math.pi / (n + 1)) for n in GRID]
    assert max(vals[-3:]) < vals[0] or max(vals) <= 1e-10


def test_non_point_no_decay():
    f = get_function("step")
    base = ch.w_psi(EXP, f, 0.0, math.pi)
    for n in GRID:
        assert ch.w_psi(EXP, f, 0.0, math.pi / (n + 1)) >= 0.5 * base


@pytest.mark.parametrize("fn_id", ["cos3", "cusp"])
def test_values_nonnegative_and_zero_for_flat(fn_id):
    c = ch.partition_characteristics(EXP, get_function(fn_id), 0.5, 15)
    assert min(c["w1"], c["wpsi"], c["g12"], c["g1psi"]) >= 0
    flat = ch.partition_characteristics(EXP, get_function("const"), 0.5, 15)
    assert flat["w1"] == flat["wpsi"] == flat["g12"] == flat["g1psi"] == 0.0
