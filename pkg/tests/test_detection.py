import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ncx2

from noiseradar.detection import (
    RocCurve,
    RocModel,
    conventional_pd,
    default_pfa_grid,
    marcum_q1,
    marcum_q1_complement,
    noise_radar_pd,
    noise_radar_pmiss,
    parse_pfa_grid,
    rho_for_pd,
    roc_curve,
    roc_vs_range,
)
from noiseradar.range_model import RangeProfile, rho_at_range, snr_at_range
from oracles import marcum_q1_quadrature

# Frozen from 30-digit mpmath quadrature of the defining integral.
Q1_1_1 = 0.732879803796820218
NOISE_PD_EXAMPLE = 0.724871177897407216  # Q1(0.2*sqrt(300)/0.96, sqrt(-2 ln 0.01)/0.96)
CONV_PD_EXAMPLE = 0.924266339307795809  # Q1(sqrt(18.75), sqrt(-2 ln 0.01))


def test_marcum_boundaries():
    assert marcum_q1(0, 0) == 1.0
    assert marcum_q1(0, 2) == pytest.approx(math.exp(-2), abs=1e-15)
    assert marcum_q1(3.7, 0) == 1.0


def test_marcum_frozen_value():
    assert abs(marcum_q1(1, 1) - Q1_1_1) < 1e-12
    assert abs(marcum_q1_quadrature(1, 1) - Q1_1_1) < 1e-12


@pytest.mark.parametrize("a,b", [(0.5, 7.5), (7.5, 0.5), (4.0, 4.0), (2.0, 6.0), (8.0, 3.0)])
def test_marcum_against_quadrature(a, b):
    assert abs(marcum_q1(a, b) - marcum_q1_quadrature(a, b)) < 1e-10


@pytest.mark.parametrize("a,b", [(30.0, 31.0), (60.0, 58.0), (300.0, 299.0), (1000.0, 1000.5), (0.01, 40.0)])
def test_marcum_large_arguments(a, b):
    # noncentral chi-square survival function with 2 degrees of freedom
    assert abs(marcum_q1(a, b) - ncx2.sf(b * b, 2, a * a)) < 1e-10


def test_marcum_far_tails():
    assert 0.0 < marcum_q1(50.0, 80.0) < 1e-150
    assert marcum_q1(80.0, 50.0) == 1.0


# 1 - Q1(a, b) from a 60-digit mpmath evaluation of the complementary Bessel series
@pytest.mark.parametrize("a,b,expected", [
    (33.8, 5.39, 3.03024452071945195e-178),
    (20.0, 1.0, 1.86806665766149740e-81),
])
def test_marcum_complement_relative_accuracy(a, b, expected):
    assert marcum_q1_complement(a, b) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("a,b", [(0.5, 7.5), (4.0, 4.0), (8.0, 3.0), (0.0, 2.0)])
def test_marcum_complement_sums_to_one(a, b):
    assert marcum_q1(a, b) + marcum_q1_complement(a, b) == pytest.approx(1.0, abs=1e-15)


def test_marcum_rejects_bad_arguments():
    for args in ((-1, 1), (1, -1), (np.inf, 1), (1, np.nan)):
        with pytest.raises(ValueError):
            marcum_q1(*args)


def test_marcum_broadcasts():
    out = marcum_q1([0.0, 1.0], 1.0)
    assert out.shape == (2,)
    assert out[1] == pytest.approx(Q1_1_1, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.floats(0, 20), st.floats(0, 20), st.floats(0.01, 2.0))
def test_marcum_monotone(a, b, step):
    assert marcum_q1(a, b + step) <= marcum_q1(a, b) + 1e-15
    assert marcum_q1(a + step, b) >= marcum_q1(a, b) - 1e-15
    assert 0.0 <= marcum_q1(a, b) <= 1.0


def test_noise_radar_examples():
    grid = default_pfa_grid()
    np.testing.assert_allclose(noise_radar_pd(grid, 0.0, 150), grid, rtol=0, atol=1e-10)
    assert abs(noise_radar_pd(0.01, 0.2, 150) - NOISE_PD_EXAMPLE) < 1e-10
    assert noise_radar_pd(0.05, 0.3, 150) > noise_radar_pd(0.05, 0.1, 150)


def test_noise_radar_validation():
    with pytest.raises(ValueError):
        noise_radar_pd(0.1, 1.0, 150)
    with pytest.raises(ValueError):
        noise_radar_pd(0.0, 0.5, 150)
    with pytest.raises(ValueError):
        noise_radar_pd(1.0, 0.5, 150)
    with pytest.warns(RuntimeWarning, match="below"):
        noise_radar_pd(0.1, 0.5, 20)


def test_conventional_examples():
    grid = default_pfa_grid()
    np.testing.assert_allclose(conventional_pd(grid, 0.0, 150), grid, rtol=0, atol=1e-10)
    assert abs(conventional_pd(0.01, 1 / 16, 150) - CONV_PD_EXAMPLE) < 1e-10
    assert conventional_pd(1e-4, 1e6, 150) > 1 - 1e-9
    with pytest.raises(ValueError):
        conventional_pd(0.1, -1.0, 150)


@pytest.mark.parametrize("p_fa", [0.01, 0.1, 0.3])
def test_monotone_in_rho_and_n(p_fa):
    rhos = np.linspace(0, 0.9, 10)
    pd = [noise_radar_pd(p_fa, r, 150) for r in rhos]
    assert all(b >= a for a, b in zip(pd, pd[1:]))
    # p_d saturates at 1.0 in double precision; strict ordering shows on 1 - p_d
    miss = [noise_radar_pmiss(p_fa, r, 150) for r in rhos]
    assert all(b < a for a, b in zip(miss, miss[1:]))
    miss_n = [noise_radar_pmiss(p_fa, 0.15, n) for n in (100, 200, 400, 800)]
    assert all(b < a for a, b in zip(miss_n, miss_n[1:]))


def test_roc_curve_properties():
    curve = roc_curve(RocModel.NOISE_RADAR, 0.0, 150)
    np.testing.assert_allclose(curve.p_d, curve.p_fa, atol=1e-10)
    curve = roc_curve("noise", 0.5, 150, np.logspace(-4, math.log10(0.5), 40))
    assert np.all(np.diff(curve.p_d) >= 0)
    assert np.all(curve.p_d >= curve.p_fa)
    assert curve.params == {"rho": 0.5, "n": 150}
    assert len(curve.points) == 40
    with pytest.raises(ValueError):
        roc_curve("noise", 0.5, 150, [0.2, 0.1])
    with pytest.raises(ValueError):
        roc_curve("empirical", 0.5, 150)


def test_conventional_and_noise_curves_agree_at_unit_snr():
    prof = RangeProfile(1.0, 1000.0)
    grid = np.logspace(-4, math.log10(0.5), 30)
    conv = roc_curve("conventional", snr_at_range(prof, 1000.0), 150, grid)
    noise = roc_curve("noise", rho_at_range(prof, 1000.0), 150, grid)
    gap = np.abs(conv.p_d - noise.p_d).max()
    # reported, not a pass/fail: both curves are near 1 at SNR = 1 and N = 150
    assert gap < 0.05


def test_roc_vs_range():
    prof = RangeProfile(0.8, 1000.0)
    curves = roc_vs_range(prof, [0.0], 150)
    np.testing.assert_array_equal(curves[0].p_d, roc_curve("noise", 0.8, 150).p_d)
    curves = roc_vs_range(prof, [500, 1000, 1500, 2000], 150, [0.1])
    pd = [c.p_d[0] for c in curves]
    assert all(b <= a for a, b in zip(pd, pd[1:]))
    miss = [noise_radar_pmiss(0.1, c.params["rho"], 150) for c in curves]
    assert all(b > a for a, b in zip(miss, miss[1:]))
    assert curves[2].params["range_m"] == 1500.0
    far = roc_vs_range(prof, [10_000.0], 150, default_pfa_grid())[0]
    # rho = 0.008 at ten characteristic ranges: within half a percent of chance
    assert np.abs(far.p_d - far.p_fa).max() < 5e-3


def test_grid_helpers():
    g = default_pfa_grid()
    assert g[0] == pytest.approx(1e-4) and g[-1] == pytest.approx(1 - 1e-3)
    assert np.all(np.diff(g) > 0)
    np.testing.assert_allclose(parse_pfa_grid("0.01:0.1:2:log"), [0.01, 0.1])
    np.testing.assert_allclose(parse_pfa_grid("0.1:0.3:3:lin"), [0.1, 0.2, 0.3])
    for bad in ("0:0.5:3:log", "0.1:0.5:3", "0.1:0.5:1:lin"):
        with pytest.raises(ValueError):
            parse_pfa_grid(bad)


def test_rho_for_pd_inverts():
    for n in (20, 150, 1000):
        rho = rho_for_pd(0.5, 0.1, n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert noise_radar_pd(0.1, rho, n) == pytest.approx(0.5, abs=1e-10)


def test_roc_curve_rejects_bad_points():
    with pytest.raises(ValueError):
        RocCurve([0.1, 0.2], [0.5, 1.5], RocModel.EMPIRICAL)
