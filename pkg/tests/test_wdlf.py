import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from cslbounds import wdlf
from cslbounds.catalog import data_path, load_wdlf
from cslbounds.core import CONSTANTS, DivergenceError, DomainError, NoCrossingError
from cslbounds.wdlf import FitWindow, WdlfDataset, WdlfModel

WINDOW = FitWindow(10.5, 15.0)
CENTERS = np.arange(10.75, 15.0, 0.5)
MSUN = CONSTANTS.M_sun


def mestel(m, b3=1.0, m_wd=0.6):
    """Pure power law: 2.2e-4 b3 (M/M_sun)^(5/7) (7/96) 10^(2M/7) / 78.7."""
    return 2.2e-4 * b3 * m_wd ** (5 / 7) * (0.5 / 12 + 0.5 / 16) * 10 ** (2 * m / 7) / 78.7


def mestel_antiderivative(m, **kw):
    return mestel(m, **kw) * 7 / (2 * math.log(10))


def mp_density(m, ratio, b3=1, m_wd_msun="0.6"):
    mpmath.mp.dps = 40
    hbar = mpmath.mpf("1.054571817e-34")
    m0 = mpmath.mpf("1.67262192e-27")
    lsun = mpmath.mpf("3.828e26")
    mwd = mpmath.mpf(m_wd_msun) * mpmath.mpf("1.989e30")
    m = mpmath.mpf(m)
    lcsl = 3 * hbar**2 * mpmath.mpf(ratio) * mwd / (4 * m0**2)
    num = b3 * mpmath.mpf("2.2e-4") * 10 ** (-4 * m / 35) * lsun
    den = mpmath.mpf("78.7") * lsun * 10 ** (-2 * m / 5) - lcsl
    return num / den * mpmath.mpf(m_wd_msun) ** (mpmath.mpf(5) / 7) * (mpmath.mpf(1) / 24 + mpmath.mpf(1) / 32)


@pytest.fixture(scope="module")
def shipped():
    return load_wdlf(data_path("wdlf_surrogate.csv"), WINDOW)


# -- model -------------------------------------------------------------------


def test_composition_factor():
    assert wdlf.composition_factor(wdlf.CARBON_OXYGEN) == pytest.approx(7 / 96, rel=1e-15)
    assert wdlf.composition_factor([(1.0, 12)]) == pytest.approx(1 / 12)
    with pytest.raises(DomainError):
        wdlf.composition_factor([(0.5, 12)])
    with pytest.raises(DomainError):
        wdlf.composition_factor([])


def test_density_reference_value():
    assert wdlf.wdlf_density(12.0, WdlfModel()) == pytest.approx(3.797e-4, rel=1e-3)


@pytest.mark.parametrize("m,ratio", [(12.0, 0.0), (11.0, 1e6), (14.9, 2.3e6), (16.3, 2.34e6)])
def test_density_against_high_precision(m, ratio):
    got = wdlf.wdlf_density(m, WdlfModel(ratio=ratio))
    assert got == pytest.approx(float(mp_density(m, ratio)), rel=1e-12)


def test_mestel_recovery():
    rng = np.random.default_rng(7)
    m = rng.uniform(5, 20, 20)
    for b3, m_wd in [(1.0, 0.6), (2.7, 0.9)]:
        got = wdlf.wdlf_density(m, WdlfModel(b3=b3, m_wd=m_wd * MSUN))
        np.testing.assert_allclose(got, mestel(m, b3, m_wd), rtol=1e-12)


@given(m=st.floats(0, 30))
def test_mestel_slope(m):
    # log-slope of the pure power law is exactly 2/7 dex per magnitude
    a = wdlf.wdlf_density(m, WdlfModel())
    b = wdlf.wdlf_density(m + 1, WdlfModel())
    assert math.log10(b / a) == pytest.approx(2 / 7, rel=1e-10)


@given(ratio=st.floats(1e3, 1e8), frac=st.floats(0.0, 0.999))
def test_positive_below_pole(ratio, frac):
    model = WdlfModel(ratio=ratio)
    m_div = wdlf.divergence_magnitude(model)
    m = m_div - 5 + 5 * frac
    assert wdlf.wdlf_density(m, model) > 0
    # heating always raises the density relative to pure cooling
    assert wdlf.wdlf_density(m, model) > wdlf.wdlf_density(m, WdlfModel())


def test_divergence_error():
    model = WdlfModel(ratio=2.34e6)
    m_div = wdlf.divergence_magnitude(model)
    assert m_div == pytest.approx(16.40, abs=0.01)
    with pytest.raises(DivergenceError) as info:
        wdlf.wdlf_density([12.0, m_div + 0.1], model)
    assert info.value.magnitude == pytest.approx(m_div)
    with pytest.raises(DivergenceError):
        wdlf.wdlf_density(m_div, model)
    assert wdlf.divergence_magnitude(WdlfModel()) is None


@settings(max_examples=50)
@given(ratio=st.floats(1e2, 1e9))
def test_divergence_closed_form_vs_numeric_root(ratio):
    # independent denominator; root located by brentq
    m_wd = 0.6 * 1.989e30
    lcsl = 3 * 1.054571817e-34**2 * ratio * m_wd / (4 * 1.67262192e-27**2)

    def denom(m):
        return 78.7 * 3.828e26 * 10 ** (-0.4 * m) / lcsl - 1.0

    root = optimize.brentq(denom, -20, 60, xtol=1e-12)
    assert wdlf.divergence_magnitude(WdlfModel(ratio=ratio)) == pytest.approx(root, abs=1e-6)


def test_divergence_shift_on_doubling():
    a = wdlf.divergence_magnitude(WdlfModel(ratio=1e6))
    b = wdlf.divergence_magnitude(WdlfModel(ratio=2e6))
    assert a - b == pytest.approx(2.5 * math.log10(2), abs=1e-12)
    assert wdlf.ratio_for_divergence_at(a, WdlfModel()) == pytest.approx(1e6, rel=1e-12)


# -- normalization -----------------------------------------------------------


def test_window_integral_against_antiderivative():
    got = wdlf.window_integral(WdlfModel(), WINDOW)
    ref = mestel_antiderivative(15.0) - mestel_antiderivative(10.5)
    assert got == pytest.approx(ref, rel=1e-8)


def test_window_integral_with_heating_against_mpmath():
    ratio = 2.0e6
    mpmath.mp.dps = 30
    ref = mpmath.quad(lambda m: mp_density(m, ratio), [10.5, 13, 15.0])
    assert wdlf.window_integral(WdlfModel(ratio=ratio), WINDOW) == pytest.approx(float(ref), rel=1e-8)


def test_window_integral_rejects_pole_inside():
    ratio = wdlf.ratio_for_divergence_at(14.0, WdlfModel())
    with pytest.raises(DivergenceError):
        wdlf.window_integral(WdlfModel(ratio=ratio), WINDOW)


def test_normalization_fixed_point():
    data = wdlf.synthetic_dataset(WdlfModel(b3=1.7), CENTERS, 0.05)
    # a box-tiled window: observed count equals the model integral
    assert wdlf.normalize_birthrate(data, WdlfModel(), WINDOW) == pytest.approx(1.7, rel=1e-8)


@given(k=st.floats(1e-3, 1e3), ratio=st.floats(0, 2e6))
@settings(max_examples=30, deadline=None)
def test_normalization_linear_and_idempotent(k, ratio):
    data = wdlf.synthetic_dataset(WdlfModel(), CENTERS, 0.05, noise=0.1, rng=1)
    model = WdlfModel(ratio=ratio)
    b = wdlf.normalize_birthrate(data, model, WINDOW)
    assert wdlf.normalize_birthrate(data.scaled(k), model, WINDOW) == pytest.approx(k * b, rel=1e-8)
    once = wdlf.normalized(data, model, WINDOW)
    twice = wdlf.normalized(data, once, WINDOW)
    assert twice.b3 == pytest.approx(once.b3, rel=1e-8)


def test_bin_average_against_antiderivative():
    model = WdlfModel()
    got = wdlf.bin_density(CENTERS, 0.5, model)
    ref = (mestel_antiderivative(CENTERS + 0.25) - mestel_antiderivative(CENTERS - 0.25)) / 0.5
    np.testing.assert_allclose(got, ref, rtol=1e-10)
    np.testing.assert_allclose(wdlf.bin_density(CENTERS, 0.5, model, "center"), mestel(CENTERS), rtol=1e-12)
    with pytest.raises(DomainError):
        wdlf.bin_density(CENTERS, 0.5, model, "median")


# -- chi-square --------------------------------------------------------------


def test_chi2_zero_for_exact_data():
    model = WdlfModel(ratio=5e5)
    data = wdlf.synthetic_dataset(model, CENTERS, 0.05)
    fitted = wdlf.normalized(data, model.with_b3(3.0), WINDOW)
    assert wdlf.chi2_red(data, fitted, WINDOW) == pytest.approx(0.0, abs=1e-18)


@pytest.mark.parametrize("k", [1.0, 2.0, 3.5])
def test_chi2_single_outlier(k):
    model = WdlfModel()
    pred = wdlf.bin_density(CENTERS, 0.5, model)
    err = 0.1 * pred
    dens = pred.copy()
    dens[4] += k * err[4]
    data = WdlfDataset(CENTERS, dens, err)
    assert wdlf.chi2_red(data, model, WINDOW) == pytest.approx(k**2 / 8, rel=1e-10)
    assert wdlf.chi2_red(data, model, WINDOW, n_constraints=2) == pytest.approx(k**2 / 7, rel=1e-10)


def chi2_ppf_oracle(p, dof):
    """Invert the chi-square CDF by quadrature of the density plus brentq."""

    def pdf(x):
        return x ** (dof / 2 - 1) * math.exp(-x / 2) / (2 ** (dof / 2) * math.gamma(dof / 2))

    def cdf(x):
        return integrate.quad(pdf, 0, x, epsabs=0, epsrel=1e-13)[0]

    return optimize.brentq(lambda x: cdf(x) - p, 1e-9, 200, xtol=1e-13)


@pytest.mark.parametrize("dof,cl,expected", [(8, 0.95, 1.9384), (8, 0.70, 1.1906), (8, 0.999, 3.2656), (3, 0.5, None)])
def test_threshold_against_oracle(dof, cl, expected):
    got = wdlf.chi2_threshold(dof, cl)
    assert got == pytest.approx(chi2_ppf_oracle(cl, dof) / dof, rel=1e-9)
    if expected:
        assert got == pytest.approx(expected, abs=1e-4)


@given(dof=st.integers(1, 60), p=st.floats(1e-4, 1 - 1e-4))
def test_threshold_cdf_round_trip(dof, p):
    from scipy import special

    x = wdlf.chi2_threshold(dof, p) * dof
    assert special.gammainc(dof / 2, x / 2) == pytest.approx(p, abs=1e-9)


def test_threshold_domain():
    for args in [(0, 0.9), (2.5, 0.9), (4, 0.0), (4, 1.0)]:
        with pytest.raises(DomainError):
            wdlf.chi2_threshold(*args)
    with pytest.raises(DomainError):
        wdlf.degrees_of_freedom(2, 2)


# -- bound solving -----------------------------------------------------------


def test_solve_bound_recovers_synthetic_truth():
    r_true = 1.0e6
    data = wdlf.synthetic_dataset(WdlfModel(ratio=r_true), CENTERS, 1e-4)
    b = wdlf.solve_bound(data, WINDOW, WdlfModel(), 0.95)
    # noiseless data: the bound sits above the truth by the error-bar band
    assert b.value > r_true
    assert b.value == pytest.approx(r_true, rel=5e-3)
    assert b.method == "wdlf_chi2" and b.level == "95% C.L."


def test_profile_crosses_at_bound(shipped):
    b = wdlf.solve_bound(shipped, WINDOW, WdlfModel(), 0.95)
    prof = wdlf.chi2_profile(shipped, WINDOW, WdlfModel(), [b.value])[0]
    assert prof == pytest.approx(wdlf.chi2_threshold(8, 0.95), rel=1e-4)


def test_bounds_ordered_by_confidence(shipped):
    vals = [wdlf.solve_bound(shipped, WINDOW, WdlfModel(), cl).value for cl in (0.5, 0.7, 0.95, 0.999)]
    assert vals == sorted(vals) and len(set(vals)) == 4


def test_profile_non_decreasing_above_minimum(shipped):
    r_best, _ = wdlf.best_fit_ratio(shipped, WINDOW, WdlfModel())
    ceiling = wdlf.ratio_for_divergence_at(15.0 + 1e-3, WdlfModel())
    grid = np.linspace(r_best, ceiling, 60)
    prof = wdlf.chi2_profile(shipped, WINDOW, WdlfModel(), grid)
    assert np.all(np.diff(prof) >= -1e-9)


def test_profile_inf_when_pole_in_window(shipped):
    r = wdlf.ratio_for_divergence_at(13.0, WdlfModel())
    assert wdlf.chi2_profile(shipped, WINDOW, WdlfModel(), [r])[0] == math.inf


def test_no_crossing_when_errors_huge():
    data = wdlf.synthetic_dataset(WdlfModel(), CENTERS, 1e3)
    with pytest.raises(NoCrossingError) as info:
        wdlf.solve_bound(data, WINDOW, WdlfModel(), 0.95)
    assert info.value.bracket[1] > info.value.bracket[0]


def test_no_crossing_when_minimum_too_high():
    data = wdlf.synthetic_dataset(WdlfModel(), CENTERS, 1e-3, noise=0.1, rng=0)
    with pytest.raises(NoCrossingError):
        wdlf.solve_bound(data, WINDOW, WdlfModel(), 0.95)


def test_ten_bin_two_constraint_reading_rejects_exact_mestel():
    # Ten boxes centered 10.5..15.0 overhang the integration window by half a
    # box at each end, so even noiseless Mestel data fails at ratio 0.
    centers = np.arange(10.5, 15.01, 0.5)
    data = wdlf.synthetic_dataset(WdlfModel(), centers, 0.06, binning="center")
    model = wdlf.normalized(data, WdlfModel(), WINDOW)
    chi = wdlf.chi2_red(data, model, WINDOW, n_constraints=2, binning="center")
    assert chi > wdlf.chi2_threshold(8, 0.999)
