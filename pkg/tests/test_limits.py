import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq
from scipy.stats import poisson

from vipkit.config import bundled_scenario
from vipkit.limits import (
    LimitResult,
    analyze_pair,
    beta_bound,
    coverage_study,
    gaussian_roi_limit,
    poisson_upper_limit,
    roi_limit,
)
from vipkit.physics import StripGeometry
from vipkit.sensitivity import DegenerateRunError, SensitivityReport, invert_bound
from vipkit.spectrum import BackgroundModel, DetectorModel, synthesize_pair

Z90 = 1.2815515655446004  # one-sided 90% standard-normal quantile


def brute_force_limit(n, b, cl):
    # sum the Poisson pmf explicitly and root-find on the signal
    def tail(s):
        mu = b + s
        return sum(math.exp(-mu) * mu**k / math.factorial(k) for k in range(n + 1)) - (1 - cl)

    if tail(0.0) <= 0:
        return 0.0
    return brentq(tail, 0.0, 10 * (n + 10), xtol=1e-13)


@pytest.mark.parametrize("cl,expected", [(0.9, 2.302585092994046), (0.95, 2.995732273553991)])
def test_zero_count_limits(cl, expected):
    assert poisson_upper_limit(0, 0.0, cl) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n,b,cl", [(1, 0.0, 0.9), (3, 1.2, 0.9), (7, 2.5, 0.95), (12, 4.0, 0.68), (2, 8.0, 0.9)])
def test_against_brute_force(n, b, cl):
    assert poisson_upper_limit(n, b, cl) == pytest.approx(brute_force_limit(n, b, cl), rel=1e-9, abs=1e-12)


@given(st.integers(0, 60), st.floats(0, 30), st.sampled_from([0.68, 0.9, 0.95]))
def test_monotone_in_n_obs(n, b, cl):
    assert poisson_upper_limit(n + 1, b, cl) >= poisson_upper_limit(n, b, cl)


@given(st.integers(0, 60), st.floats(0, 30))
def test_monotone_in_cl(n, b):
    limits = [poisson_upper_limit(n, b, cl) for cl in (0.68, 0.8, 0.9, 0.95, 0.99)]
    assert limits == sorted(limits)


@pytest.mark.parametrize("cl", [0.0, 1.0, -0.1, 1.5])
def test_cl_range(cl):
    with pytest.raises(ValueError):
        poisson_upper_limit(0, 0.0, cl)
    with pytest.raises(ValueError):
        gaussian_roi_limit(0.0, 1.0, cl)


def test_gaussian_examples():
    assert gaussian_roi_limit(0.0, 1.0, 0.9) == pytest.approx(Z90, rel=1e-12)
    assert gaussian_roi_limit(-5.0, 1.0, 0.9) == pytest.approx(Z90, rel=1e-12)
    assert gaussian_roi_limit(0.0, 4.0, 0.9) == 2 * gaussian_roi_limit(0.0, 1.0, 0.9)
    with pytest.raises(ValueError):
        gaussian_roi_limit(0.0, 0.0, 0.9)


@pytest.mark.parametrize("b", [100, 300, 1000, 3000])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_gaussian_and_poisson_agree_at_high_counts(b, k):
    n = round(b + k * math.sqrt(b))
    p = poisson_upper_limit(n, b, 0.9)
    g = gaussian_roi_limit(n - b, n, 0.9)
    assert abs(p - g) / p < 0.10


def test_method_selection():
    assert roi_limit(10, 10, 1.0, 0.9)[1] == "poisson-exact"
    assert roi_limit(25, 25, 1.0, 0.9)[1] == "gaussian-roi"


SENS = SensitivityReport(n_new=2e25, n_int=3e5, capture_fraction=0.1)
DET = DetectorModel(efficiency=0.25, resolution_sigma=0.14)


def test_beta_bound_reduces_to_invert_bound():
    det = DetectorModel(efficiency=1.0, resolution_sigma=0.1)
    r = beta_bound(42.0, SENS, det, 1.0)
    assert r.beta2_half_bound == invert_bound(42.0, SENS.n_new, SENS.n_int, SENS.capture_fraction)


@pytest.mark.parametrize("field", ["n_new", "n_int", "capture_fraction", "efficiency", "roi_acceptance"])
def test_beta_bound_inverse_proportional(field):
    kw = dict(n_new=2e25, n_int=3e5, capture_fraction=0.1, efficiency=0.25, roi_acceptance=0.9)

    def bound(**over):
        k = {**kw, **over}
        s = SensitivityReport(k["n_new"], k["n_int"], k["capture_fraction"])
        return beta_bound(10.0, s, DetectorModel(k["efficiency"], 0.1), k["roi_acceptance"]).beta2_half_bound

    assert bound(**{field: kw[field] / 2}) == pytest.approx(2 * bound(), rel=1e-14)


def test_beta_bound_degenerate():
    with pytest.raises(DegenerateRunError):
        beta_bound(1.0, SensitivityReport(0.0, 1.0, 0.1), DET, 1.0)


def test_limit_result_invariants():
    with pytest.raises(ValueError):
        LimitResult(-1.0, 0.9, 0.0, "poisson-exact")
    with pytest.raises(ValueError):
        LimitResult(1.0, 0.9, 0.0, "bayes")


def test_end_to_end_bound_brackets_truth():
    scen = bundled_scenario("vip-design")
    truth = 3 * scen.projected_limit().beta2_half_bound
    sens = scen.sensitivity()
    covered = 0
    for seed in range(200):
        on, off = synthesize_pair(scen.background, scen.detector, scen.plan, sens, truth, scen.edges(), seed)
        _, (value, _), result = analyze_pair(on, off, sens, scen.detector)
        covered += result.beta2_half_bound >= truth
    # nominal 90%; binomial sd over 200 trials is about 2%
    assert covered / 200 >= 0.84


def test_coverage_zero_truth_is_one():
    scen = bundled_scenario("lngs-partial")
    assert coverage_study(scen, 0.0, 50, seed=1) == 1.0


def test_coverage_monotone_in_cl():
    scen = bundled_scenario("vip-design")
    truth = 2 * scen.projected_limit().beta2_half_bound
    cov = [coverage_study(scen, truth, 300, cl=cl, seed=5) for cl in (0.68, 0.8, 0.9, 0.95)]
    assert cov == sorted(cov)


def test_coverage_deterministic():
    scen = bundled_scenario("rs1990")
    truth = scen.projected_limit().beta2_half_bound
    a = coverage_study(scen, truth, 100, seed=3, return_bounds=True)
    b = coverage_study(scen, truth, 100, seed=3, workers=4, return_bounds=True)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])


def test_coverage_needs_trials():
    with pytest.raises(ValueError):
        coverage_study(bundled_scenario("rs1990"), 0.0, 0)
