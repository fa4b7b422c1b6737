"""Upper limits on anomalous counts and their conversion to beta^2/2 bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainccinv, ndtri

from ._parallel import chunk_rng, ordered_map
from .sensitivity import DegenerateRunError, SensitivityReport
from .spectrum import DetectorModel, ResidualSpectrum, Spectrum, normalize_subtract, roi_slice, synthesize_pair

__all__ = [
    "LimitResult",
    "POISSON_REGIME_MAX",
    "poisson_upper_limit",
    "gaussian_roi_limit",
    "roi_acceptance_for",
    "beta_bound",
    "roi_limit",
    "analyze_pair",
    "coverage_study",
]

# below this many current-on ROI counts the exact Poisson recipe is used
POISSON_REGIME_MAX = 25


@dataclass(frozen=True)
class LimitResult:
    nx_upper: float
    confidence_level: float
    beta2_half_bound: float
    method: str

    def __post_init__(self):
        if self.nx_upper < 0 or self.beta2_half_bound < 0:
            raise ValueError("limits must be >= 0")
        if not 0 < self.confidence_level < 1:
            raise ValueError("confidence_level must be in (0, 1)")
        if self.method not in ("poisson-exact", "gaussian-roi"):
            raise ValueError(f"unknown method {self.method!r}")


def _check_cl(cl):
    if not 0 < cl < 1:
        raise ValueError(f"confidence level must be in (0, 1), got {cl}")


def poisson_upper_limit(n_obs: int, b_expected: float, cl: float) -> float:
    """Classical upper limit on a signal over a known Poisson background.

    Solves ``P(N <= n_obs; b + s) = 1 - cl`` for ``s`` and floors at zero.
    The cumulative Poisson probability is the regularized upper incomplete
    gamma function ``Q(n_obs + 1, mu)``, inverted directly.
    """
    _check_cl(cl)
    if n_obs < 0 or int(n_obs) != n_obs:
        raise ValueError("n_obs must be a non-negative integer")
    if b_expected < 0:
        raise ValueError("b_expected must be >= 0")
    mu_up = float(gammainccinv(int(n_obs) + 1, 1.0 - cl))
    return max(mu_up - b_expected, 0.0)


def gaussian_roi_limit(roi_value: float, roi_variance: float, cl: float) -> float:
    _check_cl(cl)
    if not roi_variance > 0:
        raise ValueError("roi_variance must be > 0")
    return max(roi_value, 0.0) + float(ndtri(cl)) * math.sqrt(roi_variance)


def roi_acceptance_for(halfwidth_sigma: float) -> float:
    """Gaussian mass inside +-halfwidth_sigma (0.9973 for 3 sigma)."""
    return math.erf(halfwidth_sigma / math.sqrt(2.0))


def beta_bound(limit: float, sens: SensitivityReport, det: DetectorModel, roi_acceptance: float,
               cl: float = 0.9, method: str = "gaussian-roi") -> LimitResult:
    denom = sens.n_new * sens.n_int * sens.capture_fraction * det.efficiency * roi_acceptance
    if not denom > 0:
        raise DegenerateRunError("zero exposure in beta bound denominator")
    return LimitResult(nx_upper=limit, confidence_level=cl, beta2_half_bound=limit / denom, method=method)


def roi_limit(n_on: float, n_off: float, ratio: float, cl: float) -> tuple[float, str]:
    """Upper limit from ROI totals, picking the method by the on-count regime.

    ``ratio`` is the on/off live-time ratio. Returns ``(limit, method)``.
    """
    if n_on < POISSON_REGIME_MAX:
        return poisson_upper_limit(int(round(n_on)), ratio * n_off, cl), "poisson-exact"
    value = n_on - ratio * n_off
    variance = n_on + ratio * ratio * n_off
    return gaussian_roi_limit(value, variance, cl), "gaussian-roi"


def analyze_pair(on: Spectrum, off: Spectrum, sens: SensitivityReport, det: DetectorModel,
                 cl: float = 0.9, roi_halfwidth_sigma: float = 3.0, roi_acceptance: float | None = None):
    """Subtract, sum the ROI around the anomalous line and bound beta^2/2.

    Returns ``(residual, (roi_value, roi_variance), LimitResult)``.
    """
    if roi_acceptance is None:
        roi_acceptance = roi_acceptance_for(roi_halfwidth_sigma)
    res = normalize_subtract(on, off)
    half = roi_halfwidth_sigma * det.resolution_sigma
    s = roi_slice(on.bin_edges, det.line_energy - half, det.line_energy + half)
    n_on = float(on.counts[s].sum())
    n_off = float(off.counts[s].sum())
    ratio = on.live_time / off.live_time
    limit, method = roi_limit(n_on, n_off, ratio, cl)
    roi = (float(res.values[s].sum()), float(res.variances[s].sum()))
    return res, roi, beta_bound(limit, sens, det, roi_acceptance, cl, method)


def coverage_study(scenario, true_beta2_half: float, n_trials: int, cl: float = 0.9,
                   seed: int = 0, workers: int = 1, return_bounds: bool = False):
    """Fraction of synthetic experiments whose bound covers the true value.

    ``scenario`` is a :class:`vipkit.config.ScenarioConfig`. Trial ``i``
    draws from its own stream ``chunk_rng(seed, i)``, so the result does not
    depend on ``workers``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    sens = scenario.sensitivity()
    edges = scenario.edges()

    def trial(i, _):
        on, off = synthesize_pair(scenario.background, scenario.detector, scenario.plan, sens,
                                  true_beta2_half, edges, chunk_rng(seed, i))
        _, _, result = analyze_pair(on, off, sens, scenario.detector, cl,
                                    scenario.roi_halfwidth_sigma, scenario.roi_acceptance)
        return result.beta2_half_bound

    bounds = np.array(ordered_map(trial, range(n_trials), workers))
    coverage = float(np.mean(bounds >= true_beta2_half))
    return (coverage, bounds) if return_bounds else coverage
