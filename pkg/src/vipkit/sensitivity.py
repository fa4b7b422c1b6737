"""Counting arithmetic from injected current to expected anomalous X-rays.

All counts are carried as floats; typical magnitudes (1e25 to 1e30)
overflow fixed-width integers.
"""
from __future__ import annotations

from dataclasses import dataclass

from .physics import PhysicalConstants, StripGeometry

__all__ = [
    "DegenerateRunError",
    "RunPlan",
    "SensitivityReport",
    "n_new",
    "n_int",
    "expected_anomalous",
    "invert_bound",
    "compare_scenarios",
    "sensitivity_report",
]


class DegenerateRunError(ArithmeticError):
    """A bound was requested from a run with zero exposure."""


@dataclass(frozen=True)
class RunPlan:
    current_I: float
    duration_T: float
    capture_fraction: float = 0.1
    duty_on_fraction: float = 0.5

    def __post_init__(self):
        if not self.current_I >= 0:
            raise ValueError("current_I must be >= 0")
        if not self.duration_T > 0:
            raise ValueError("duration_T must be > 0")
        if not 0 < self.capture_fraction <= 1:
            raise ValueError("capture_fraction must be in (0, 1]")
        if not 0 < self.duty_on_fraction <= 1:
            raise ValueError("duty_on_fraction must be in (0, 1]")

    @property
    def live_on(self) -> float:
        return self.duration_T * self.duty_on_fraction

    @property
    def live_off(self) -> float:
        return self.duration_T * (1.0 - self.duty_on_fraction)


@dataclass(frozen=True)
class SensitivityReport:
    n_new: float
    n_int: float
    capture_fraction: float

    def __post_init__(self):
        if self.n_new < 0 or self.n_int < 0:
            raise ValueError("counts must be >= 0")

    @property
    def expected_nx_per_unit_beta(self) -> float:
        return self.n_new * self.n_int * self.capture_fraction


def n_new(plan: RunPlan, visible_fraction: float, constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Number of injected electrons seen by the detector for a steady current."""
    if not 0 <= visible_fraction <= 1:
        raise ValueError("visible_fraction must be in [0, 1]")
    charge = plan.current_I * visible_fraction * plan.duration_T * plan.duty_on_fraction
    return charge / constants.electron_charge


def n_int(strip: StripGeometry) -> float:
    return strip.window_D / strip.mean_free_path_mu


def expected_anomalous(beta2_half: float, n_new: float, n_int: float, capture_fraction: float) -> float:
    if beta2_half < 0:
        raise ValueError("beta2_half must be >= 0")
    return beta2_half * n_new * n_int * capture_fraction


def invert_bound(nx_upper_limit: float, n_new: float, n_int: float, capture_fraction: float) -> float:
    """Turn an upper limit on anomalous counts into a bound on beta^2/2."""
    denom = n_new * n_int * capture_fraction
    if not denom > 0:
        raise DegenerateRunError("zero exposure: n_new * n_int * capture_fraction == 0")
    return nx_upper_limit / denom


def compare_scenarios(bound_a: float, bound_b: float) -> float:
    """Improvement factor ``bound_a / bound_b`` of scenario b over a."""
    if not (bound_a > 0 and bound_b > 0):
        raise DegenerateRunError("both bounds must be positive to compare")
    return bound_a / bound_b


def sensitivity_report(plan: RunPlan, strip: StripGeometry, visible: float,
                       constants: PhysicalConstants = PhysicalConstants()) -> SensitivityReport:
    return SensitivityReport(
        n_new=n_new(plan, visible, constants),
        n_int=n_int(strip),
        capture_fraction=plan.capture_fraction,
    )
