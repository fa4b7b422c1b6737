"""Binned X-ray spectra: synthesis of current-on/off pairs and subtraction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .sensitivity import RunPlan, SensitivityReport, expected_anomalous

__all__ = [
    "Spectrum",
    "ResidualSpectrum",
    "DetectorModel",
    "BackgroundModel",
    "make_edges",
    "gaussian_bin_mass",
    "expected_pair",
    "synthesize_pair",
    "normalize_subtract",
    "roi_sum",
]


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _check_edges(edges: np.ndarray):
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError("binning needs at least one bin (two edges)")
    if np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing")


@dataclass(frozen=True, eq=False)
class Spectrum:
    bin_edges: np.ndarray
    counts: np.ndarray
    live_time: float
    label: str = ""

    def __post_init__(self):
        edges = _frozen(self.bin_edges, float)
        counts = np.asarray(self.counts)
        if counts.size and not np.all(np.equal(np.mod(counts, 1), 0)):
            raise ValueError("counts must be integers")
        counts = _frozen(counts, np.int64)
        _check_edges(edges)
        if counts.shape != (edges.size - 1,):
            raise ValueError(f"expected {edges.size - 1} counts, got {counts.size}")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        if not self.live_time > 0:
            raise ValueError("live_time must be > 0")
        if "\n" in self.label:
            raise ValueError("label must be a single line")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "live_time", float(self.live_time))

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            np.array_equal(self.bin_edges, other.bin_edges)
            and np.array_equal(self.counts, other.counts)
            and self.live_time == other.live_time
            and self.label == other.label
        )


@dataclass(frozen=True, eq=False)
class ResidualSpectrum:
    bin_edges: np.ndarray
    values: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        edges = _frozen(self.bin_edges, float)
        values = _frozen(self.values, float)
        variances = _frozen(self.variances, float)
        _check_edges(edges)
        n = edges.size - 1
        if values.shape != (n,) or variances.shape != (n,):
            raise ValueError(f"values and variances must both have length {n}")
        if np.any(variances < 0):
            raise ValueError("variances must be >= 0")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "variances", variances)

    def __eq__(self, other):
        if not isinstance(other, ResidualSpectrum):
            return NotImplemented
        return (
            np.array_equal(self.bin_edges, other.bin_edges)
            and np.array_equal(self.values, other.values)
            and np.array_equal(self.variances, other.variances)
        )


@dataclass(frozen=True)
class DetectorModel:
    efficiency: float
    resolution_sigma: float
    line_energy: float = 7.5

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must be in (0, 1]")
        if not self.resolution_sigma > 0:
            raise ValueError("resolution_sigma must be > 0")
        if not self.line_energy > 0:
            raise ValueError("line_energy must be > 0")


@dataclass(frozen=True)
class BackgroundModel:
    """Flat continuum (counts per keV per s) plus Gaussian lines.

    ``lines`` holds ``(energy_keV, rate_per_s, sigma_keV)`` triples.
    """

    flat_rate: float = 0.0
    lines: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not self.flat_rate >= 0:
            raise ValueError("flat_rate must be >= 0")
        lines = tuple(tuple(float(v) for v in line) for line in self.lines)
        for energy, rate, sigma in lines:
            if rate < 0:
                raise ValueError("line rates must be >= 0")
            if not sigma > 0:
                raise ValueError("line sigma must be > 0")
        object.__setattr__(self, "lines", lines)

    def expected(self, edges: np.ndarray, live_time: float) -> np.ndarray:
        mu = self.flat_rate * np.diff(edges) * live_time
        for energy, rate, sigma in self.lines:
            mu = mu + rate * live_time * gaussian_bin_mass(edges, energy, sigma)
        return mu


def make_edges(lo: float, hi: float, width: float) -> np.ndarray:
    n = int(round((hi - lo) / width))
    if n < 1:
        raise ValueError("binning produces no bins")
    return lo + width * np.arange(n + 1)


def gaussian_bin_mass(edges, center: float, sigma: float) -> np.ndarray:
    """Probability mass of N(center, sigma) falling in each bin."""
    return np.diff(ndtr((np.asarray(edges, dtype=float) - center) / sigma))


def expected_pair(bg: BackgroundModel, det: DetectorModel, plan: RunPlan,
                  sens: SensitivityReport, beta2_half: float, binning):
    """Per-bin expectations ``(on, off)`` underlying :func:`synthesize_pair`."""
    edges = np.asarray(binning, dtype=float)
    _check_edges(edges)
    if plan.live_off <= 0:
        raise ValueError("duty_on_fraction = 1 leaves no current-off live time")
    signal = expected_anomalous(beta2_half, sens.n_new, sens.n_int, sens.capture_fraction)
    signal *= det.efficiency
    on = bg.expected(edges, plan.live_on)
    if signal > 0:
        on = on + signal * gaussian_bin_mass(edges, det.line_energy, det.resolution_sigma)
    return on, bg.expected(edges, plan.live_off)


def synthesize_pair(bg: BackgroundModel, det: DetectorModel, plan: RunPlan,
                    sens: SensitivityReport, beta2_half: float, binning, seed):
    """Draw a current-on and a current-off spectrum.

    The off spectrum holds background only; the on spectrum adds the
    anomalous line smeared by the detector resolution. ``seed`` is an
    integer or a ``numpy.random.Generator``; the on spectrum is drawn first.
    """
    edges = np.asarray(binning, dtype=float)
    mu_on, mu_off = expected_pair(bg, det, plan, sens, beta2_half, edges)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    on = Spectrum(edges, rng.poisson(mu_on), plan.live_on, "current-on")
    off = Spectrum(edges, rng.poisson(mu_off), plan.live_off, "current-off")
    return on, off


def normalize_subtract(on: Spectrum, off: Spectrum) -> ResidualSpectrum:
    """Live-time-normalized ``on - r * off`` with Poisson variance propagation."""
    if not np.array_equal(on.bin_edges, off.bin_edges):
        raise ValueError("on and off spectra have different binning")
    r = on.live_time / off.live_time
    c_on = on.counts.astype(float)
    c_off = off.counts.astype(float)
    return ResidualSpectrum(on.bin_edges, c_on - r * c_off, c_on + r * r * c_off)


def roi_slice(edges, lo: float, hi: float) -> slice:
    """Bins covering ``[lo, hi]`` with both ends snapped outward to bin edges."""
    edges = np.asarray(edges)
    if not lo < hi:
        raise ValueError(f"degenerate ROI [{lo}, {hi}]: covers no bin")
    if lo < edges[0] or hi > edges[-1]:
        raise ValueError(f"ROI [{lo}, {hi}] keV outside spectrum range [{edges[0]}, {edges[-1]}] keV")
    i = int(np.searchsorted(edges, lo, side="right")) - 1
    j = int(np.searchsorted(edges, hi, side="left"))
    return slice(i, j)


def roi_sum(res: ResidualSpectrum, lo: float, hi: float) -> tuple[float, float]:
    s = roi_slice(res.bin_edges, lo, hi)
    return float(np.sum(res.values[s])), float(np.sum(res.variances[s]))
