"""Scenario configuration files.

Format: one ``section.key = value`` per line, ``#`` starts a comment.
Unknown keys, duplicates, missing required keys and invariant violations
are reported as :class:`ConfigError` carrying the key and line number.

Background rates may be given directly (``background.flat_rate_per_keV_s``)
or as a baseline plus a reduction factor, in which case the flat rate and
every line rate are divided by the factor.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .limits import LimitResult, beta_bound, roi_acceptance_for, roi_limit
from .physics import (
    Material,
    PhysicalConstants,
    StripGeometry,
    absorption_length,
    load_constants,
    load_material,
    visible_fraction,
)
from .sensitivity import RunPlan, SensitivityReport, invert_bound, sensitivity_report
from .spectrum import BackgroundModel, DetectorModel, make_edges, roi_slice

__all__ = ["ConfigError", "ScenarioConfig", "parse_config", "load_config", "bundled_scenario", "BUNDLED"]

BUNDLED = ("rs1990", "lngs-partial", "vip-design")

_REQ = object()

# key -> (converter, default); _REQ marks required keys
_SCHEMA = {
    "scenario.name": (str, ""),
    "material.table": (str, "bundled"),
    "material.name": (str, "Cu"),
    "material.density_g_cm3": (float, 8.96),
    "strip.thickness_z_cm": (float, _REQ),
    "strip.window_D_cm": (float, _REQ),
    "strip.mean_free_path_mu_cm": (float, _REQ),
    "run.current_A": (float, _REQ),
    "run.duration_s": (float, _REQ),
    "run.capture_fraction": (float, 0.1),
    "run.duty_on_fraction": (float, 0.5),
    "detector.efficiency": (float, _REQ),
    "detector.resolution_sigma_keV": (float, _REQ),
    "detector.line_energy_keV": (float, 7.5),
    "background.flat_rate_per_keV_s": (float, None),
    "background.baseline_rate_per_keV_s": (float, None),
    "background.reduction_factor": (float, None),
    "background.lines": (str, ""),
    "binning.lo_keV": (float, _REQ),
    "binning.hi_keV": (float, _REQ),
    "binning.width_keV": (float, _REQ),
    "analysis.cl": (float, 0.9),
    "analysis.seed": (int, 0),
    "analysis.nx_limit": (float, None),
    "analysis.roi_halfwidth_sigma": (float, 3.0),
    "analysis.roi_acceptance": (float, None),
}


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line else ""
        what = f"{key}: " if key else ""
        super().__init__(f"{where}{what}{message}")


def _parse_lines(spec: str, scale: float):
    lines = []
    for chunk in filter(None, (c.strip() for c in spec.split(";"))):
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ValueError(f"line entry {chunk!r} must be energy:rate:sigma")
        energy, rate, sigma = (float(p) for p in parts)
        lines.append((energy, rate / scale, sigma))
    return tuple(lines)


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str
    material: Material
    strip: StripGeometry
    plan: RunPlan
    detector: DetectorModel
    background: BackgroundModel
    binning: tuple
    cl: float
    seed: int
    nx_limit: float | None
    roi_halfwidth_sigma: float
    roi_acceptance: float
    values: dict
    constants: PhysicalConstants = PhysicalConstants()

    @property
    def hash(self) -> str:
        """SHA-256 over the parsed key/value pairs, independent of layout and order."""
        canon = "\n".join(f"{k}={self.values[k]!r}" for k in sorted(self.values))
        return hashlib.sha256(canon.encode()).hexdigest()

    def edges(self) -> np.ndarray:
        return make_edges(*self.binning)

    def absorption_length(self) -> float:
        return absorption_length(self.material, self.detector.line_energy)

    def visible_fraction(self) -> float:
        return visible_fraction(self.strip, self.absorption_length())

    def sensitivity(self) -> SensitivityReport:
        return sensitivity_report(self.plan, self.strip, self.visible_fraction(), self.constants)

    def roi(self) -> tuple[float, float]:
        half = self.roi_halfwidth_sigma * self.detector.resolution_sigma
        return self.detector.line_energy - half, self.detector.line_energy + half

    def expected_roi_background(self) -> tuple[float, float]:
        """Mean background counts in the (snapped) ROI for the on and off phases."""
        edges = self.edges()
        s = roi_slice(edges, *self.roi())
        on = self.background.expected(edges, self.plan.live_on)[s].sum()
        off = self.background.expected(edges, self.plan.live_off)[s].sum()
        return float(on), float(off)

    def projected_limit(self, cl: float | None = None) -> LimitResult:
        """Limit expected when the observed ROI counts equal their null means."""
        cl = self.cl if cl is None else cl
        on, off = self.expected_roi_background()
        limit, method = roi_limit(on, off, self.plan.live_on / self.plan.live_off, cl)
        return beta_bound(limit, self.sensitivity(), self.detector, self.roi_acceptance, cl, method)

    def bound(self, nx_limit: float | None = None) -> float:
        """Headline bound on beta^2/2.

        With an anomalous-count limit (argument or ``analysis.nx_limit``)
        the counting formula is inverted directly; otherwise the projected
        null-experiment limit is used.
        """
        nx = self.nx_limit if nx_limit is None else nx_limit
        if nx is not None:
            s = self.sensitivity()
            return invert_bound(nx, s.n_new, s.n_int, s.capture_fraction)
        return self.projected_limit().beta2_half_bound


def _build(values: dict, lines_of: dict, base_dir) -> ScenarioConfig:
    def fail(key, msg):
        raise ConfigError(msg, key, lines_of.get(key))

    v = values
    table = v["material.table"]
    try:
        if table == "bundled":
            material = load_material(None, v["material.name"], v["material.density_g_cm3"])
        else:
            path = Path(table)
            if not path.is_absolute() and base_dir is not None:
                path = Path(base_dir) / path
            material = load_material(path, v["material.name"], v["material.density_g_cm3"])
    except OSError as exc:
        fail("material.table", f"cannot read table: {exc}")
    except ValueError as exc:
        fail("material.density_g_cm3" if "density" in str(exc) else "material.table", f"invariant violation: {exc}")

    try:
        material.cross_section_at(v["detector.line_energy_keV"])
    except ValueError as exc:
        fail("detector.line_energy_keV", f"invariant violation: {exc}")

    strip_keys = ["strip.thickness_z_cm", "strip.window_D_cm", "strip.mean_free_path_mu_cm"]
    for k in strip_keys:
        if not v[k] > 0:
            fail(k, f"invariant violation: must be strictly positive (got {v[k]})")
    strip = StripGeometry(v["strip.thickness_z_cm"], v["strip.window_D_cm"], v["strip.mean_free_path_mu_cm"])

    checks = [
        ("run.current_A", lambda x: x >= 0, "must be >= 0"),
        ("run.duration_s", lambda x: x > 0, "must be > 0"),
        ("run.capture_fraction", lambda x: 0 < x <= 1, "must be in (0, 1]"),
        ("run.duty_on_fraction", lambda x: 0 < x < 1, "must be in (0, 1) so both phases have live time"),
        ("detector.efficiency", lambda x: 0 < x <= 1, "must be in (0, 1]"),
        ("detector.resolution_sigma_keV", lambda x: x > 0, "must be > 0"),
        ("detector.line_energy_keV", lambda x: x > 0, "must be > 0"),
        ("binning.width_keV", lambda x: x > 0, "must be > 0"),
        ("analysis.cl", lambda x: 0 < x < 1, "must be in (0, 1)"),
        ("analysis.seed", lambda x: 0 <= x < 2**64, "must be an unsigned 64-bit integer"),
        ("analysis.roi_halfwidth_sigma", lambda x: x > 0, "must be > 0"),
    ]
    for key, ok, msg in checks:
        if not ok(v[key]):
            fail(key, f"invariant violation: {msg} (got {v[key]})")
    if not v["binning.hi_keV"] > v["binning.lo_keV"]:
        fail("binning.hi_keV", "invariant violation: must exceed binning.lo_keV")
    if v["analysis.nx_limit"] is not None and v["analysis.nx_limit"] < 0:
        fail("analysis.nx_limit", "invariant violation: must be >= 0")

    plan = RunPlan(v["run.current_A"], v["run.duration_s"], v["run.capture_fraction"], v["run.duty_on_fraction"])
    detector = DetectorModel(v["detector.efficiency"], v["detector.resolution_sigma_keV"], v["detector.line_energy_keV"])

    flat, base, red = (v[f"background.{k}"] for k in ("flat_rate_per_keV_s", "baseline_rate_per_keV_s", "reduction_factor"))
    if flat is not None and (base is not None or red is not None):
        fail("background.flat_rate_per_keV_s", "give either a flat rate or baseline + reduction, not both")
    if flat is None:
        if base is None:
            fail("background.flat_rate_per_keV_s", "missing required key (or baseline_rate_per_keV_s)")
        red = 1.0 if red is None else red
        if not red > 0:
            fail("background.reduction_factor", f"invariant violation: must be > 0 (got {red})")
        flat, scale = base / red, red
    else:
        scale = 1.0
    if not flat >= 0:
        fail("background.flat_rate_per_keV_s" if base is None else "background.baseline_rate_per_keV_s",
             f"invariant violation: must be >= 0 (got {flat})")
    try:
        background = BackgroundModel(flat, _parse_lines(v["background.lines"], scale))
    except ValueError as exc:
        fail("background.lines", f"invariant violation: {exc}")

    binning = (v["binning.lo_keV"], v["binning.hi_keV"], v["binning.width_keV"])
    try:
        edges = make_edges(*binning)
    except ValueError as exc:
        fail("binning.width_keV", f"invariant violation: {exc}")
    half = v["analysis.roi_halfwidth_sigma"] * detector.resolution_sigma
    if detector.line_energy - half < edges[0] or detector.line_energy + half > edges[-1]:
        fail("detector.line_energy_keV", "invariant violation: ROI around the line falls outside the binning")

    acc = v["analysis.roi_acceptance"]
    if acc is None:
        acc = roi_acceptance_for(v["analysis.roi_halfwidth_sigma"])
    elif not 0 < acc <= 1:
        fail("analysis.roi_acceptance", f"invariant violation: must be in (0, 1] (got {acc})")

    return ScenarioConfig(
        name=v["scenario.name"],
        material=material,
        strip=strip,
        plan=plan,
        detector=detector,
        background=background,
        binning=binning,
        cl=v["analysis.cl"],
        seed=v["analysis.seed"],
        nx_limit=v["analysis.nx_limit"],
        roi_halfwidth_sigma=v["analysis.roi_halfwidth_sigma"],
        roi_acceptance=acc,
        values=dict(values),
        constants=load_constants(),
    )


def parse_config(text: str, base_dir=None) -> ScenarioConfig:
    given: dict = {}
    lines_of: dict = {}
    nlines = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        nlines = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", None, lineno)
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in _SCHEMA:
            raise ConfigError("unknown key", key, lineno)
        if key in given:
            raise ConfigError(f"duplicate key (first on line {lines_of[key]})", key, lineno)
        conv = _SCHEMA[key][0]
        try:
            given[key] = conv(val)
        except ValueError:
            raise ConfigError(f"cannot parse {val!r} as {conv.__name__}", key, lineno) from None
        lines_of[key] = lineno

    values = {}
    for key, (_, default) in _SCHEMA.items():
        if key in given:
            values[key] = given[key]
        elif default is _REQ:
            raise ConfigError("missing required key (reached end of file)", key, max(nlines, 1))
        else:
            values[key] = default
    return _build(values, lines_of, base_dir)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def bundled_scenario(name: str) -> ScenarioConfig:
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled scenario {name!r}; choose from {BUNDLED}")
    text = resources.files("vipkit.scenarios").joinpath(f"{name}.cfg").read_text()
    return parse_config(text)


def bundled_path(name: str):
    return resources.files("vipkit.scenarios").joinpath(f"{name}.cfg")
