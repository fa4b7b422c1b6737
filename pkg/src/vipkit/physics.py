"""Constants, absorber materials and strip geometry.

Units are fixed across the package: cm, g, keV, A, s, C.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "PhysicalConstants",
    "Material",
    "StripGeometry",
    "OutOfRangeError",
    "load_constants",
    "load_material",
    "parse_material_table",
    "absorption_length",
    "visible_fraction",
    "exact_escape_fraction",
]


class OutOfRangeError(ValueError):
    """Requested energy lies outside a material's tabulated range."""


@dataclass(frozen=True)
class PhysicalConstants:
    electron_charge: float = 1.602176634e-19

    def __post_init__(self):
        if not self.electron_charge > 0:
            raise ValueError("electron_charge must be positive")


def load_constants(path=None) -> PhysicalConstants:
    """Read ``key = value`` constants from the bundled data file (or `path`)."""
    if path is None:
        text = resources.files("vipkit.data").joinpath("constants.txt").read_text()
    else:
        text = Path(path).read_text()
    values = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        values[key.strip()] = float(val)
    return PhysicalConstants(electron_charge=values["electron_charge_C"])


@dataclass(frozen=True)
class Material:
    """Absorber with a tabulated mass attenuation coefficient.

    ``energies`` (keV) must be strictly increasing and ``sigmas`` (cm^2/g)
    positive. Lookups interpolate linearly in log-log space and never
    extrapolate.
    """

    name: str
    density: float
    energies: tuple
    sigmas: tuple

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError(f"{self.name}: density must be positive")
        e = np.asarray(self.energies, dtype=float)
        s = np.asarray(self.sigmas, dtype=float)
        if e.ndim != 1 or e.shape != s.shape or e.size < 2:
            raise ValueError(f"{self.name}: need at least two (energy, sigma) rows")
        if np.any(np.diff(e) <= 0):
            raise ValueError(f"{self.name}: table energies must be strictly increasing")
        if np.any(e <= 0) or np.any(s <= 0):
            raise ValueError(f"{self.name}: energies and cross sections must be positive")

    def cross_section_at(self, energy: float) -> float:
        e = np.asarray(self.energies, dtype=float)
        if not (e[0] <= energy <= e[-1]):
            raise OutOfRangeError(
                f"{self.name}: {energy} keV outside table range [{e[0]}, {e[-1]}] keV"
            )
        logs = np.log(np.asarray(self.sigmas, dtype=float))
        return float(np.exp(np.interp(math.log(energy), np.log(e), logs)))


def parse_material_table(text: str, name: str, density: float) -> Material:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"material table line {lineno}: expected 2 columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ValueError(f"material table line {lineno}: non-numeric value") from None
    energies, sigmas = zip(*rows) if rows else ((), ())
    return Material(name=name, density=density, energies=tuple(energies), sigmas=tuple(sigmas))


def load_material(path=None, name: str = "Cu", density: float = 8.96) -> Material:
    """Load an attenuation table; defaults to the bundled copper table."""
    if path is None:
        text = resources.files("vipkit.data").joinpath("cu_attenuation.txt").read_text()
    else:
        text = Path(path).read_text()
    return parse_material_table(text, name, density)


@dataclass(frozen=True)
class StripGeometry:
    thickness_z: float
    window_D: float
    mean_free_path_mu: float

    def __post_init__(self):
        for key in ("thickness_z", "window_D", "mean_free_path_mu"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be strictly positive, got {getattr(self, key)}")


def absorption_length(material: Material, energy: float) -> float:
    """Photon absorption length ``1 / (sigma * rho)`` in cm."""
    return 1.0 / (material.cross_section_at(energy) * material.density)


def visible_fraction(strip: StripGeometry, lam: float) -> float:
    """Thin-sampling visible-current fraction ``lambda / z``, capped at 1."""
    if not lam > 0:
        raise ValueError("absorption length must be positive")
    return min(lam / strip.thickness_z, 1.0)


def exact_escape_fraction(strip: StripGeometry, lam: float) -> float:
    """Escape probability averaged over a uniform emission depth in [0, z].

    Equals ``(lambda/z) * (1 - exp(-z/lambda))``; ``expm1`` keeps the
    thin-strip limit accurate.
    """
    if not lam > 0:
        raise ValueError("absorption length must be positive")
    x = strip.thickness_z / lam
    return -math.expm1(-x) / x
