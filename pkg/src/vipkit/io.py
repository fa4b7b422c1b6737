"""Spectrum CSV files and flat text/CSV renderings of results.

Floats are written with ``repr`` so every read/write round trip is
bit-exact.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .limits import LimitResult
from .sensitivity import SensitivityReport
from .spectrum import ResidualSpectrum, Spectrum

__all__ = [
    "SpectrumFormatError",
    "format_spectrum",
    "parse_spectrum",
    "write_spectrum",
    "read_spectrum",
    "format_residual",
    "parse_residual",
    "write_residual",
    "read_residual",
    "report_text",
    "report_csv",
]

SPECTRUM_HEADER = "energy_kev_lo,energy_kev_hi,counts"
RESIDUAL_HEADER = "energy_kev_lo,energy_kev_hi,value,variance"


class SpectrumFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _split_table(text: str, header: str, ncols: int):
    meta: dict = {}
    rows = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, val = line[1:].strip().partition("=")
            if not sep:
                raise SpectrumFormatError("header comment must be '# key=value'", lineno)
            meta[key.strip()] = (val.strip(), lineno)
            continue
        if not seen_header:
            if line != header:
                raise SpectrumFormatError(f"expected header {header!r}", lineno)
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != ncols:
            raise SpectrumFormatError(f"malformed row: expected {ncols} fields, got {len(parts)}", lineno)
        rows.append((lineno, parts))
    if not seen_header:
        raise SpectrumFormatError(f"missing header {header!r}")
    if not rows:
        raise SpectrumFormatError("no bins")
    return meta, rows


def _edges(rows) -> np.ndarray:
    edges = []
    for i, (lineno, parts) in enumerate(rows):
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpectrumFormatError("malformed row: non-numeric edge", lineno) from None
        if not hi > lo:
            raise SpectrumFormatError("non-increasing edges", lineno)
        if i == 0:
            edges.append(lo)
        elif lo != edges[-1]:
            raise SpectrumFormatError("bin does not start where the previous one ended", lineno)
        edges.append(hi)
    return np.array(edges)


def format_spectrum(spec: Spectrum) -> str:
    out = [f"# live_time_s={spec.live_time!r}", f"# label={spec.label}", SPECTRUM_HEADER]
    e = spec.bin_edges
    out += [f"{float(e[i])!r},{float(e[i + 1])!r},{int(c)}" for i, c in enumerate(spec.counts)]
    return "\n".join(out) + "\n"


def parse_spectrum(text: str) -> Spectrum:
    meta, rows = _split_table(text, SPECTRUM_HEADER, 3)
    edges = _edges(rows)
    counts = []
    for lineno, parts in rows:
        try:
            c = int(parts[2])
        except ValueError:
            raise SpectrumFormatError("malformed row: counts must be an integer", lineno) from None
        if c < 0:
            raise SpectrumFormatError(f"negative count {c}", lineno)
        counts.append(c)
    if "live_time_s" not in meta:
        raise SpectrumFormatError("missing '# live_time_s=' header comment")
    val, lineno = meta["live_time_s"]
    try:
        live = float(val)
    except ValueError:
        raise SpectrumFormatError("live_time_s is not a number", lineno) from None
    if not live > 0:
        raise SpectrumFormatError("live_time_s must be > 0", lineno)
    label = meta.get("label", ("", None))[0]
    return Spectrum(edges, np.array(counts, dtype=np.int64), live, label)


def format_residual(res: ResidualSpectrum) -> str:
    out = [RESIDUAL_HEADER]
    e = res.bin_edges
    out += [
        f"{float(e[i])!r},{float(e[i + 1])!r},{float(v)!r},{float(w)!r}"
        for i, (v, w) in enumerate(zip(res.values, res.variances))
    ]
    return "\n".join(out) + "\n"


def parse_residual(text: str) -> ResidualSpectrum:
    _, rows = _split_table(text, RESIDUAL_HEADER, 4)
    edges = _edges(rows)
    values, variances = [], []
    for lineno, parts in rows:
        try:
            v, w = float(parts[2]), float(parts[3])
        except ValueError:
            raise SpectrumFormatError("malformed row: non-numeric value", lineno) from None
        if w < 0:
            raise SpectrumFormatError(f"negative variance {w}", lineno)
        values.append(v)
        variances.append(w)
    return ResidualSpectrum(edges, values, variances)


def write_spectrum(path, spec: Spectrum) -> None:
    Path(path).write_text(format_spectrum(spec))


def read_spectrum(path) -> Spectrum:
    return parse_spectrum(Path(path).read_text())


def write_residual(path, res: ResidualSpectrum) -> None:
    Path(path).write_text(format_residual(res))


def read_residual(path) -> ResidualSpectrum:
    return parse_residual(Path(path).read_text())


def _fields(obj) -> dict:
    if isinstance(obj, SensitivityReport):
        return {
            "n_new": obj.n_new,
            "n_int": obj.n_int,
            "expected_nx_per_unit_beta": obj.expected_nx_per_unit_beta,
        }
    if isinstance(obj, LimitResult):
        return {
            "nx_upper": obj.nx_upper,
            "confidence_level": obj.confidence_level,
            "beta2_half_bound": obj.beta2_half_bound,
            "method": obj.method,
        }
    if isinstance(obj, dict):
        return obj
    raise TypeError(f"cannot render {type(obj).__name__}")


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def report_text(obj) -> str:
    """``key=value`` lines."""
    return "".join(f"{k}={_fmt(v)}\n" for k, v in _fields(obj).items())


def report_csv(obj, header: bool = True) -> str:
    f = _fields(obj)
    row = ",".join(_fmt(v) for v in f.values())
    return (",".join(f) + "\n" + row + "\n") if header else row + "\n"
