"""Command line entry point ``vipkit``.

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 numeric error.
Every failure prints exactly one diagnostic line on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import BUNDLED, ConfigError, ScenarioConfig, bundled_scenario, load_config
from .io import (
    SpectrumFormatError,
    read_spectrum,
    report_csv,
    report_text,
    write_residual,
    write_spectrum,
)
from .limits import analyze_pair, beta_bound
from .physics import OutOfRangeError, exact_escape_fraction
from .quon import exclusion_defect, gram_matrix
from .sensitivity import DegenerateRunError
from .spectrum import roi_slice, synthesize_pair
from .transport import McConfig, simulate_escape, simulate_scatter_count

EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 1, 2, 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"usage error: {message}", EXIT_CONFIG)


def _scenario(args) -> ScenarioConfig:
    if args.config is None:
        raise CliError("--config is required", EXIT_CONFIG)
    if args.config in BUNDLED and not Path(args.config).exists():
        return bundled_scenario(args.config)
    return load_config(args.config)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_record(out: Path, cfg: ScenarioConfig | None, seed, outputs: dict, started: float):
    record = {
        "scenario_hash": cfg.hash if cfg is not None else None,
        "toolkit_version": __version__,
        "seed": seed,
        "outputs": outputs,
        "wall_clock_s": time.perf_counter() - started,
    }
    (out / "run_record.json").write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")


def cmd_sensitivity(args, started):
    cfg = _scenario(args)
    sens = cfg.sensitivity()
    nx = args.nx_limit if args.nx_limit is not None else cfg.nx_limit
    fields = {
        "scenario": cfg.name,
        "absorption_length_cm": cfg.absorption_length(),
        "visible_fraction": cfg.visible_fraction(),
        "n_new": sens.n_new,
        "n_int": sens.n_int,
        "expected_nx_per_unit_beta": sens.expected_nx_per_unit_beta,
    }
    if nx is not None:
        fields["nx_limit"] = nx
    fields["beta2_half_bound"] = cfg.bound(nx)
    text = report_text(fields)
    sys.stdout.write(text)
    if args.out:
        out = _out_dir(args)
        (out / "sensitivity.txt").write_text(text)
        (out / "sensitivity.csv").write_text(report_csv(fields))
        _write_record(out, cfg, None, {"sensitivity": fields, "files": ["sensitivity.txt", "sensitivity.csv"]}, started)


def cmd_simulate(args, started):
    cfg = _scenario(args)
    seed = cfg.seed if args.seed is None else args.seed
    sens = cfg.sensitivity()
    on, off = synthesize_pair(cfg.background, cfg.detector, cfg.plan, sens, args.beta2_half, cfg.edges(), seed)
    out = _out_dir(args)
    write_spectrum(out / "on.csv", on)
    write_spectrum(out / "off.csv", off)
    files = ["on.csv", "off.csv"]
    outputs = {"sensitivity": report_text(sens).splitlines(), "beta2_half": args.beta2_half}
    if args.samples:
        mc = McConfig(n_samples=args.samples, seed=seed, chunk_size=args.chunk, workers=args.workers)
        lam = cfg.absorption_length()
        esc = simulate_escape(cfg.strip, lam, mc)
        scat = simulate_scatter_count(cfg.strip, mc)
        mc_fields = {
            "escape_mean": esc.mean,
            "escape_std_error": esc.std_error,
            "escape_exact": exact_escape_fraction(cfg.strip, lam),
            "scatter_mean": scat.mean,
            "scatter_std_error": scat.std_error,
            "scatter_expected": cfg.strip.window_D / cfg.strip.mean_free_path_mu,
            "n_samples": esc.n_samples,
        }
        (out / "mc.txt").write_text(report_text(mc_fields))
        files.append("mc.txt")
        outputs["mc"] = mc_fields
    outputs["files"] = files
    _write_record(out, cfg, seed, outputs, started)
    print(f"wrote {', '.join(str(out / f) for f in files)}")


def cmd_analyze(args, started):
    cfg = _scenario(args)
    out = _out_dir(args)
    on_path = Path(args.on) if args.on else out / "on.csv"
    off_path = Path(args.off) if args.off else out / "off.csv"
    on, off = read_spectrum(on_path), read_spectrum(off_path)
    cl = cfg.cl if args.cl is None else args.cl
    res, (value, variance), result = analyze_pair(
        on, off, cfg.sensitivity(), cfg.detector, cl, cfg.roi_halfwidth_sigma, cfg.roi_acceptance
    )
    s = roi_slice(res.bin_edges, *cfg.roi())
    summary = {
        "roi_lo_keV": float(res.bin_edges[s.start]),
        "roi_hi_keV": float(res.bin_edges[s.stop]),
        "roi_value": value,
        "roi_variance": variance,
        "roi_significance": value / np.sqrt(variance) if variance > 0 else 0.0,
    }
    write_residual(out / "residual.csv", res)
    (out / "roi.txt").write_text(report_text(summary))
    (out / "limit.txt").write_text(report_text(result))
    (out / "limit.csv").write_text(report_csv(result))
    sys.stdout.write(report_text(summary) + report_text(result))
    _write_record(out, cfg, None, {"roi": summary, "limit": report_text(result).splitlines(),
                                   "files": ["residual.csv", "roi.txt", "limit.txt", "limit.csv"]}, started)


def cmd_limit(args, started):
    cfg = _scenario(args)
    cl = cfg.cl if args.cl is None else args.cl
    if args.nx_limit is not None:
        result = beta_bound(args.nx_limit, cfg.sensitivity(), cfg.detector, cfg.roi_acceptance, cl)
    elif args.on or args.off:
        if not (args.on and args.off):
            raise CliError("--on and --off must be given together", EXIT_CONFIG)
        _, _, result = analyze_pair(read_spectrum(args.on), read_spectrum(args.off), cfg.sensitivity(),
                                    cfg.detector, cl, cfg.roi_halfwidth_sigma, cfg.roi_acceptance)
    else:
        result = cfg.projected_limit(cl)
    sys.stdout.write(report_text(result))
    if args.out:
        out = _out_dir(args)
        (out / "limit.txt").write_text(report_text(result))
        (out / "limit.csv").write_text(report_csv(result))
        _write_record(out, cfg, None, {"limit": report_text(result).splitlines(),
                                       "files": ["limit.txt", "limit.csv"]}, started)


def cmd_quon_check(args, started):
    g = gram_matrix(args.particles, args.modes, args.q)
    eig = np.linalg.eigvalsh(g.entries)
    labels = ["".join(str(m) for m in b.modes) for b in g.basis]
    width = max(8, max(len(x) for x in labels) + 1)
    lines = [f"q = {args.q!r}, particles = {args.particles}, modes = {args.modes}", "gram matrix:"]
    lines.append(" " * width + "".join(f"{lab:>{width}}" for lab in labels))
    for lab, row in zip(labels, g.entries):
        lines.append(f"{lab:>{width}}" + "".join(f"{v:>{width}.4g}" for v in row))
    lines.append("eigenvalues: " + " ".join(f"{v:.6g}" for v in eig))
    lines.append(f"min_eigenvalue = {float(eig[0])!r}")
    lines.append(f"exclusion_defect = {exclusion_defect(args.q)!r}")
    print("\n".join(lines))
    if args.out:
        out = _out_dir(args)
        rows = ["basis," + ",".join(labels)]
        rows += [lab + "," + ",".join(repr(float(v)) for v in row) for lab, row in zip(labels, g.entries)]
        (out / "gram.csv").write_text("\n".join(rows) + "\n")
        (out / "eigenvalues.csv").write_text("eigenvalue\n" + "".join(f"{float(v)!r}\n" for v in eig))
        _write_record(out, None, None, {"min_eigenvalue": float(eig[0]),
                                        "exclusion_defect": exclusion_defect(args.q),
                                        "files": ["gram.csv", "eigenvalues.csv"]}, started)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vipkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default=None):
        p.add_argument("--config", help="scenario file, or a bundled name: " + ", ".join(BUNDLED))
        p.add_argument("--out", default=out_default, help="output directory")
        return p

    p = common(sub.add_parser("sensitivity", help="expected counts and beta^2/2 bound"))
    p.add_argument("--nx-limit", type=float, help="upper limit on emitted anomalous X-rays")
    p.set_defaults(func=cmd_sensitivity)

    p = common(sub.add_parser("simulate", help="synthesize current-on/off spectra"), "out")
    p.add_argument("--seed", type=int)
    p.add_argument("--beta2-half", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=0, help="Monte Carlo samples for escape/scatter checks")
    p.add_argument("--chunk", type=int, default=65_536)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("analyze", help="subtract spectra and set a limit"), "out")
    p.add_argument("--on")
    p.add_argument("--off")
    p.add_argument("--cl", type=float)
    p.set_defaults(func=cmd_analyze)

    p = common(sub.add_parser("limit", help="limit from spectra, an nx limit, or the null projection"))
    p.add_argument("--on")
    p.add_argument("--off")
    p.add_argument("--cl", type=float)
    p.add_argument("--nx-limit", type=float, help="detected-count limit inside the ROI")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("quon-check", help="Gram matrix of a quon Fock sector")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--particles", type=int, default=2)
    p.add_argument("--modes", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_quon_check)
    return parser


def main(argv=None) -> int:
    started = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        args.func(args, started)
    except CliError as exc:
        code, msg = exc.code, str(exc)
    except (ConfigError, KeyError) as exc:
        code, msg = EXIT_CONFIG, f"config error: {exc}"
    except (SpectrumFormatError, OSError) as exc:
        code, msg = EXIT_IO, f"I/O error: {exc}"
    except (DegenerateRunError, OutOfRangeError, ValueError, ArithmeticError) as exc:
        code, msg = EXIT_NUMERIC, f"numeric error: {exc}"
    else:
        return 0
    print(f"vipkit: {msg}".replace("\n", " "), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
