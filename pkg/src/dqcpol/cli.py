"""Command-line front end.

Every subcommand computes all of its outputs in memory first and only then
writes files, so a failing run leaves the output directory untouched.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import io as dio
from .analysis import assign_peaks, find_peaks
from .config import PRESETS, ConfigError, load_config, load_preset
from .model import DomainError
from .polariton import diagonalize_system, transition_dipoles
from .selfcheck import run_selfcheck
from .signal import FrequencyGrid, coupling_sweep


def _float_list(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _grid(text: str) -> FrequencyGrid:
    try:
        return FrequencyGrid.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_run_options(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="TOML run configuration")
    src.add_argument("--preset", choices=PRESETS, help="bundled system")
    p.add_argument("--gt", type=_float_list, metavar="LIST", help="coupling sweep values, e.g. 0,20,50")
    p.add_argument("--t1", type=float, metavar="FS", help="first delay in fs")
    p.add_argument("--grid", type=_grid, metavar="lo2:hi2:step2,lo3:hi3:step3")
    p.add_argument("--threshold", type=float, metavar="F", help="peak threshold as a fraction of max |S|")
    p.add_argument("--workers", type=int, metavar="N", help="parallel sweep points")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--no-cross-anharmonicity", action="store_true",
                   help="drop the i != j quartic terms")
    p.add_argument("--gamma-override", type=float, metavar="G", help="single dephasing for every coherence")
    p.add_argument("--cavity-leak-dipole", type=float, metavar="MU", help="dipole of the cavity mode")


def _resolve(args):
    cfg = load_config(args.config) if args.config else load_preset(args.preset)
    spec = cfg.spec
    toggles = {}
    if args.no_cross_anharmonicity:
        toggles["cross_anharmonicity"] = False
    if args.gamma_override is not None:
        toggles["gamma_override"] = args.gamma_override
    if args.cavity_leak_dipole is not None:
        toggles["cavity_leak_dipole"] = args.cavity_leak_dipole
    if toggles:
        try:
            spec = replace(spec, **toggles)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    over = {"spec": spec}
    for attr, key in (("gt", "sweep"), ("t1", "t1_fs"), ("grid", "grid"), ("threshold", "threshold"),
                      ("workers", "workers"), ("out", "out")):
        val = getattr(args, attr)
        if val is not None:
            over[key] = val
    return replace(cfg, **over)


def _need_out(cfg) -> str:
    if cfg.out is None:
        raise ConfigError("no output directory: pass --out or set run.out")
    return cfg.out


def _spectra_files(cfg, sweep) -> dict:
    files = {}
    for value, system, sg in zip(sweep.values, sweep.systems, sweep.spectra):
        tag = dio.point_tag(value)
        table = transition_dipoles(system)
        peaks = assign_peaks(find_peaks(sg, cfg.threshold), table)
        files[f"spectrum_{tag}.csv"] = dio.grid_csv(sg)
        files[f"spectrum_{tag}.json"] = dio.metadata_json(cfg, sg, value)
        files[f"peaks_{tag}.csv"] = dio.peaks_csv(peaks)
    return files


def _sweep(cfg):
    return coupling_sweep(cfg.spec, cfg.sweep, cfg.grid, cfg.t1_fs, cfg.coupling_ratio, cfg.workers)


def cmd_spectrum(args) -> int:
    cfg = _resolve(args)
    out = _need_out(cfg)
    if len(cfg.sweep) != 1:
        raise ConfigError(f"spectrum takes one coupling value, got {len(cfg.sweep)}; use 'sweep'")
    files = _spectra_files(cfg, _sweep(cfg))
    for path in dio.write_files(out, files):
        print(path)
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve(args)
    out = _need_out(cfg)
    result = _sweep(cfg)
    files = _spectra_files(cfg, result)
    files["branches.csv"] = dio.branches_csv(result)
    for path in dio.write_files(out, files):
        print(path)
    return 0


def cmd_peaks(args) -> int:
    cfg = _resolve(args)
    result = _sweep(cfg)
    files = {}
    for value, system, sg in zip(result.values, result.systems, result.spectra):
        peaks = assign_peaks(find_peaks(sg, cfg.threshold), transition_dipoles(system))
        text = dio.peaks_csv(peaks)
        files[f"peaks_{dio.point_tag(value)}.csv"] = text
        print(f"# coupling {value:g}")
        sys.stdout.write(text)
    if cfg.out is not None:
        dio.write_files(cfg.out, files)
    return 0


def cmd_levels(args) -> int:
    cfg = _resolve(args)
    out = _need_out(cfg)
    files = {}
    for value in cfg.sweep:
        system = diagonalize_system(cfg.spec, cfg.couplings_at(value))
        tag = dio.point_tag(value)
        files[f"levels_{tag}.csv"] = dio.levels_csv(system)
        files[f"transitions_{tag}.csv"] = dio.transitions_csv(transition_dipoles(system))
    for path in dio.write_files(out, files):
        print(path)
    return 0


def cmd_selfcheck(args) -> int:
    results = run_selfcheck()
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqcpol", description="Vibrational polariton DQC spectra")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, hlp in (
        ("spectrum", cmd_spectrum, "one spectrum: grid CSV, metadata JSON, peak table"),
        ("sweep", cmd_sweep, "one spectrum per coupling value plus branch tracking"),
        ("peaks", cmd_peaks, "print assigned peak tables"),
        ("levels", cmd_levels, "energy levels and transition tables"),
    ):
        p = sub.add_parser(name, help=hlp)
        _add_run_options(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("selfcheck", help="run the invariant suite")
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"dqcpol: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"dqcpol: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
