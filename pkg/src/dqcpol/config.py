"""Run configuration: TOML documents, shipped presets and JSON round trips.

A config has four tables::

    [system]   anharmonicity, scalar_coupling (row-major matrices), coupling_ratio,
               optional couplings, cross_anharmonicity, dephasing,
               gamma_override, cavity_leak_dipole, weak_coupling
    [cavity]   omega0, theta_deg, n_eff, kappa, n_molecules
    [[modes]]  frequency, dephasing, dipole, orientation (one table per mode)
    [run]      sweep, grid, t1_fs, threshold, workers, out

Sweep values are scalars s; the couplings at each point are s * coupling_ratio.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .model import CavitySpec, SystemSpec, VibrationalMode
from .signal import FrequencyGrid

PRESETS = ("amide-I", "amide-I+II")


class ConfigError(ValueError):
    """Invalid configuration, with the offending field or line in the message."""


@dataclass(frozen=True)
class RunConfig:
    spec: SystemSpec
    coupling_ratio: tuple
    sweep: tuple
    grid: FrequencyGrid = field(default_factory=FrequencyGrid)
    t1_fs: float = 0.0
    threshold: float = 0.05
    workers: int = 1
    out: Optional[str] = None
    preset: Optional[str] = None

    def __post_init__(self):
        if not self.sweep:
            raise ConfigError("run.sweep: sweep list must not be empty")
        if len(self.coupling_ratio) != self.spec.m:
            raise ConfigError(f"system.coupling_ratio: expected {self.spec.m} entries")
        if any(not r >= 0 for r in self.coupling_ratio):
            raise ConfigError("system.coupling_ratio: entries must be >= 0")
        if any(not s >= 0 for s in self.sweep):
            raise ConfigError("run.sweep: coupling values must be >= 0")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("run.threshold: must lie in (0, 1)")
        if self.workers < 1:
            raise ConfigError("run.workers: must be >= 1")

    def couplings_at(self, value: float) -> tuple:
        return tuple(float(value) * r for r in self.coupling_ratio)

    def to_dict(self, execution: bool = True) -> dict:
        """Plain nested dict in the same layout as the TOML document.

        ``execution=False`` leaves out ``workers`` and ``out``, which change
        how a run is carried out but not what it produces.
        """
        spec = self.spec
        system = {
            "anharmonicity": [list(r) for r in spec.anharmonicity],
            "scalar_coupling": [list(r) for r in spec.scalar_coupling],
            "coupling_ratio": list(self.coupling_ratio),
            "cross_anharmonicity": spec.cross_anharmonicity,
            "dephasing": spec.dephasing,
            "cavity_leak_dipole": spec.cavity_leak_dipole,
            "weak_coupling": spec.weak_coupling,
        }
        if spec.couplings is not None:
            system["couplings"] = list(spec.couplings)
        if spec.gamma_override is not None:
            system["gamma_override"] = spec.gamma_override
        run = {
            "sweep": list(self.sweep),
            "grid": self.grid.to_string(),
            "t1_fs": self.t1_fs,
            "threshold": self.threshold,
        }
        if execution:
            run["workers"] = self.workers
        if execution and self.out is not None:
            run["out"] = self.out
        out = {
            "system": system,
            "cavity": dataclasses.asdict(spec.cavity),
            "modes": [dataclasses.asdict(md) for md in spec.modes],
            "run": run,
        }
        if self.preset is not None:
            out["preset"] = self.preset
        return out


_SYSTEM_KEYS = {
    "anharmonicity", "scalar_coupling", "coupling_ratio", "couplings", "cross_anharmonicity",
    "dephasing", "gamma_override", "cavity_leak_dipole", "weak_coupling",
}
_CAVITY_KEYS = {f.name for f in dataclasses.fields(CavitySpec)}
_MODE_KEYS = {f.name for f in dataclasses.fields(VibrationalMode)}
_RUN_KEYS = {"sweep", "grid", "t1_fs", "threshold", "workers", "out"}


def _check_keys(table, allowed, where):
    if not isinstance(table, dict):
        raise ConfigError(f"{where}: expected a table")
    extra = sorted(set(table) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(extra)}")


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _numbers(value, where):
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list of numbers")
    return tuple(_number(v, f"{where}[{k}]") for k, v in enumerate(value))


def _matrix(value, where):
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a row-major matrix (list of rows)")
    return tuple(_numbers(row, f"{where}[{k}]") for k, row in enumerate(value))


def _build(where, factory, **kwargs):
    try:
        return factory(**kwargs)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def from_dict(doc: dict) -> RunConfig:
    """Validate a parsed document and build a :class:`RunConfig`."""
    _check_keys(doc, {"system", "cavity", "modes", "run", "preset"}, "config")
    system = doc.get("system", {})
    _check_keys(system, _SYSTEM_KEYS, "system")
    cav = doc.get("cavity", {})
    _check_keys(cav, _CAVITY_KEYS, "cavity")
    run = doc.get("run", {})
    _check_keys(run, _RUN_KEYS, "run")
    raw_modes = doc.get("modes")
    if not isinstance(raw_modes, list) or not raw_modes:
        raise ConfigError("modes: at least one [[modes]] table is required")

    modes = []
    for k, md in enumerate(raw_modes):
        where = f"modes[{k}]"
        _check_keys(md, _MODE_KEYS, where)
        if "frequency" not in md:
            raise ConfigError(f"{where}.frequency: missing")
        kw = {key: _number(v, f"{where}.{key}") for key, v in md.items()}
        modes.append(_build(where, VibrationalMode, **kw))
    m = len(modes)

    cavity = _build(
        "cavity", CavitySpec, **{key: _number(v, f"cavity.{key}") for key, v in cav.items()}
    )

    kw = {}
    for key in ("anharmonicity", "scalar_coupling"):
        if key in system:
            kw[key] = _matrix(system[key], f"system.{key}")
    if "couplings" in system:
        kw["couplings"] = _numbers(system["couplings"], "system.couplings")
    for key in ("gamma_override", "cavity_leak_dipole"):
        if key in system:
            kw[key] = _number(system[key], f"system.{key}")
    if "cross_anharmonicity" in system:
        if not isinstance(system["cross_anharmonicity"], bool):
            raise ConfigError("system.cross_anharmonicity: expected true or false")
        kw["cross_anharmonicity"] = system["cross_anharmonicity"]
    for key in ("dephasing", "weak_coupling"):
        if key in system:
            kw[key] = system[key]
    spec = _build("system", SystemSpec, modes=tuple(modes), cavity=cavity, **kw)

    ratio = _numbers(system.get("coupling_ratio", [1.0] * m), "system.coupling_ratio")
    if "sweep" not in run:
        raise ConfigError("run.sweep: missing (list of coupling values in cm^-1)")
    sweep = _numbers(run["sweep"], "run.sweep")
    rkw = {}
    if "grid" in run:
        if not isinstance(run["grid"], str):
            raise ConfigError("run.grid: expected 'lo2:hi2:step2,lo3:hi3:step3'")
        rkw["grid"] = _build("run.grid", FrequencyGrid.parse, text=run["grid"])
    for key in ("t1_fs", "threshold"):
        if key in run:
            rkw[key] = _number(run[key], f"run.{key}")
    if "workers" in run:
        if isinstance(run["workers"], bool) or not isinstance(run["workers"], int):
            raise ConfigError("run.workers: expected an integer")
        rkw["workers"] = run["workers"]
    if "out" in run:
        rkw["out"] = str(run["out"])
    preset = doc.get("preset")
    return RunConfig(spec, ratio, sweep, preset=preset, **rkw)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    try:
        return from_dict(doc)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, str(path))


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return resources.files("dqcpol.presets").joinpath(f"{name}.toml").read_text(encoding="utf-8")


def load_preset(name: str) -> RunConfig:
    return replace(parse_config(preset_text(name), f"preset {name}"), preset=name)
