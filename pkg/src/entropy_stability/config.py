"""Strict run configuration.

A config file is TOML restricted to dotted keys, e.g.::

    seed = 3
    alpha = 2.0
    family.kind = "power"
    perturbation.amplitude = 1e-3

Every key has a default (``DEFAULTS``); unknown keys and type mismatches are
errors. ``ESL_SEED`` in the environment overrides ``seed``.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .domain import DomainError, SampleSpec, SolutionFamily
from .harness import PerturbationSpec

SEED_ENV = "ESL_SEED"

PROOFCHAIN_STEPS = ("homogenize", "skew", "potential", "average", "property_suite")

DEFAULTS: dict[str, object] = {
    "seed": 0,
    "alpha": 2.0,
    "family.kind": "power",
    "family.c": 1.0,
    "family.alpha": 2.0,
    "family.a": 0.0,
    "input.source": "family",  # family | table | projection_x
    "input.table": "",
    "perturbation.kind": "uniformNoise",
    "perturbation.amplitude": 0.0,
    "perturbation.center": [1.0, 1.0, 1.0],
    "perturbation.width": 1.0,
    "perturbation.omega": 7.0,
    "sample.lo": 1e-3,
    "sample.hi": 1e3,
    "sample.per_axis": 16,
    "sample.t_lo": 1e-2,
    "sample.t_hi": 1e2,
    "sample.t_count": 9,
    "sample.mc_count": 0,
    "sample.spacing": "log",
    "fit.metric": "supNorm",
    "tolerance.atol": 1e-9,
    "tolerance.rtol": 1e-9,
    "output.timing": False,
    "proofchain.steps": list(PROOFCHAIN_STEPS),
    "proofchain.x": 1.0,
    "proofchain.y": 2.0,
    "proofchain.t_values": [],  # empty: 10^k toward the limit, k = 1..4
    "proofchain.h": 1.0,
    "proofchain.n": 16,
    "proofchain.window": 1000.0,
    "proofchain.count": 1000,
}


class ConfigError(ValueError):
    pass


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _check_type(key, value, default):
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, str):
        ok = isinstance(value, str)
    else:
        ok = isinstance(value, list) and all(
            isinstance(v, (int, float, str)) and not isinstance(v, bool) for v in value
        )
    if not ok:
        raise ConfigError(f"{key}: expected {type(default).__name__}, got {value!r}")
    return value


@dataclass(frozen=True)
class RunConfig:
    values: dict
    base_dir: Path

    def __getitem__(self, key):
        return self.values[key]

    def echo(self) -> dict:
        return dict(self.values)

    @property
    def seed(self) -> int:
        return self.values["seed"]

    def family(self) -> SolutionFamily:
        kind = self["family.kind"]
        if kind == "power":
            return SolutionFamily.power(self["family.c"], self["family.alpha"])
        if kind == "shannon":
            return SolutionFamily.shannon(self["family.c"])
        if kind == "constant":
            return SolutionFamily.constant(self["family.a"])
        raise DomainError(f"family.kind must be power, shannon or constant, got {kind!r}")

    def sample_spec(self) -> SampleSpec:
        return SampleSpec(**{k: self[f"sample.{k}"] for k in SampleSpec.__dataclass_fields__})

    def perturbation(self) -> PerturbationSpec:
        center = self["perturbation.center"]
        if len(center) != 3:
            raise DomainError("perturbation.center needs three coordinates")
        return PerturbationSpec(
            kind=self["perturbation.kind"],
            amplitude=self["perturbation.amplitude"],
            seed=self.seed,
            center=tuple(float(c) for c in center),
            width=self["perturbation.width"],
            omega=self["perturbation.omega"],
        )

    def table_path(self) -> Path:
        p = Path(self["input.table"])
        return p if p.is_absolute() else self.base_dir / p


def from_mapping(raw: dict, base_dir: Path = Path("."), env=None) -> RunConfig:
    env = os.environ if env is None else env
    flat = _flatten(raw)
    unknown = sorted(set(flat) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    values = dict(DEFAULTS)
    for k, v in flat.items():
        values[k] = _check_type(k, v, DEFAULTS[k])
    if env.get(SEED_ENV):
        try:
            values["seed"] = int(env[SEED_ENV], 0)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env[SEED_ENV]!r}") from None
    if not 0 <= values["seed"] < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    bad = [s for s in values["proofchain.steps"] if s not in PROOFCHAIN_STEPS]
    if bad:
        raise ConfigError(f"unknown proofchain step(s): {bad}")
    if values["input.source"] not in ("family", "table", "projection_x"):
        raise ConfigError("input.source must be family, table or projection_x")
    if values["input.source"] == "table" and not values["input.table"]:
        raise ConfigError("input.source = table needs input.table")
    return RunConfig(values, Path(base_dir))


def load(path, env=None) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return from_mapping(raw, path.parent, env)
