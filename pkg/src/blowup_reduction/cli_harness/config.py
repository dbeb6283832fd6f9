"""Scenario configuration: loading, defaults and validation.

A scenario file is YAML (JSON is a subset and works too).  Only ``kind`` is
required; everything else falls back to the defaults of that kind, which
``blowup-reduction print-defaults`` prints.
"""

from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

SCENARIO_KINDS = ("identities", "critical_search", "expansion_sweep", "scaling_fits", "torus_example")
OUTPUT_ENV = "BLOWUP_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


_COMMON = {"n": 5, "seed": 0, "output_dir": "output"}

DEFAULTS: dict[str, dict[str, Any]] = {
    "identities": {
        "dimensions": [5, 6, 7, 9],
        "tolerances": {"identity": 1e-8, "ratio": 1e-13},
    },
    "critical_search": {
        "boundary": {"kind": "ellipsoid", "center": [3.0, 0.0], "semi_axes": [1.5, 0.7]},
        "weight": {"kind": "product_power", "exponents": [2]},
        "seeds": [[3.0, 1.0], [3.0, -1.0], [2.0, 0.5]],
        "expected": [],
        "coefficients": {"c5": 1.0},
        "tolerances": {"gradient": 1e-10, "position": 1e-8, "box_radius": 1e-2},
    },
    "expansion_sweep": {
        "point": {"a_value": 1.0, "normal_derivative": 0.5, "mean_curvature": 1.0},
        "coefficients": {"c1": 1.0, "c2": 1.0, "c3": 1.0, "c5": 1.0},
        "d_grid": {"start": 0.05, "stop": 5.0, "count": 60},
        "epsilon_grid": [-0.05, -0.01, 0.01, 0.05],
        "tolerances": {"root": 1e-14},
    },
    "scaling_fits": {
        "epsilon_grid": {"start": 0.1, "ratio": 0.1, "count": 6},
        "d": 1.0,
        "radius": 1.0,
        "curvature": 1.0,
        "weight_slope": 1.0,
        "resolution": 1,
        "tolerances": {"exponent": 0.1, "r_squared": 0.99},
    },
    "torus_example": {
        "radius": 1.0,
        "axis_distances": [1.2, 1.4, 1.6, 2.0, 3.0],
        "search": True,
        "tolerances": {"position": 1e-8, "curvature": 1e-8},
    },
}


@dataclass
class ScenarioConfig:
    kind: str
    n: int
    seed: int
    output_dir: str
    params: dict = field(default_factory=dict)
    source: Optional[str] = None

    def tolerance(self, name: str) -> float:
        return float(self.params["tolerances"][name])

    def as_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "seed": self.seed, **self.params}


def defaults_for(kind: str) -> dict:
    if kind not in DEFAULTS:
        raise ConfigError(f"unknown scenario kind {kind!r}; expected one of {', '.join(SCENARIO_KINDS)}")
    return {"kind": kind, **copy.deepcopy(_COMMON), **copy.deepcopy(DEFAULTS[kind])}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def expand_grid(spec, name: str) -> list[float]:
    """A grid is an explicit list or {start, ratio, count} (geometric) or
    {start, stop, count} (linear)."""
    if isinstance(spec, dict):
        try:
            count = int(spec["count"])
            start = float(spec["start"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: grid needs start and count") from exc
        if count < 1:
            raise ConfigError(f"{name}: grid is empty")
        if "ratio" in spec:
            return [start * float(spec["ratio"]) ** k for k in range(count)]
        if "stop" in spec:
            stop = float(spec["stop"])
            if count == 1:
                return [start]
            return [start + (stop - start) * k / (count - 1) for k in range(count)]
        raise ConfigError(f"{name}: grid needs ratio or stop")
    if not isinstance(spec, (list, tuple)) or len(spec) == 0:
        raise ConfigError(f"{name}: grid is empty")
    try:
        return [float(v) for v in spec]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: grid entries must be numbers") from exc


def _check_tolerances(tols: dict):
    for k, v in tols.items():
        if not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"tolerance {k!r} must be a positive number, got {v!r}")


def validate(raw: dict, source: Optional[str] = None) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError("a scenario must be a mapping")
    kind = raw.get("kind")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"unknown scenario kind {kind!r}; expected one of {', '.join(SCENARIO_KINDS)}")
    merged = _merge(defaults_for(kind), raw)
    n = merged.pop("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"n must be an integer, got {n!r}")
    if kind != "critical_search" and n < 5:
        raise ConfigError(f"n must be at least 5, got {n}")
    seed = merged.pop("seed")
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    output_dir = str(merged.pop("output_dir"))
    merged.pop("kind")
    _check_tolerances(merged.get("tolerances", {}))

    for key in ("epsilon_grid", "d_grid"):
        if key in merged:
            merged[key] = expand_grid(merged[key], key)
    if kind == "expansion_sweep":
        if any(e == 0 for e in merged["epsilon_grid"]):
            raise ConfigError("epsilon_grid must not contain 0")
        if any(d <= 0 for d in merged["d_grid"]):
            raise ConfigError("d_grid must be positive")
    if kind == "identities":
        dims = merged["dimensions"]
        if not dims or any(not isinstance(v, int) or v < 5 for v in dims):
            raise ConfigError("dimensions must be a nonempty list of integers >= 5")
    if kind == "critical_search" and not merged["seeds"]:
        raise ConfigError("critical_search needs at least one seed point")
    if kind == "torus_example" and not merged["axis_distances"]:
        raise ConfigError("axis_distances is empty")
    return ScenarioConfig(kind=kind, n=n, seed=seed, output_dir=output_dir, params=merged, source=source)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc
    return validate(raw, source=str(path))


def resolve_output_dir(config: ScenarioConfig, override: Optional[str] = None) -> Path:
    """Command-line override, then the environment variable, then the config."""
    if override:
        return Path(override)
    env = os.environ.get(OUTPUT_ENV)
    if env:
        return Path(env) / config.kind
    return Path(config.output_dir)
