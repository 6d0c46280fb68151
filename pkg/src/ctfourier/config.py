"""Experiment configuration: a sectioned TOML file with strict keys.

Layout::

    seed = 0
    [model]   family, alpha, beta
    [grid]    x_max, lambda_max, nodes, panel
    [task]    name plus task-specific keys
    [output]  dir

Every field has a default, so the resolved config embedded in reports is
complete. ``[output]`` does not enter the digest.
"""
from __future__ import annotations

import copy
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .suite import HORMANDER_PAIRS, HORMANDER_SYMBOLS
from .transform import DEFAULT_LAMBDA_MAX, DEFAULT_X_MAX, GL_ORDER

TASKS: Dict[str, Dict[str, Any]] = {
    "phi": {"lambdas": [0.5, 1.0, 4.0], "x_end": 10.0, "points": 201},
    "density": {"lam_min": 1e-3, "lam_max": 1e2, "points": 400},
    "transform": {"function": "gaussian:1", "input": ""},
    "verify": {
        "inequality": "hy",
        "p": [4 / 3, 1.5, 2.0],
        "b": [],
        "psi": "resolvent:2",
        "symbols": list(HORMANDER_SYMBOLS),
        "pairs": [list(pq) for pq in HORMANDER_PAIRS],
    },
    "multiplier": {"symbol": "resolvent:1", "function": "gaussian:1"},
    "heat-decay": {"p": 4 / 3, "q": 4.0, "t_min": 0.01, "t_max": 4.0, "points": 12},
    "embed": {"b": 0.8, "p": 4 / 3, "q": 4.0},
    "solve-heat": {"symbol": "resolvent:1", "p_exp": 2.0, "c": 2.0, "T": 0.0, "steps": 32,
                   "tol": 1e-10, "max_iters": 50, "u0": "gaussian:1:0.1"},
    "solve-wave": {"symbol": "resolvent:1", "p_exp": 2.0, "c": 2.0, "T": 0.0, "steps": 32,
                   "tol": 1e-10, "max_iters": 50, "u0": "gaussian:1:0.1",
                   "u1": "gaussian:0.7:0.05", "b_coeff": "const:1", "horizon": 0.0},
}

FAMILIES = ("bessel-kingman", "jacobi")
MODEL_DEFAULTS = {"family": "bessel-kingman", "alpha": 0.5, "beta": 0.5}
GRID_DEFAULTS = {"x_max": DEFAULT_X_MAX, "lambda_max": DEFAULT_LAMBDA_MAX,
                 "nodes": GL_ORDER, "panel": 0.0}
OUTPUT_DEFAULTS = {"dir": "."}


@dataclass
class ExperimentConfig:
    task: str
    model: Dict[str, Any] = field(default_factory=lambda: dict(MODEL_DEFAULTS))
    grid: Dict[str, Any] = field(default_factory=lambda: dict(GRID_DEFAULTS))
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output: Dict[str, Any] = field(default_factory=lambda: dict(OUTPUT_DEFAULTS))

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {sorted(TASKS)}")
        self.model = _merge("model", MODEL_DEFAULTS, self.model)
        self.grid = _merge("grid", GRID_DEFAULTS, self.grid)
        self.params = _merge("task", TASKS[self.task], self.params)
        self.output = _merge("output", OUTPUT_DEFAULTS, self.output)
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if self.model["family"] not in FAMILIES:
            raise ConfigError(f"model.family must be one of {FAMILIES}")

    def semantic(self) -> dict:
        return {"task": self.task, "model": self.model, "grid": self.grid,
                "params": self.params, "seed": self.seed}

    def digest(self) -> str:
        blob = json.dumps(self.semantic(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_dict(self) -> dict:
        return {"seed": self.seed, "model": dict(self.model), "grid": dict(self.grid),
                "task": {"name": self.task, **self.params}, "output": dict(self.output)}

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = copy.deepcopy(data)
        unknown = set(data) - {"seed", "model", "grid", "task", "output"}
        if unknown:
            raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
        task = dict(data.get("task", {}))
        name = task.pop("name", None)
        if name is None:
            raise ConfigError("[task] needs a name")
        return cls(name, data.get("model", {}), data.get("grid", {}), task,
                   data.get("seed", 0), data.get("output", {}))

    @classmethod
    def from_toml(cls, text: str) -> "ExperimentConfig":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config parse error: {exc}") from None
        return cls.from_dict(data)


def _coerce(section, key, default, value):
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        if ok:
            value = float(value)
    elif isinstance(default, str):
        ok = isinstance(value, str)
    elif isinstance(default, list):
        ok = isinstance(value, list)
        if ok:
            value = [_num_or_list(section, key, v) for v in value]
    else:
        ok = False
    if not ok:
        raise ConfigError(f"[{section}] {key}: expected {type(default).__name__}, "
                          f"got {value!r}")
    return value


def _num_or_list(section, key, v):
    if isinstance(v, list):
        return [_num_or_list(section, key, u) for u in v]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if isinstance(v, str):
        return v
    raise ConfigError(f"[{section}] {key}: bad list entry {v!r}")


def _merge(section: str, defaults: dict, given: Optional[dict]) -> dict:
    given = given or {}
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"[{section}] unknown keys: {sorted(unknown)}")
    out = copy.deepcopy(defaults)
    for k, v in given.items():
        if v is not None:
            out[k] = _coerce(section, k, defaults[k], v)
    return out


def load(path: str) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return ExperimentConfig.from_toml(text)


def parse_location(message: str):
    """Extract ``(line, column)`` from a TOML diagnostic, if present."""
    m = re.search(r"line (\d+), column (\d+)", message)
    return (int(m.group(1)), int(m.group(2))) if m else None
