"""Experiment configuration: validation, defaults and the reproducible parameters hash."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

TOP_LEVEL = ("experiment", "seed", "params", "shots", "thresholds", "output_dir", "description")
THRESHOLD_OPS = ("min", "max")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = 0
    params: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    output_dir: str | None = None
    description: str = ""

    def canonical(self) -> dict:
        return {"experiment": self.experiment, "seed": self.seed, "params": self.params}

    @property
    def params_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        d = {"experiment": self.experiment, "seed": self.seed, "params": self.params,
             "thresholds": self.thresholds}
        if self.description:
            d["description"] = self.description
        return d

    def with_seed(self, seed: int) -> "ExperimentConfig":
        out = copy.deepcopy(self)
        out.seed = int(seed)
        return out


def _check_thresholds(th: dict) -> dict:
    if not isinstance(th, dict):
        raise ConfigError("thresholds must be an object")
    for metric, rule in th.items():
        if not isinstance(rule, dict) or not rule:
            raise ConfigError(f"threshold for {metric!r} must be an object with min and/or max")
        for op, v in rule.items():
            if op not in THRESHOLD_OPS:
                raise ConfigError(f"unknown threshold field {op!r} for metric {metric!r}")
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"threshold {metric}.{op} must be a number")
    return th


def _merge_params(experiment: str, given: dict, defaults: dict) -> dict:
    if not isinstance(given, dict):
        raise ConfigError("params must be an object")
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown field(s) for {experiment}: {', '.join('params.' + u for u in unknown)}")
    out = copy.deepcopy(defaults)
    out.update(copy.deepcopy(given))
    return out


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a raw config object; unknown fields are rejected by name."""
    from .experiments import REGISTRY

    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - set(TOP_LEVEL))
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(unknown)}")
    if "experiment" not in data:
        raise ConfigError("missing field: experiment")
    name = data["experiment"]
    if name not in REGISTRY:
        raise ConfigError(f"unknown experiment id {name!r}; known: {', '.join(sorted(REGISTRY))}")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    params = _merge_params(name, data.get("params", {}), REGISTRY[name].defaults)
    if "shots" in data:
        if "shots" not in REGISTRY[name].defaults:
            raise ConfigError(f"experiment {name} takes no shots field")
        if "shots" in data.get("params", {}):
            raise ConfigError("shots given both at top level and in params")
        params["shots"] = data["shots"]
    return ExperimentConfig(name, seed, params, _check_thresholds(data.get("thresholds", {})),
                            data.get("output_dir"), data.get("description", ""))


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return parse_config(data)


def shipped_configs() -> dict:
    """Name -> path of the config files bundled with the package."""
    root = Path(__file__).parent / "configs"
    return {p.stem: p for p in sorted(root.glob("*.json"))}
