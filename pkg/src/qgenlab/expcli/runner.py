"""Execute one configured experiment and write its records, checks and raw tables."""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .config import ExperimentConfig, load_config, parse_config
from .experiments import REGISTRY, Outcome

OUTPUT_ENV = "QGENLAB_OUTPUT"
DEFAULT_OUTPUT = "qgenlab-results"
WALL_TIME = "wall_time"


@dataclass
class ResultRecord:
    experiment: str
    params_hash: str
    metric: str
    value: float
    stderr: float | None
    wall_time: float


@dataclass
class Check:
    metric: str
    op: str
    threshold: float
    value: float | None
    passed: bool


@dataclass
class RunResult:
    config: ExperimentConfig
    outcome: Outcome
    wall_time: float
    checks: list
    directory: Path

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def output_root(explicit=None) -> Path:
    return Path(explicit or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)


def evaluate_thresholds(thresholds: dict, outcome: Outcome, wall_time: float) -> list:
    checks = []
    for metric, rule in thresholds.items():
        if metric == WALL_TIME:
            value = wall_time
        elif metric in outcome.metrics:
            value = outcome.value(metric)
        else:
            value = None
        for op, bound in rule.items():
            ok = value is not None and (value >= bound if op == "min" else value <= bound)
            checks.append(Check(metric, op, float(bound), value, bool(ok)))
    return checks


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def write_results(result: RunResult):
    """results.csv, checks.csv and the raw tables are deterministic; wall times go to records.jsonl only."""
    d = result.directory
    d.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    (d / "config.json").write_text(json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n")
    metrics = [[cfg.experiment, cfg.params_hash, name, v, se] for name, (v, se) in result.outcome.metrics.items()]
    _write_csv(d / "results.csv", ["experiment", "params_hash", "metric", "value", "stderr"], metrics)
    _write_csv(d / "checks.csv", ["metric", "op", "threshold", "value", "passed"],
               [[c.metric, c.op, c.threshold, "" if c.metric == WALL_TIME else c.value, int(c.passed)]
                for c in result.checks])
    with open(d / "records.jsonl", "w") as fh:
        for name, (v, se) in result.outcome.metrics.items():
            rec = ResultRecord(cfg.experiment, cfg.params_hash, name, v, se, result.wall_time)
            fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")
    for name, (header, rows) in result.outcome.tables.items():
        _write_csv(d / f"{name}.csv", header, rows)


def run(config, output=None, jobs: int = 1, seed: int | None = None, write: bool = True) -> RunResult:
    """Run a config (path, raw dict or ExperimentConfig); results land in <root>/<experiment>-<hash>."""
    if isinstance(config, ExperimentConfig):
        cfg = config
    elif isinstance(config, dict):
        cfg = parse_config(config)
    else:
        cfg = load_config(config)
    if seed is not None:
        cfg = cfg.with_seed(seed)
    exp = REGISTRY[cfg.experiment]
    t0 = time.perf_counter()
    outcome = exp.fn(cfg.params, cfg.seed, jobs)
    wall = time.perf_counter() - t0
    checks = evaluate_thresholds(cfg.thresholds, outcome, wall)
    root = Path(cfg.output_dir) if (cfg.output_dir and output is None) else output_root(output)
    result = RunResult(cfg, outcome, wall, checks, root / f"{cfg.experiment}-{cfg.params_hash}")
    if write:
        write_results(result)
    return result
