"""Command-line entry point: ``qgenlab <command>``."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from ..qcore import make_rng
from .config import ConfigError, load_config, parse_config, shipped_configs
from .runner import OUTPUT_ENV, run


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _report(result):
    for name, (v, se) in result.outcome.metrics.items():
        click.echo(f"{name} = {v:.6g}" + (f" +- {se:.2g}" if se is not None else ""), err=True)
    for c in result.checks:
        click.echo(f"{'PASS' if c.passed else 'FAIL'} {c.metric} {c.op} {c.threshold:g} (value {c.value})", err=True)
    click.echo(f"results written to {result.directory}", err=True)


def _run_table(raw: dict, table: str, output, jobs: int, out):
    try:
        cfg = parse_config(raw)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    result = run(cfg, output=output, jobs=jobs)
    header, rows = result.outcome.tables[table]
    _emit(_table_csv(header, rows), out)
    _report(result)
    sys.exit(result.exit_code)


def _optimizer_params(path) -> dict:
    from ..landscape import OptimizerConfig

    if path is None:
        return None
    d = json.loads(Path(path).read_text())
    known = {f.name for f in dataclasses.fields(OptimizerConfig)}
    unknown = sorted(set(d) - known)
    if unknown:
        raise click.UsageError(f"unknown optimizer field(s): {', '.join(unknown)}")
    OptimizerConfig(**d)
    return d


output_option = click.option("--output", type=click.Path(file_okay=False), envvar=OUTPUT_ENV,
                              help=f"Result root directory (default ${OUTPUT_ENV} or ./qgenlab-results).")
jobs_option = click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True,
                           help="Worker processes.")
seed_option = click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
out_option = click.option("--out", type=click.Path(dir_okay=False), help="Write to this file instead of stdout.")


@click.group()
def main():
    """Quantum generative-model experiments."""


@main.command("list")
def list_configs():
    """Show the shipped experiment configs."""
    for name, path in shipped_configs().items():
        click.echo(f"{name}\t{path}")


@main.command("run")
@click.option("--config", "config", required=True,
              help="Config file, or the name of a shipped config (see `qgenlab list`).")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Override the config's root seed.")
@jobs_option
@output_option
def run_cmd(config, seed, jobs, output):
    """Run one experiment; exit 0 iff all its thresholds pass."""
    path = Path(config)
    if not path.exists():
        shipped = shipped_configs()
        if config not in shipped:
            raise click.UsageError(f"no config file or shipped config named {config!r}")
        path = shipped[config]
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    result = run(cfg, output=output, jobs=jobs, seed=seed)
    _report(result)
    sys.exit(result.exit_code)


@main.command("corpus")
@seed_option
@click.option("--output", required=True, type=click.Path(file_okay=False))
@click.option("--check", is_flag=True, help="Also compare hashes with the bundled golden manifest.")
def corpus_cmd(seed, output, check):
    """Write the instance corpus and its manifest."""
    from .corpus import corpus_generate, golden_manifest

    try:
        manifest = corpus_generate(seed, output)
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"{len(manifest)} files written to {output}", err=True)
    if check:
        golden = golden_manifest()
        if golden["seed"] != seed:
            raise click.ClickException(f"golden manifest is for seed {golden['seed']}")
        bad = sorted(k for k in set(manifest) | set(golden["files"]) if manifest.get(k) != golden["files"].get(k))
        for k in bad:
            click.echo(f"MISMATCH {k}", err=True)
        sys.exit(1 if bad else 0)


# ---------------------------------------------------------------- idqnn

def _read_pairs(path):
    xs, ys = [], []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            d = json.loads(line)
            xs.append([int(c) for c in d["x"]])
            ys.append([int(c) for c in d["y"]])
    if not xs:
        raise click.UsageError("empty dataset")
    return np.array(xs, dtype=np.int8), np.array(ys, dtype=np.int8)


@main.command("idqnn-sample")
@click.option("--model", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--shots", type=click.IntRange(min=1), default=1000, show_default=True)
@seed_option
@out_option
def idqnn_sample(model, shots, seed, out):
    """Draw (x, y) pairs from a model's deep form as JSON lines."""
    from ..idqnn import IdqnnModel, InputDistribution, sample_deep

    m = IdqnnModel.from_json(Path(model).read_text())
    rng = make_rng(seed, "cli", "idqnn-sample")
    x = InputDistribution.default().sample(m.num_sites, shots, rng)
    y = sample_deep(m, x, rng)
    lines = [json.dumps({"x": "".join(map(str, a)), "y": "".join(map(str, b))}) for a, b in zip(x, y)]
    _emit("\n".join(lines) + "\n", out)


@main.command("idqnn-learn")
@click.option("--model", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Model JSON; only its lattice is used.")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@out_option
def idqnn_learn(model, data, out):
    """Estimate per-site beta from classical (x, y) data; CSV of beta_hat and counts."""
    from ..idqnn import IdqnnModel, learn_beta

    m = IdqnnModel.from_json(Path(model).read_text())
    x, y = _read_pairs(data)
    if x.shape[1] != m.num_sites or y.shape != x.shape:
        raise click.UsageError(f"dataset rows must have {m.num_sites} bits in x and y")
    _emit(learn_beta(x, y, m.graph).to_csv(), out)


# ---------------------------------------------------------------- shadowlearn

def _observables_to_json(n: int, obs: dict) -> list:
    return [{"qubit": i, "basis": P, "terms": {s: float(c) for s, c in sorted(o.terms.items()) if c != 0}}
            for (i, P), o in sorted(obs.items())]


def _observables_from_json(d: dict) -> dict:
    from ..qcore import PauliObservable

    return {(int(e["qubit"]), e["basis"]): PauliObservable(d["n"], dict(e["terms"])) for e in d["observables"]}


@main.command("shadow-collect")
@click.option("--circuit", required=True, type=click.Path(exists=True, dir_okay=False), help="Target circuit JSON.")
@click.option("--samples", type=click.IntRange(min=1), required=True)
@seed_option
@out_option
def shadow_collect(circuit, samples, seed, out):
    """Randomized single-qubit measurement records as JSON lines."""
    from ..qcore import Circuit
    from ..shadowlearn import collect_dataset

    circ = Circuit.from_dict(json.loads(Path(circuit).read_text()))
    _emit(collect_dataset(circ, samples, make_rng(seed, "cli", "shadow-collect")).to_jsonl(), out)


@main.command("shadow-fit")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--architecture", type=click.Path(exists=True, dir_okay=False),
              help="Circuit JSON whose light cones fix the support (least-squares fit).")
@click.option("--k", type=click.IntRange(min=1), help="Light-cone size bound for the unknown-architecture mode.")
@click.option("--eps", type=float, default=0.1, show_default=True)
@click.option("--delta", type=float, default=0.1, show_default=True)
@out_option
def shadow_fit(data, architecture, k, eps, delta, out):
    """Learn the Heisenberg-evolved single-qubit Paulis."""
    from ..qcore import Circuit
    from ..shadowlearn import MeasurementDataset, architecture_lightcones, fit_alpha_least_squares, \
        learn_observables

    if (architecture is None) == (k is None):
        raise click.UsageError("give exactly one of --architecture or --k")
    ds = MeasurementDataset.from_jsonl(Path(data).read_text())
    if architecture:
        arch = Circuit.from_dict(json.loads(Path(architecture).read_text()))
        if arch.num_qubits != ds.n:
            raise click.UsageError("architecture and dataset disagree on the qubit count")
        coeffs, _ = fit_alpha_least_squares(ds, architecture_lightcones(arch))
        obs = coeffs.observables()
        payload = {"n": ds.n, "mode": "known_arch", "coefficients": coeffs.to_dict()}
    else:
        obs, rep = learn_observables(ds, k, eps, delta)
        payload = {"n": ds.n, "mode": "unknown", "k": k, "eps": eps, "delta": delta,
                   "required_N": rep.required_N, "near_threshold": len(rep.near_threshold)}
    payload["observables"] = _observables_to_json(ds.n, obs)
    _emit(json.dumps(payload, sort_keys=True) + "\n", out)


@main.command("shadow-sew")
@click.option("--observables", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Output of shadow-fit.")
@click.option("--construction", type=click.Choice(["inversion", "heisenberg"]), default="inversion",
              show_default=True)
@click.option("--restarts", type=click.IntRange(min=1), default=20, show_default=True)
@seed_option
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="Bundle JSON path.")
def shadow_sew(observables, construction, restarts, seed, out):
    """Sew the learned observables into a 2n-qubit circuit bundle."""
    from ..shadowlearn import BASES, InversionConfig, LearningReport, PauliCoefficients, \
        direct_heisenberg_sew, save_bundle, sew_local_inversions, train_local_inversion

    d = json.loads(Path(observables).read_text())
    obs = _observables_from_json(d)
    n = d["n"]
    coeffs = PauliCoefficients.from_dict(d["coefficients"]) if d.get("coefficients") else None
    rng = make_rng(seed, "cli", "shadow-sew")
    if construction == "inversion":
        cfg = InversionConfig(restarts=restarts)
        invs = [train_local_inversion({P: obs[(i, P)] for P in BASES}, i, rng, config=cfg) for i in range(n)]
        sew = sew_local_inversions(invs, n)
        report = LearningReport("LocalInversion", [iv.eps for iv in invs])
    else:
        invs = []
        sew = direct_heisenberg_sew(obs, n)
        report = LearningReport("DirectHeisenberg", [])
    save_bundle(out, sew, report, coeffs, invs)
    click.echo(f"{sew.kind} bundle with {sew.gate_count} factors written to {out}", err=True)


@main.command("shadow-verify")
@click.option("--bundle", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--circuit", required=True, type=click.Path(exists=True, dir_okay=False), help="True target circuit.")
@click.option("--observables", type=click.Path(exists=True, dir_okay=False),
              help="shadow-fit output; needed for the Heisenberg-form bound.")
def shadow_verify(bundle, circuit, observables):
    """Dense check of a bundle against its target (n <= 6); exit 1 if the sewing bound fails."""
    from ..qcore import Circuit
    from ..shadowlearn import load_bundle, true_heisenberg_error, true_inversion_error

    b = load_bundle(bundle)
    sew = b["sewed"]
    u = Circuit.from_dict(json.loads(Path(circuit).read_text())).unitary()
    err = sew.error(u)
    if sew.kind == "LocalInversion":
        true_eps = [true_inversion_error(iv.unitary, iv.window, u, iv.qubit) for iv in b["inversions"]]
        bound = 0.5 * sum(true_eps)
    else:
        if observables is None:
            raise click.UsageError("the Heisenberg bound needs --observables")
        obs = _observables_from_json(json.loads(Path(observables).read_text()))
        true_eps = [true_heisenberg_error(obs, u, i) for i in range(sew.n)]
        bound = sum(true_eps)
    click.echo(json.dumps({"construction": sew.kind, "convention": sew.convention, "spectral_error": err,
                           "diamond_surrogate": 2.0 * err, "true_eps": true_eps, "bound": bound,
                           "bound_holds": bool(err <= bound + 1e-9)}, sort_keys=True))
    sys.exit(0 if err <= bound + 1e-9 else 1)


# ---------------------------------------------------------------- landscape

@main.command("restart-prob")
@click.option("--sizes", default="4,8,12,16", show_default=True, help="Comma-separated qubit counts.")
@click.option("--modes", default="block,whole", show_default=True)
@click.option("--trials", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--optimizer", "optimizer", type=click.Path(exists=True, dir_okay=False),
              help="JSON with OptimizerConfig fields.")
@seed_option
@jobs_option
@output_option
@out_option
def restart_prob(sizes, modes, trials, optimizer, seed, jobs, output, out):
    """Single-run success probabilities with Wilson intervals, as CSV."""
    params = {"sizes": [int(s) for s in sizes.split(",")], "modes": modes.split(","), "trials": trials}
    opt = _optimizer_params(optimizer)
    if opt is not None:
        params["optimizer"] = opt
    _run_table({"experiment": "restart-prob", "seed": seed, "params": params}, "success", output, jobs, out)


@main.command("landscape-scan")
@click.option("--n", "n", type=click.IntRange(min=2), default=8, show_default=True)
@click.option("--kind", type=click.Choice(["layered3", "swappow"]), default="layered3", show_default=True)
@click.option("--directions", type=click.Choice(["aligned", "random"]), default="aligned", show_default=True)
@click.option("--points", type=click.IntRange(min=2), default=21, show_default=True)
@seed_option
@output_option
@out_option
def landscape_scan(n, kind, directions, points, seed, output, out):
    """Cost on a 2D affine slice of parameter space, as (u, v, cost) CSV."""
    params = {"n": n, "kind": kind, "directions": directions, "points": points}
    _run_table({"experiment": "landscape-scan", "seed": seed, "params": params}, "slice", output, 1, out)


# ---------------------------------------------------------------- ffward

@main.command("ffward-run")
@click.option("--n", "n", type=click.IntRange(min=2), default=8, show_default=True)
@seed_option
@click.option("--grid", "grids", type=click.Choice(["short", "long"]), multiple=True,
              help="Time grid(s); repeat for both (default both).")
@click.option("--points", type=click.IntRange(min=1), default=41, show_default=True)
@click.option("--noise/--no-noise", default=True, show_default=True)
@click.option("--mitigation/--no-mitigation", default=True, show_default=True)
@click.option("--shots", type=click.IntRange(min=1), default=200000, show_default=True)
@output_option
@out_option
def ffward_run(n, seed, grids, points, noise, mitigation, shots, output, out):
    """Learn the fast-forwarded circuits and emit per-qubit <Z> as CSV."""
    params = {"n": n, "grids": list(grids) or ["short", "long"], "points": points, "noise": noise,
              "mitigation": mitigation, "shots": shots}
    _run_table({"experiment": "ffward-run", "seed": seed, "params": params}, "observables", output, 1, out)


if __name__ == "__main__":
    main()
