import json

import pytest
from click.testing import CliRunner

from qgenlab.expcli import (
    FAMILIES, ConfigError, REGISTRY, corpus_generate, golden_manifest, load_config, load_instance, parse_config,
    run, shipped_configs, verify_corpus,
)
from qgenlab.expcli.cli import main
from qgenlab.expcli.corpus import families_present

SMALL_XEB = {"experiment": "idqnn-xeb", "seed": 3, "params": {"models": 2, "shots": 2000},
             "thresholds": {"exact_xeb_worst_dev": {"max": 0.2}}}


def test_every_acceptance_experiment_has_a_shipped_config():
    shipped = shipped_configs()
    for name in ["idqnn-equiv", "idqnn-learn", "idqnn-xeb", "idqnn-clifford", "shadow-learn", "shadow-convexity",
                 "sew-verify", "shadow-circuit", "landscape-minima", "restart-prob", "ffward-run",
                 "landscape-scan"]:
        cfg = load_config(shipped[name])
        assert cfg.experiment == name and name in REGISTRY


@pytest.mark.parametrize("raw, field", [
    ({"experiment": "idqnn-xeb", "bogus": 1}, "bogus"),
    ({"experiment": "idqnn-xeb", "params": {"modles": 2}}, "params.modles"),
    ({"experiment": "idqnn-xeb", "thresholds": {"x": {"atmost": 1}}}, "atmost"),
    ({"experiment": "nope"}, "nope"),
    ({"seed": 1}, "experiment"),
    ({"experiment": "idqnn-xeb", "seed": -1}, "seed"),
    ({"experiment": "landscape-minima", "shots": 10}, "shots"),
])
def test_config_rejections_name_the_field(raw, field):
    with pytest.raises(ConfigError, match=field):
        parse_config(raw)


def test_malformed_config_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="malformed"):
        load_config(p)


def test_params_hash_reproducible():
    a, b = parse_config(SMALL_XEB), parse_config(json.loads(json.dumps(SMALL_XEB)))
    assert a.params_hash == b.params_hash
    assert a.with_seed(4).params_hash != a.params_hash
    top = parse_config({"experiment": "idqnn-xeb", "shots": 2000, "params": {"models": 2}, "seed": 3})
    assert top.params == a.params


def test_run_is_byte_deterministic(tmp_path):
    r1 = run(SMALL_XEB, output=tmp_path / "a")
    r2 = run(SMALL_XEB, output=tmp_path / "b")
    assert r1.exit_code == 0
    names = sorted(p.name for p in r1.directory.glob("*.csv")) + ["config.json"]
    assert len(names) >= 4  # results, checks, at least one raw table, config
    for name in names:
        assert (r1.directory / name).read_bytes() == (r2.directory / name).read_bytes()
    recs = [json.loads(l) for l in (r1.directory / "records.jsonl").read_text().splitlines()]
    assert {"experiment", "params_hash", "metric", "value", "stderr", "wall_time"} <= set(recs[0])
    assert all(r["params_hash"] == r1.config.params_hash for r in recs)


def test_threshold_failure_still_writes(tmp_path):
    raw = dict(SMALL_XEB, thresholds={"exact_xeb_worst_dev": {"max": -1.0}, "missing_metric": {"min": 0}})
    res = run(raw, output=tmp_path)
    assert res.exit_code == 1
    assert (res.directory / "results.csv").exists()
    checks = (res.directory / "checks.csv").read_text().splitlines()
    assert len(checks) == 3 and all(line.endswith(",0") for line in checks[1:])


def test_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("QGENLAB_OUTPUT", str(tmp_path / "env"))
    res = run(SMALL_XEB)
    assert res.directory.parent == tmp_path / "env"


def test_corpus_matches_golden_manifest(tmp_path):
    manifest = corpus_generate(0, tmp_path)
    golden = golden_manifest()
    assert golden["seed"] == 0 and manifest == golden["files"]
    assert families_present(manifest) == set(FAMILIES)
    assert verify_corpus(tmp_path) == []
    first = sorted(manifest)[0]
    (tmp_path / first).write_text("{}\n")
    assert verify_corpus(tmp_path) == [first]


def test_corpus_instances_load(tmp_path):
    corpus_generate(0, tmp_path)
    m = load_instance(tmp_path, "idqnn_learn_model/4x4.json")
    assert m.num_sites == 16
    c = load_instance(tmp_path, "depth1_target/00.json")
    assert c.num_qubits == 4
    h = load_instance(tmp_path, "hamiltonian/n08.json")
    assert h.n == 8


def test_corpus_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        corpus_generate(0, blocker / "sub")


def test_cli_run_exit_codes(tmp_path):
    runner = CliRunner()
    good = tmp_path / "good.json"
    good.write_text(json.dumps(SMALL_XEB))
    res = runner.invoke(main, ["run", "--config", str(good), "--output", str(tmp_path / "out")])
    assert res.exit_code == 0, res.output
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(dict(SMALL_XEB, thresholds={"exact_xeb_worst_dev": {"max": -1}})))
    res = runner.invoke(main, ["run", "--config", str(bad), "--output", str(tmp_path / "out")])
    assert res.exit_code == 1
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps(dict(SMALL_XEB, extra=1)))
    res = runner.invoke(main, ["run", "--config", str(unknown)])
    assert res.exit_code == 2 and "extra" in res.output


def test_cli_corpus_check(tmp_path):
    res = CliRunner().invoke(main, ["corpus", "--seed", "0", "--output", str(tmp_path), "--check"])
    assert res.exit_code == 0, res.output


def test_cli_shadow_stages(tmp_path):
    runner = CliRunner()
    corpus_generate(0, tmp_path / "c")
    target = str(tmp_path / "c" / "depth1_target" / "01.json")
    data, obs, bundle = (str(tmp_path / f) for f in ("d.jsonl", "o.json", "b.json"))
    assert runner.invoke(main, ["shadow-collect", "--circuit", target, "--samples", "20000", "--out", data]).exit_code == 0
    assert runner.invoke(main, ["shadow-fit", "--data", data, "--architecture", target, "--out", obs]).exit_code == 0
    res = runner.invoke(main, ["shadow-sew", "--observables", obs, "--construction", "heisenberg", "--out", bundle])
    assert res.exit_code == 0, res.output
    res = runner.invoke(main, ["shadow-verify", "--bundle", bundle, "--circuit", target, "--observables", obs])
    assert res.exit_code == 0, res.output
    report = json.loads(res.stdout.strip().splitlines()[-1])
    assert report["convention"] == "ancilla,system" and report["bound_holds"]


def test_cli_idqnn_learn(tmp_path):
    runner = CliRunner()
    corpus_generate(0, tmp_path / "c")
    model = str(tmp_path / "c" / "idqnn_lattice" / "00_2x2.json")
    data = str(tmp_path / "pairs.jsonl")
    assert runner.invoke(main, ["idqnn-sample", "--model", model, "--shots", "5000", "--out", data]).exit_code == 0
    res = runner.invoke(main, ["idqnn-learn", "--model", model, "--data", data])
    assert res.exit_code == 0, res.output
    lines = res.stdout.strip().splitlines()
    assert lines[0] == "site,beta_hat,count,learned" and len(lines) == 5


def test_cli_landscape_scan_csv(tmp_path):
    res = CliRunner().invoke(main, ["landscape-scan", "--points", "5", "--output", str(tmp_path)])
    assert res.exit_code == 0, res.output
    rows = res.stdout.strip().splitlines()
    assert rows[0] == "u,v,cost" and len(rows) == 26


def test_cli_restart_prob_rejects_unknown_optimizer_field(tmp_path):
    opt = tmp_path / "opt.json"
    opt.write_text(json.dumps({"kind": "BGD", "learning_rate": 0.3}))
    res = CliRunner().invoke(main, ["restart-prob", "--optimizer", str(opt)])
    assert res.exit_code == 2 and "learning_rate" in res.output
