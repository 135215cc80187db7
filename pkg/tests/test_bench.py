import json
import os
from pathlib import Path

import numpy as np
import pytest

from aced import cli
from aced.bench import (
    ConfigError,
    ResultRow,
    StdinLabelModel,
    build_instance,
    emit_plotdata,
    export_instance,
    ingest_csv,
    load_config,
    read_results_csv,
    run,
)
from aced.complexity import make_thresholds
from aced.core import gap_table


def write_config(tmp_path, body):
    p = tmp_path / "config.ini"
    p.write_text(body)
    return p


BASE = """
[instance]
generator = thresholds
n = 8
k_star = 5
eps = 1.0
persistent = true
seed = 5

[run]
seeds = {seeds}
holdout_fraction = {holdout}
output_dir = {out}

[algorithm passive]
T = 8
"""


def test_load_config_and_validation(tmp_path):
    cfg = load_config(write_config(tmp_path, BASE.format(seeds="0,1", holdout=0.0, out=tmp_path)))
    assert cfg.seeds == [0, 1]
    assert cfg.algorithms[0][1] == "passive"
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, BASE.format(seeds="0", holdout=0.9, out=tmp_path)))
    bad = BASE.format(seeds="0", holdout=0.0, out=tmp_path) + "\n[algorithm bogus]\nT = 3\n"
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, bad))
    missing = BASE.format(seeds="0", holdout=0.0, out=tmp_path).replace(
        "generator = thresholds", "labels_csv = /nonexistent/file.csv"
    )
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, missing))


def test_run_passive_full_budget_matches_full_data_erm(tmp_path):
    cfg = load_config(write_config(tmp_path, BASE.format(seeds="0", holdout=0.0, out=tmp_path / "o")))
    paths = run(cfg)
    assert not paths["errors"]
    rows = read_results_csv(paths["results"])
    inst = make_thresholds(8, 5, 1.0, persistent=True, seed=5)
    gt = gap_table(inst.hypotheses, inst.labels)
    final = max(rows, key=lambda r: r.queries)
    truth = inst.labels.realized_labels()
    best_acc = float(np.mean(inst.hypotheses.labelings[gt.h_star] == truth))
    assert final.pool_acc == pytest.approx(best_acc, abs=1e-12)


def test_run_determinism_and_seed_order_independence(tmp_path):
    c1 = load_config(write_config(tmp_path, BASE.format(seeds="0,1,2", holdout=0.0, out=tmp_path / "a")))
    p1 = run(c1)
    body1 = [l for l in open(p1["results"]).read().splitlines() if not l.startswith("#")]
    curves1 = open(p1["curves"]).read()

    c2 = load_config(write_config(tmp_path, BASE.format(seeds="2,0,1", holdout=0.0, out=tmp_path / "b")))
    p2 = run(c2)
    body2 = [l for l in open(p2["results"]).read().splitlines() if not l.startswith("#")]
    assert body1 == body2
    assert curves1 == open(p2["curves"]).read()

    p3 = run(c1, out_dir=tmp_path / "c")
    body3 = [l for l in open(p3["results"]).read().splitlines() if not l.startswith("#")]
    assert body1 == body3


def test_run_replicates_average_in_curves(tmp_path):
    body = BASE.format(seeds="0", holdout=0.0, out=tmp_path / "o").replace(
        "seeds = 0", "replicates = 10\nseed0 = 0"
    )
    cfg = load_config(write_config(tmp_path, body))
    assert cfg.seeds == list(range(10))
    paths = run(cfg)
    curves = open(paths["curves"]).read().splitlines()
    assert curves[0] == "algorithm,queries,mean_acc,std_acc"
    assert len(curves) >= 2


def test_holdout_never_queried_and_scored(tmp_path):
    body = BASE.format(seeds="0,1", holdout=0.25, out=tmp_path / "o")
    cfg = load_config(write_config(tmp_path, body))
    paths = run(cfg)
    assert not paths["errors"]
    meta = json.load(open(paths["meta"]))
    hold = set(meta["holdout_indices"])
    assert len(hold) == 2  # round(0.25 * 8)
    rows = read_results_csv(paths["results"])
    assert any(r.holdout_acc is not None for r in rows)


def test_ingest_csv_paths(tmp_path):
    feats = tmp_path / "features.csv"
    labs = tmp_path / "labels.csv"
    feats.write_text("id,f0,f1\na,0.0,1.0\nb,1.0,0.0\nc,0.2,0.9\nd,0.9,0.1\n")
    labs.write_text("id,y\na,1\nb,0\nc,1\nd,0\n")
    inst = ingest_csv(str(feats), str(labs))
    assert inst.n == 4
    assert inst.labels.persistent
    assert not inst.hypotheses.explicit

    labs.write_text("id,y\na,2\nb,0\nc,1\nd,0\n")
    with pytest.raises(ConfigError) as exc:
        ingest_csv(str(feats), str(labs))
    assert ":2:" in str(exc.value)  # line number reported


def test_instance_export_import_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    from aced.core import HypothesisClass, Instance, LabelModel, Pool
    from aced.oracles import LinearOracleClass

    X = rng.normal(size=(5, 3))
    y = rng.integers(0, 2, size=5).astype(float)
    inst = Instance(Pool(n=5, features=X), HypothesisClass(oracle=LinearOracleClass(X)),
                    LabelModel(y, persistent=True, seed=0))
    paths = export_instance(inst, tmp_path / "inst")
    back = ingest_csv(paths["features"], paths["labels"])
    assert np.allclose(back.pool.features, X)
    assert np.array_equal(back.labels.realized_labels(), y.astype(np.int8))
    paths2 = export_instance(back, tmp_path / "inst2")
    assert open(paths["labels"]).read() == open(paths2["labels"]).read()
    assert open(paths["features"]).read() == open(paths2["features"]).read()


def test_emit_plotdata_fixtures():
    rows = [ResultRow("a", 0, 5, 0.7, None)]
    out = emit_plotdata(rows)
    assert out == [("a", 5, 0.7, 0.0)]

    # decreasing raw accuracy: running max flattens after the peak
    rows = [ResultRow("a", 0, 1, 0.9, None), ResultRow("a", 0, 2, 0.5, None),
            ResultRow("a", 0, 3, 0.6, None)]
    out = emit_plotdata(rows)
    assert [v for (_, _, v, _) in out] == [0.9, 0.9, 0.9]

    # hand-computed three-row fixture across two seeds
    rows = [ResultRow("a", 0, 1, 0.5, None), ResultRow("a", 1, 1, 0.7, None),
            ResultRow("a", 0, 2, 0.8, None), ResultRow("a", 1, 2, 0.6, None)]
    out = emit_plotdata(rows)
    assert out[0] == ("a", 1, pytest.approx(0.6), pytest.approx(0.1))
    assert out[1] == ("a", 2, pytest.approx(0.75), pytest.approx(0.05))


def test_stdin_label_model_prompts_once_per_index():
    answers = iter(["1", "0", "1"])
    model = StdinLabelModel(3, prompt=lambda msg: next(answers))
    assert model.query(0) == 1
    assert model.query(0) == 1  # cached, no new prompt
    assert model.query_many([1, 2]).tolist() == [0, 1]


def test_cli_end_to_end(tmp_path, capsys):
    cfg = write_config(tmp_path, BASE.format(seeds="0", holdout=0.0, out=tmp_path / "o"))
    assert cli.main(["run", str(cfg)]) == 0
    assert (tmp_path / "o" / "results.csv").exists()

    assert cli.main(["complexity", str(cfg), "--epsilon", "0.2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "complexity.csv").exists()

    assert cli.main(["instance", "core_tail", "--out", str(tmp_path / "i"),
                     "--param", "m=2"]) == 0
    assert (tmp_path / "i" / "labelings.csv").exists()

    assert cli.main(["plotdata", str(tmp_path / "o" / "results.csv"),
                     "--out", str(tmp_path / "c.csv")]) == 0
    assert (tmp_path / "c.csv").read_text().startswith("algorithm,queries")
    capsys.readouterr()


def test_output_dir_env_override(tmp_path, monkeypatch):
    cfg = load_config(write_config(tmp_path, BASE.format(seeds="0", holdout=0.0, out=tmp_path / "ignored")))
    target = tmp_path / "env_out"
    monkeypatch.setenv("ACED_OUT_DIR", str(target))
    paths = run(cfg)
    assert Path(paths["results"]).parent == target


def test_run_records_failures_and_continues(tmp_path):
    body = BASE.format(seeds="0", holdout=0.0, out=tmp_path / "o")
    body += "\n[algorithm aced_fixed_budget]\nT = 1\nepsilon = 0.1\n"  # too small: fails
    cfg = load_config(write_config(tmp_path, body))
    paths = run(cfg)
    assert len(paths["errors"]) == 1
    assert "budget" in paths["errors"][0]["error"]
    rows = read_results_csv(paths["results"])
    assert any(r.algorithm == "passive" for r in rows)  # the sweep survived


def test_run_worker_pool_matches_sequential(tmp_path):
    cfg = load_config(write_config(tmp_path, BASE.format(seeds="0,1", holdout=0.0,
                                                         out=tmp_path / "s")))
    p1 = run(cfg, out_dir=tmp_path / "s", workers=1)
    p2 = run(cfg, out_dir=tmp_path / "w", workers=2)

    def body(path):
        return [l for l in open(path).read().splitlines() if not l.startswith("#")]

    assert body(p1["results"]) == body(p2["results"])
    assert open(p1["records"]).read() == open(p2["records"]).read()
