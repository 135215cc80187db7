"""Config-driven benchmark harness.

Parses flat INI-style experiment configs, builds instances from the
generators or from CSV pools, schedules (algorithm, seed) runs, scores
accuracy-vs-queries curves with the plug-in ERM after every query batch,
and writes deterministic CSV outputs (results.csv, curves.csv) plus a
JSON-lines run log. Wall times live in meta.json so the CSV bodies stay
byte-identical across replays.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algorithms import REGISTRY, RunRecord
from .complexity import (
    complexity_report,
    make_core_tail_instance,
    make_thresholds,
    make_tsybakov,
)
from .core import HypothesisClass, Instance, LabelModel, Pool
from .estimators import naive_estimate
from .oracles import LinearOracleClass, weighted_max

GENERATORS = {
    "core_tail": lambda **kw: make_core_tail_instance(**kw),
    "thresholds": lambda **kw: make_thresholds(**kw),
    "tsybakov": lambda **kw: make_tsybakov(**kw)[0],
}


class ConfigError(ValueError):
    pass


@dataclass(eq=False)
class ExperimentConfig:
    instance: dict
    algorithms: list  # (label, registry name, params)
    seeds: list
    holdout_fraction: float = 0.0
    output_dir: str = "results"
    holdout_seed: int = 0

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("need at least one seed (replicates >= 1)")
        if not 0.0 <= self.holdout_fraction <= 0.5:
            raise ConfigError("holdout fraction must be in [0, 0.5]")
        for key in ("features_csv", "labels_csv"):
            path = self.instance.get(key)
            if path and not Path(path).exists():
                raise ConfigError(f"referenced file does not exist: {path}")


@dataclass(frozen=True)
class ResultRow:
    algorithm: str
    seed: int
    queries: int
    pool_acc: float
    holdout_acc: float | None
    wall_time: float = 0.0


def _coerce(value: str):
    v = value.strip()
    low = v.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    if "," in v:
        return [_coerce(p) for p in v.split(",") if p.strip()]
    return v


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # option keys are case-sensitive (T vs t)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config {path}")
    if "instance" not in parser:
        raise ConfigError("config needs an [instance] section")
    instance = {k: _coerce(v) for k, v in parser["instance"].items()}
    run = {k: _coerce(v) for k, v in parser["run"].items()} if "run" in parser else {}
    seeds = run.get("seeds")
    if seeds is None:
        reps = int(run.get("replicates", 1))
        if reps < 1:
            raise ConfigError("replicates must be >= 1")
        seed0 = int(run.get("seed0", 0))
        seeds = list(range(seed0, seed0 + reps))
    elif isinstance(seeds, (int, float)):
        seeds = [int(seeds)]
    else:
        seeds = [int(s) for s in seeds]
    algorithms = []
    for section in parser.sections():
        if not section.startswith("algorithm"):
            continue
        label = section[len("algorithm"):].strip()
        if not label:
            raise ConfigError("algorithm sections look like [algorithm <name>]")
        name = label.split(":")[0].strip()
        if name not in REGISTRY:
            raise ConfigError(f"unknown algorithm {name!r}")
        params = {k: _coerce(v) for k, v in parser[section].items()}
        algorithms.append((label, name, params))
    if not algorithms:
        raise ConfigError("config declares no algorithms")
    return ExperimentConfig(
        instance=instance,
        algorithms=algorithms,
        seeds=seeds,
        holdout_fraction=float(run.get("holdout_fraction", 0.0)),
        output_dir=str(run.get("output_dir", "results")),
        holdout_seed=int(run.get("holdout_seed", 0)),
    )


def build_instance(spec: dict) -> Instance:
    spec = dict(spec)
    if "features_csv" in spec or "labels_csv" in spec:
        return ingest_csv(spec.get("features_csv"), spec["labels_csv"])
    gen = spec.pop("generator", None)
    if gen not in GENERATORS:
        raise ConfigError(f"unknown instance generator {gen!r}")
    return GENERATORS[gen](**spec)


def _parse_header(row, path):
    return [c.strip() for c in row]


def ingest_csv(features_path, labels_path) -> Instance:
    """Pool CSV (feature columns f0..f{p-1}, optional id) + labels CSV
    (id,eta for means or id,y for persistent realizations) to an instance
    with an oracle-backed linear hypothesis class."""
    labels_rows = []
    with open(labels_path, newline="") as fh:
        reader = csv.reader(fh)
        header = _parse_header(next(reader), labels_path)
        if header[:1] != ["id"] or len(header) != 2 or header[1] not in ("eta", "y"):
            raise ConfigError(f"{labels_path}: header must be id,eta or id,y")
        kind = header[1]
        for ln, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise ConfigError(f"{labels_path}:{ln}: expected 2 columns")
            try:
                val = float(row[1])
            except ValueError as exc:
                raise ConfigError(f"{labels_path}:{ln}: bad label {row[1]!r}") from exc
            if kind == "y" and val not in (0.0, 1.0):
                raise ConfigError(f"{labels_path}:{ln}: y must be 0 or 1")
            if not 0.0 <= val <= 1.0:
                raise ConfigError(f"{labels_path}:{ln}: eta must be in [0,1]")
            labels_rows.append((row[0].strip(), val))
    ids = tuple(r[0] for r in labels_rows)
    eta = np.array([r[1] for r in labels_rows])

    features = None
    if features_path:
        with open(features_path, newline="") as fh:
            reader = csv.reader(fh)
            header = _parse_header(next(reader), features_path)
            has_id = header and header[0] == "id"
            fcols = header[1:] if has_id else header
            if fcols != [f"f{j}" for j in range(len(fcols))]:
                raise ConfigError(f"{features_path}: feature columns must be f0..f{{p-1}}")
            rows = []
            for ln, row in enumerate(reader, start=2):
                if len(row) != len(header):
                    raise ConfigError(f"{features_path}:{ln}: expected {len(header)} columns")
                try:
                    rows.append([float(x) for x in (row[1:] if has_id else row)])
                except ValueError as exc:
                    raise ConfigError(f"{features_path}:{ln}: bad value") from exc
        features = np.array(rows)
        if features.shape[0] != eta.size:
            raise ConfigError("features and labels row counts differ")
    pool = Pool(n=eta.size, features=features, ids=ids)
    persistent = kind == "y"
    labels = LabelModel(eta, persistent=persistent, seed=0)
    if features is not None:
        hclass = HypothesisClass(oracle=LinearOracleClass(features))
    else:
        raise ConfigError("CSV ingestion needs a features file for the linear class")
    return Instance(pool=pool, hypotheses=hclass, labels=labels)


def export_instance(instance: Instance, outdir) -> dict:
    """Write labels/features/labelings CSVs; inverse of the loaders."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    labels = instance.labels
    kind = "y" if labels.persistent else "eta"
    vec = labels.realized_labels() if labels.persistent else labels.eta
    p = outdir / "labels.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", kind])
        for i, v in zip(instance.pool.ids, vec):
            w.writerow([i, f"{float(v):.10g}"])
    paths["labels"] = str(p)
    if instance.pool.features is not None:
        p = outdir / "features.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["id"] + [f"f{j}" for j in range(instance.pool.features.shape[1])])
            for i, row in zip(instance.pool.ids, instance.pool.features):
                w.writerow([i] + [f"{float(x):.10g}" for x in row])
        paths["features"] = str(p)
    if instance.hypotheses.explicit:
        p = outdir / "labelings.csv"
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{j}" for j in range(instance.n)])
            for row in instance.hypotheses.labelings:
                w.writerow([int(v) for v in row])
        paths["labelings"] = str(p)
    return paths


def _accuracy(labeling, truth) -> float:
    labeling = np.asarray(labeling)
    return float(np.mean(labeling == truth))


def _truth_vector(labels: LabelModel):
    # persistent realizations are the ground truth; otherwise score the
    # expected accuracy against the means
    if getattr(labels, "interactive", False):
        return None
    if labels.persistent:
        return labels.realized_labels()
    return None


def _expected_accuracy(labeling, eta) -> float:
    labeling = np.asarray(labeling, dtype=float)
    return float(np.mean(eta * labeling + (1.0 - eta) * (1.0 - labeling)))


def _score(labeling, labels: LabelModel, idx=None) -> float:
    truth = _truth_vector(labels)
    if idx is None:
        idx = slice(None)
    if truth is not None:
        return _accuracy(np.asarray(labeling)[idx], truth[idx])
    return _expected_accuracy(np.asarray(labeling)[idx], labels.eta[idx])


def _erm_labeling(hclass: HypothesisClass, log, n: int):
    est = naive_estimate(log, n)
    if hclass.explicit:
        from .estimators import estimated_errors_all

        idx = int(np.argmin(estimated_errors_all(hclass, est)))
        return hclass.labelings[idx], idx
    handle, _ = weighted_max(hclass, 2.0 * est.values - 1.0)
    return hclass.labeling(handle), handle


def _restrict_instance(instance: Instance, train_idx: np.ndarray) -> Instance:
    pool = instance.pool
    feats = pool.features[train_idx] if pool.features is not None else None
    sub_pool = Pool(n=train_idx.size, features=feats,
                    ids=tuple(pool.ids[i] for i in train_idx))
    labels = instance.labels
    if labels.persistent:
        sub_labels = LabelModel(labels.realized_labels()[train_idx].astype(float),
                                persistent=True, seed=labels.seed)
    else:
        sub_labels = LabelModel(labels.eta[train_idx], persistent=False, seed=labels.seed + 1)
    if instance.hypotheses.explicit:
        # keep row indices aligned with the full class: no dedup
        sub_class = HypothesisClass(instance.hypotheses.labelings[:, train_idx], dedup=False)
    else:
        sub_class = HypothesisClass(oracle=LinearOracleClass(feats))
    return Instance(pool=sub_pool, hypotheses=sub_class, labels=sub_labels)


def _run_one(instance: Instance, name: str, params: dict, seed: int):
    params = dict(params)
    solver = {k[len("solver_"):]: params.pop(k) for k in list(params) if k.startswith("solver_")}
    if solver:
        params["solver"] = solver
    if name == "iwal":
        passes = int(params.pop("passes", 1))
        params.pop("solver", None)
        rng = np.random.default_rng([seed, 17])
        stream = np.concatenate([rng.permutation(instance.n) for _ in range(passes)])
        return REGISTRY[name](instance, stream, seed=seed, **params)
    if name in ("passive", "uniform_disagreement"):
        params.pop("solver", None)
    return REGISTRY[name](instance, seed=seed, **params)


def _pool_task(args):
    """Worker entry: rebuilds the (restricted) instance from the picklable
    spec so every worker owns its own RNG state."""
    spec, holdout_fraction, holdout_seed, label, name, params, seed = args
    full = build_instance(spec)
    n = full.n
    rng = np.random.default_rng([holdout_seed, 0x401])
    n_hold = int(round(holdout_fraction * n))
    perm = rng.permutation(n)
    train_idx = np.sort(perm[n_hold:])
    inst = _restrict_instance(full, train_idx) if n_hold else full
    t0 = time.perf_counter()
    try:
        rec = _run_one(inst, name, params, seed)
        return label, seed, rec.to_jsonl(), time.perf_counter() - t0, None
    except Exception as exc:  # pragma: no cover - transported to the parent
        return label, seed, None, time.perf_counter() - t0, repr(exc)


def _curve_points(instance: Instance, rec: RunRecord, full_instance=None,
                  train_idx=None, holdout_idx=None):
    """ERM accuracy after each query batch (batch = one round of the log)."""
    n = instance.n
    points = []
    by_round = {}
    for q in rec.queries:
        by_round.setdefault(q.round, []).append(q)
    prefix = []
    uniq = set()
    full_class = full_instance.hypotheses if full_instance is not None else None
    for rnd in sorted(by_round):
        prefix.extend(by_round[rnd])
        uniq.update(q.index for q in by_round[rnd])
        labeling, handle = _erm_labeling(instance.hypotheses, prefix, n)
        pool_acc = _score(labeling, instance.labels)
        hold_acc = None
        if holdout_idx is not None and holdout_idx.size:
            if full_class is not None and full_class.explicit and isinstance(handle, (int, np.integer)):
                full_lab = full_class.labelings[int(handle)]
            elif full_instance is not None and not full_class.explicit:
                full_lab = full_class.labeling(handle)
            else:
                full_lab = None
            if full_lab is not None:
                hold_acc = _score(full_lab, full_instance.labels, holdout_idx)
        points.append((len(uniq), pool_acc, hold_acc))
    if not points:
        labeling, _ = _erm_labeling(instance.hypotheses, [], n)
        points.append((0, _score(labeling, instance.labels), None))
    return points


def run(config: ExperimentConfig, out_dir=None, workers: int = 1) -> dict:
    """Execute every (algorithm, seed) pair and write results files.

    Failures are recorded per row and do not stop the remaining runs.
    With workers > 1 the pairs run on a process pool; outputs are sorted
    before the single writer emits them, so results are identical to the
    sequential schedule. Query logs never touch holdout indices
    (asserted here). Returns the output paths.
    """
    out = Path(os.environ.get("ACED_OUT_DIR", out_dir or config.output_dir))
    out.mkdir(parents=True, exist_ok=True)
    full_instance = build_instance(config.instance)
    n = full_instance.n
    rng = np.random.default_rng([config.holdout_seed, 0x401])
    n_hold = int(round(config.holdout_fraction * n))
    perm = rng.permutation(n)
    holdout_idx = np.sort(perm[:n_hold])
    train_idx = np.sort(perm[n_hold:])
    if n_hold:
        instance = _restrict_instance(full_instance, train_idx)
    else:
        instance = full_instance

    tasks = [(label, name, params, seed)
             for label, name, params in config.algorithms for seed in config.seeds]
    outcomes = []
    if workers > 1:
        import concurrent.futures

        args = [(config.instance, config.holdout_fraction, config.holdout_seed,
                 label, name, params, seed) for label, name, params, seed in tasks]
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for label, seed, payload, wall, err in pool.map(_pool_task, args):
                rec = RunRecord.from_jsonl(payload) if payload is not None else None
                outcomes.append((label, seed, rec, wall, err))
    else:
        for label, name, params, seed in tasks:
            t0 = time.perf_counter()
            try:
                rec = _run_one(instance, name, params, seed)
                err = None
            except Exception as exc:  # keep the sweep alive, record the failure
                rec, err = None, repr(exc)
            outcomes.append((label, seed, rec, time.perf_counter() - t0, err))

    rows = []
    records = []
    errors = []
    timings = {}
    for label, seed, rec, wall, err in outcomes:
        if err is not None:
            errors.append({"algorithm": label, "seed": seed, "error": err})
            continue
        timings[f"{label}/{seed}"] = wall
        if n_hold:
            qset = {q.index for q in rec.queries}
            mapped = {int(train_idx[i]) for i in qset}
            assert not (mapped & set(holdout_idx.tolist())), "holdout index was queried"
        for queries, pool_acc, hold_acc in _curve_points(
            instance, rec, full_instance if n_hold else None, train_idx, holdout_idx
        ):
            rows.append(ResultRow(algorithm=label, seed=seed, queries=queries,
                                  pool_acc=pool_acc, holdout_acc=hold_acc,
                                  wall_time=wall))
        records.append((label, seed, rec))

    rows.sort(key=lambda r: (r.algorithm, r.seed, r.queries))
    results_path = out / "results.csv"
    with open(results_path, "w", newline="") as fh:
        fh.write(f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S')}\n")
        w = csv.writer(fh)
        w.writerow(["algorithm", "seed", "queries", "pool_acc", "holdout_acc"])
        for r in rows:
            w.writerow([r.algorithm, r.seed, r.queries, f"{r.pool_acc:.10g}",
                        "" if r.holdout_acc is None else f"{r.holdout_acc:.10g}"])
    curves_path = out / "curves.csv"
    write_curves(emit_plotdata(rows), curves_path)
    log_path = out / "runrecords.jsonl"
    with open(log_path, "w") as fh:
        for label, seed, rec in sorted(records, key=lambda x: (x[0], x[1])):
            fh.write(rec.to_jsonl() + "\n")
    meta_path = out / "meta.json"
    with open(meta_path, "w") as fh:
        json.dump({"timings": timings, "errors": errors,
                   "holdout_indices": [int(i) for i in holdout_idx]}, fh, indent=2, sort_keys=True)
    return {"results": str(results_path), "curves": str(curves_path),
            "records": str(log_path), "meta": str(meta_path), "errors": errors}


def emit_plotdata(rows) -> list:
    """Aggregate running-max accuracy curves: per-seed running max first,
    then mean/std across seeds at each query count."""
    by_algo = {}
    for r in rows:
        by_algo.setdefault(r.algorithm, {}).setdefault(r.seed, []).append((r.queries, r.pool_acc))
    out = []
    for algo in sorted(by_algo):
        seeds = by_algo[algo]
        grid = sorted({q for pts in seeds.values() for q, _ in pts})
        per_seed = {}
        for seed, pts in seeds.items():
            pts = sorted(pts)
            vals = []
            best = -math.inf
            j = 0
            for q in grid:
                while j < len(pts) and pts[j][0] <= q:
                    best = max(best, pts[j][1])
                    j += 1
                vals.append(best if best > -math.inf else math.nan)
            per_seed[seed] = vals
        arr = np.array([per_seed[s] for s in sorted(per_seed)])
        for col, q in enumerate(grid):
            column = arr[:, col]
            ok = ~np.isnan(column)
            if not ok.any():
                continue
            out.append((algo, q, float(column[ok].mean()), float(column[ok].std())))
    return out


def write_curves(curve_rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "queries", "mean_acc", "std_acc"])
        for algo, q, mean, std in curve_rows:
            w.writerow([algo, q, f"{mean:.10g}", f"{std:.10g}"])


def read_results_csv(path) -> list:
    rows = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(io.StringIO("".join(lines)))
    for d in reader:
        rows.append(ResultRow(
            algorithm=d["algorithm"], seed=int(d["seed"]), queries=int(d["queries"]),
            pool_acc=float(d["pool_acc"]),
            holdout_acc=float(d["holdout_acc"]) if d.get("holdout_acc") else None,
        ))
    return rows


class StdinLabelModel(LabelModel):
    """Human-in-the-loop label source: prompts on first query of an index.

    Answers are cached, so repeat queries behave persistently. Accuracy
    columns are not meaningful in this mode (there is no ground truth).
    """

    interactive = True

    def __init__(self, n: int, ids=None, prompt=input):
        super().__init__(np.full(n, 0.5), persistent=False, seed=0)
        self.persistent = True
        self._ids = ids or tuple(str(i) for i in range(n))
        self._prompt = prompt
        self._cache = {}

    def query(self, i: int) -> int:
        if i not in self._cache:
            while True:
                raw = self._prompt(f"label for example {self._ids[i]} (0/1): ").strip()
                if raw in ("0", "1"):
                    self._cache[i] = int(raw)
                    break
        return self._cache[i]

    def query_many(self, indices):
        return np.array([self.query(int(i)) for i in indices], dtype=np.int8)
