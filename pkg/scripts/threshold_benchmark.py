#!/usr/bin/env python3
"""Accuracy-vs-queries benchmark on a noiseless thresholds pool.

Runs the practical waterfilled algorithm against the passive and
uniform-disagreement baselines and a streaming importance-weighted
learner, then prints the aggregated running-max curves.

    python3 scripts/threshold_benchmark.py --n 32 --budget 24 --replicates 10
"""
import argparse
import tempfile
from pathlib import Path

from aced.bench import load_config, read_results_csv, emit_plotdata, run

CONFIG = """
[instance]
generator = thresholds
n = {n}
k_star = {k_star}
eps = 1.0
persistent = true
seed = 1

[run]
replicates = {replicates}
seed0 = 0
output_dir = {out}

[algorithm passive]
T = {budget}

[algorithm aced_waterfilled]
T = {budget}
epsilon = 0.125
N_batch = {batch}

[algorithm uniform_disagreement]
T = {budget}
delta = 0.1

[algorithm iwal]
C0 = 0.01
passes = 2
"""


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--budget", type=int, default=24)
    ap.add_argument("--replicates", type=int, default=10)
    ap.add_argument("--out", default=None)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="aced-bench-"))
    cfg_path = out / "config.ini"
    out.mkdir(parents=True, exist_ok=True)
    cfg_path.write_text(CONFIG.format(n=args.n, k_star=args.n // 2 + 1,
                                      replicates=args.replicates, out=out,
                                      budget=args.budget, batch=max(2, args.budget // 3)))
    paths = run(load_config(cfg_path), out_dir=out, workers=args.workers)
    if paths["errors"]:
        print("failures:", paths["errors"])
    rows = read_results_csv(paths["results"])
    print(f"results in {out}\n")
    print(f"{'algorithm':>24} {'queries':>8} {'mean acc':>9} {'std':>7}")
    for algo, q, mean, std in emit_plotdata(rows):
        print(f"{algo:>24} {q:>8d} {mean:>9.4f} {std:>7.4f}")


if __name__ == "__main__":
    main()
