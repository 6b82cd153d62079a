#!/usr/bin/env python3
"""Regenerate the benchmark, gamma-sweep, and condition-ratio tables.

Runs the CLI subcommands over every registered dataset whose CSV is present
under the data directory and writes one output file per table into --out-dir.
Datasets without a file are reported and skipped.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from ocrep.cli import main as cli_main  # noqa: E402
from ocrep.datasets import REGISTRY  # noqa: E402


def available(data_dir):
    out = []
    for spec in REGISTRY.values():
        if os.path.exists(spec.path(data_dir)):
            out.append(spec.id)
        else:
            print(f"skipping {spec.id}: no file at {spec.path(data_dir)}")
    return out


def run(argv):
    print("+ ocrep " + " ".join(argv))
    code = cli_main(argv)
    if code != 0:
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-dir", default=os.environ.get("OCREP_DATA_DIR", "data"))
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ids = available(args.data_dir)
    if not ids:
        sys.exit("no dataset files found; run scripts/make_datasets.py first")
    os.makedirs(args.out_dir, exist_ok=True)
    id_list = ",".join(ids)

    run(["benchmark", "--datasets", id_list,
         "--strategies", "ocrep,cv,gcv,kibria,hoerl-kennard,unregularized",
         "--reps", str(args.reps), "--seed", str(args.seed),
         "--data-dir", args.data_dir,
         "--out", os.path.join(args.out_dir, "benchmark.csv")])
    run(["condition-report", "--datasets", id_list,
         "--reps", str(args.reps), "--seed", str(args.seed),
         "--data-dir", args.data_dir,
         "--out", os.path.join(args.out_dir, "condition_ratios.csv")])
    for ds_id in ids:
        m = max(REGISTRY[ds_id].hidden_units)
        run(["sweep-gamma", "--data", ds_id, "--data-dir", args.data_dir,
             "--hidden", str(m), "--reps", str(args.reps),
             "--seed", str(args.seed),
             "--out", os.path.join(args.out_dir, f"gamma_sweep_{ds_id}.csv")])
    print(f"tables written to {args.out_dir}/")


if __name__ == "__main__":
    main()
