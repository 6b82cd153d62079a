#!/usr/bin/env python3
"""Materialize benchmark dataset CSVs into the data directory.

Writes the datasets that ship with scikit-learn (iris, wine) in the
canonical layout (header row, feature columns first, target column last).
The remaining registered datasets (abalone, machine_cpu, delta_ailerons,
housing, diabetes, segment) must be downloaded separately and converted to
the same layout; see README.md.
"""

import argparse
import csv
import os
import sys


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def make_iris(data_dir):
    from sklearn.datasets import load_iris

    bunch = load_iris()
    rows = [
        list(x) + [bunch.target_names[t]]
        for x, t in zip(bunch.data, bunch.target)
    ]
    header = [n.replace(" ", "_") for n in bunch.feature_names] + ["species"]
    write_csv(os.path.join(data_dir, "iris.csv"), header, rows)


def make_wine(data_dir):
    from sklearn.datasets import load_wine

    bunch = load_wine()
    rows = [
        list(x) + [bunch.target_names[t]]
        for x, t in zip(bunch.data, bunch.target)
    ]
    header = [n.replace(" ", "_") for n in bunch.feature_names] + ["cultivar"]
    write_csv(os.path.join(data_dir, "wine.csv"), header, rows)


MAKERS = {"iris": make_iris, "wine": make_wine}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data-dir",
                        default=os.environ.get("OCREP_DATA_DIR", "data"))
    parser.add_argument("--datasets", default="all",
                        help="comma-separated subset of: " + ",".join(MAKERS))
    args = parser.parse_args()
    os.makedirs(args.data_dir, exist_ok=True)
    names = sorted(MAKERS) if args.datasets == "all" else args.datasets.split(",")
    for name in names:
        if name not in MAKERS:
            print(f"error: no offline source for {name!r}", file=sys.stderr)
            return 2
        MAKERS[name](args.data_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
