"""Command-line front door.

Subcommands: train, predict, sweep-gamma, benchmark, condition-report,
print-schema. Exit codes: 0 success, 2 usage/input error, 3 numerical
failure. ``--errors-json`` emits machine-parseable errors on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import evaluation, network, strategies as strat
from .datasets import (
    DATA_DIR_ENV,
    NormalizationPolicy,
    REGISTRY,
    load_csv,
    load_registered,
)
from .errors import InputError, NumericalError, OcrepError

SCHEMAS = {
    "sweep-gamma": "kind,gamma,err_mean,err_std,mu_reg_mean  "
    "(kind: grid row, or the ocrep/cv marker rows; marker gamma is the "
    "mean selected value over repetitions)",
    "benchmark": "dataset,strategy,hidden_units,metric,err_mean,err_std,best_m  "
    "(best_m is empty for fixed-M runs)",
    "condition-report": "dataset,hidden_units,ratio_unreg,ratio_cv  "
    "(mean mu_reg over seeds divided by mean mu of the thresholded "
    "pseudoinverse / of the cv-regularized operator)",
    "predict": "row,output_0..output_{Q-1}[,label_index]  "
    "(label_index present when Q >= 2)",
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        return _fail(args, exc, 2)
    except NumericalError as exc:
        return _fail(args, exc, 3)
    except OcrepError as exc:
        return _fail(args, exc, 3)


def _fail(args, exc, code):
    if getattr(args, "errors_json", False):
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocrep",
        description="Pseudoinverse neural training with condition-number-"
        "optimal Tikhonov regularization",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_train = sub.add_parser("train", help="train one model and save it")
    _add_data_args(p_train)
    _add_strategy_args(p_train)
    p_train.add_argument("--hidden", type=int, required=True)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--model-out", default="model.json")
    p_train.set_defaults(func=cmd_train)

    p_pred = sub.add_parser("predict", help="apply a saved model to a CSV")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--input", required=True,
                        help="CSV of feature rows (no target column)")
    p_pred.add_argument("--out", default="-")
    p_pred.add_argument("--errors-json", action="store_true")
    p_pred.set_defaults(func=cmd_predict)

    p_sweep = sub.add_parser("sweep-gamma",
                             help="test error vs gamma over a grid, with "
                             "ocrep/cv marker rows")
    _add_data_args(p_sweep)
    p_sweep.add_argument("--hidden", type=int, required=True)
    p_sweep.add_argument("--grid", default="default", help="preset name "
                         "(default, elm) or comma-separated gammas")
    p_sweep.add_argument("--reps", type=int, default=50)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--folds", type=int, default=3)
    p_sweep.add_argument("--out", default="-")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.set_defaults(func=cmd_sweep_gamma)

    p_bench = sub.add_parser("benchmark",
                             help="fixed-M tables over registered datasets")
    p_bench.add_argument("--datasets", default="all",
                         help="comma-separated registered ids, or 'all'")
    p_bench.add_argument("--strategies", default="ocrep,cv,unregularized")
    p_bench.add_argument("--hidden", default=None,
                         help="override M list (comma-separated)")
    p_bench.add_argument("--reps", type=int, default=50)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--grid", default="default")
    p_bench.add_argument("--folds", type=int, default=3)
    p_bench.add_argument("--max-minutes", type=float, default=None,
                         help="wall-clock budget; remaining cells are skipped")
    p_bench.add_argument("--data-dir", default=None)
    p_bench.add_argument("--normalize-features", default="minmax",
                         choices=("minmax", "zscore", "none"))
    p_bench.add_argument("--normalize-targets", default="none",
                         choices=("none", "minmax"))
    p_bench.add_argument("--gcv-raw-lambda", action="store_true")
    p_bench.add_argument("--out", default="-")
    p_bench.add_argument("--format", choices=("csv", "json"), default="csv")
    p_bench.add_argument("--errors-json", action="store_true")
    p_bench.set_defaults(func=cmd_benchmark)

    p_cond = sub.add_parser("condition-report",
                            help="condition-number ratios at the largest "
                            "benchmarked M")
    p_cond.add_argument("--datasets", default="all")
    p_cond.add_argument("--reps", type=int, default=50)
    p_cond.add_argument("--seed", type=int, default=0)
    p_cond.add_argument("--grid", default="default")
    p_cond.add_argument("--folds", type=int, default=3)
    p_cond.add_argument("--max-minutes", type=float, default=None)
    p_cond.add_argument("--data-dir", default=None)
    p_cond.add_argument("--normalize-features", default="minmax",
                        choices=("minmax", "zscore", "none"))
    p_cond.add_argument("--normalize-targets", default="none",
                        choices=("none", "minmax"))
    p_cond.add_argument("--out", default="-")
    p_cond.add_argument("--format", choices=("csv", "json"), default="csv")
    p_cond.add_argument("--errors-json", action="store_true")
    p_cond.set_defaults(func=cmd_condition_report)

    p_schema = sub.add_parser("print-schema",
                              help="document the output CSV columns")
    p_schema.add_argument("--errors-json", action="store_true")
    p_schema.set_defaults(func=cmd_print_schema)

    return parser


def _add_data_args(p):
    p.add_argument("--data", required=True,
                   help="registered dataset id or path to a canonical CSV")
    p.add_argument("--task", choices=("regression", "classification"),
                   default=None, help="required for raw CSV paths")
    p.add_argument("--data-dir", default=None,
                   help=f"dataset root (default ${DATA_DIR_ENV} or ./data)")
    p.add_argument("--normalize-features", default="minmax",
                   choices=("minmax", "zscore", "none"))
    p.add_argument("--normalize-targets", default="none",
                   choices=("none", "minmax"))
    p.add_argument("--errors-json", action="store_true")


def _add_strategy_args(p):
    p.add_argument("--strategy", required=True,
                   help="one of: " + ", ".join(strat.STRATEGY_NAMES))
    p.add_argument("--gamma", type=float, default=None,
                   help="value for the fixed strategy")
    p.add_argument("--grid", default="default")
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--gcv-raw-lambda", action="store_true")


def _load_dataset(args):
    if args.data in REGISTRY:
        return load_registered(args.data, args.data_dir)
    if not os.path.exists(args.data):
        raise InputError(
            f"{args.data!r} is neither a registered dataset id nor a file"
        )
    if args.task is None:
        raise InputError("--task is required when --data is a CSV path")
    return load_csv(args.data, args.task)


def _parse_grid(text: str):
    if text in strat.GRID_PRESETS:
        return tuple(strat.GRID_PRESETS[text]())
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"cannot parse gamma grid {text!r}") from exc


def _parse_strategy(args):
    name = args.strategy
    grid = _parse_grid(args.grid)
    if name == "ocrep":
        return strat.Ocrep()
    if name == "fixed":
        if args.gamma is None:
            raise InputError("--gamma is required for the fixed strategy")
        return strat.FixedValue(args.gamma)
    if name == "cv":
        return strat.CvGrid(grid, folds=args.folds)
    if name == "gcv":
        return strat.Gcv(grid, raw_lambda=args.gcv_raw_lambda)
    if name == "kibria":
        return strat.Kibria()
    if name == "hoerl-kennard":
        return strat.HoerlKennard()
    if name == "unregularized":
        return strat.Unregularized()
    raise InputError(f"unknown strategy {name!r}; known: "
                     + ", ".join(strat.STRATEGY_NAMES))


def _policy(args) -> NormalizationPolicy:
    return NormalizationPolicy(features=args.normalize_features,
                               targets=args.normalize_targets)


def cmd_train(args) -> int:
    dataset = _load_dataset(args)
    strategy = _parse_strategy(args)
    train_ds, test_ds = evaluation.prepare_split(dataset, args.seed, _policy(args))
    config = network.ProjectionConfig(
        input_dim=train_ds.features.shape[1],
        hidden_units=args.hidden,
        seed=args.seed,
    )
    model = network.train(train_ds.features, train_ds.targets, config, strategy,
                          task=train_ds.task)
    with open(args.model_out, "w", encoding="utf-8") as fh:
        fh.write(network.model_to_json(model))
    train_err = evaluation.test_metric(model, train_ds)
    test_err = evaluation.test_metric(model, test_ds)
    cond = model.conditioning
    mu_reg = "-" if cond.mu_regularized is None else f"{cond.mu_regularized:.6g}"
    gamma = "-" if model.gamma_used is None else f"{model.gamma_used:.6g}"
    print(f"strategy={strategy.tag} gamma={gamma} "
          f"mu_unreg={cond.mu_unregularized:.6g} mu_reg={mu_reg} "
          f"train_err={train_err:.6g} test_err={test_err:.6g} "
          f"model={args.model_out}")
    return 0


def cmd_predict(args) -> int:
    with open(args.model, encoding="utf-8") as fh:
        model = network.model_from_json(fh.read())
    rows = _read_feature_csv(args.input, model.input_dim)
    out = network.predict(model, rows)
    header = ["row"] + [f"output_{q}" for q in range(out.shape[1])]
    decode = out.shape[1] >= 2
    if decode:
        header.append("label_index")
        labels = network.decode_class(out)
    table = []
    for i in range(out.shape[0]):
        row = [i] + [f"{v:.12g}" for v in out[i]]
        if decode:
            row.append(int(labels[i]))
        table.append(row)
    _write_table(args.out, header, table, "csv")
    return 0


def cmd_sweep_gamma(args) -> int:
    dataset = _load_dataset(args)
    grid = _parse_grid(args.grid)
    train_ds, test_ds = evaluation.prepare_split(dataset, args.seed, _policy(args))
    rows = evaluation.gamma_sweep(train_ds, test_ds, args.hidden, grid,
                                  repetitions=args.reps, base_seed=args.seed,
                                  folds=args.folds)
    header = ["kind", "gamma", "err_mean", "err_std", "mu_reg_mean"]
    table = [
        [r.kind, f"{r.gamma:.12g}", f"{r.err_mean:.12g}", f"{r.err_std:.12g}",
         f"{r.mu_reg_mean:.12g}"]
        for r in rows
    ]
    _write_table(args.out, header, table, args.format)
    return 0


def _benchmark_targets(args):
    if args.datasets == "all":
        ids = sorted(REGISTRY)
    else:
        ids = [d.strip() for d in args.datasets.split(",") if d.strip()]
        for d in ids:
            if d not in REGISTRY:
                raise InputError(f"unknown dataset id {d!r}")
    return ids


def cmd_benchmark(args) -> int:
    ids = _benchmark_targets(args)
    grid = _parse_grid(args.grid)
    strategies = []
    for name in args.strategies.split(","):
        ns = argparse.Namespace(strategy=name.strip(), gamma=None,
                                grid=args.grid, folds=args.folds,
                                gcv_raw_lambda=args.gcv_raw_lambda)
        strategies.append(_parse_strategy(ns))
    deadline = None
    if args.max_minutes is not None:
        deadline = time.monotonic() + args.max_minutes * 60.0
    policy = _policy(args)

    header = ["dataset", "strategy", "hidden_units", "metric",
              "err_mean", "err_std", "best_m"]
    table = []
    failures = []
    for ds_id in ids:
        spec = REGISTRY[ds_id]
        m_list = (tuple(int(v) for v in args.hidden.split(","))
                  if args.hidden else spec.hidden_units)
        try:
            dataset = load_registered(ds_id, args.data_dir)
        except OcrepError as exc:
            failures.append((ds_id, "-", str(exc)))
            continue
        train_ds, test_ds = evaluation.prepare_split(dataset, args.seed, policy)
        for m in m_list:
            for strategy in strategies:
                if deadline is not None and time.monotonic() > deadline:
                    failures.append((ds_id, strategy.tag,
                                     f"skipped at M={m}: --max-minutes budget"))
                    continue
                try:
                    cell = evaluation.run_cell(train_ds, test_ds, strategy, m,
                                               repetitions=args.reps,
                                               base_seed=args.seed)
                except OcrepError as exc:
                    failures.append((ds_id, strategy.tag, f"M={m}: {exc}"))
                    continue
                table.append([ds_id, strategy.tag, m, cell.metric_kind,
                              f"{cell.err_mean:.12g}", f"{cell.err_std:.12g}", ""])
    _write_table(args.out, header, table, args.format)
    for ds_id, tag, msg in failures:
        print(f"warning: {ds_id}/{tag}: {msg}", file=sys.stderr)
    return 0


def cmd_condition_report(args) -> int:
    ids = _benchmark_targets(args)
    grid = _parse_grid(args.grid)
    policy = _policy(args)
    deadline = None
    if args.max_minutes is not None:
        deadline = time.monotonic() + args.max_minutes * 60.0
    header = ["dataset", "hidden_units", "ratio_unreg", "ratio_cv"]
    table = []
    failures = []
    for ds_id in ids:
        spec = REGISTRY[ds_id]
        m = max(spec.hidden_units)
        if deadline is not None and time.monotonic() > deadline:
            failures.append((ds_id, "skipped: --max-minutes budget"))
            continue
        try:
            dataset = load_registered(ds_id, args.data_dir)
            train_ds, _ = evaluation.prepare_split(dataset, args.seed, policy)
            ratio_unreg, ratio_cv = evaluation.condition_ratio_report(
                train_ds, m, repetitions=args.reps, base_seed=args.seed,
                grid=grid, folds=args.folds)
        except OcrepError as exc:
            failures.append((ds_id, str(exc)))
            continue
        table.append([ds_id, m, f"{ratio_unreg:.12g}", f"{ratio_cv:.12g}"])
    _write_table(args.out, header, table, args.format)
    for ds_id, msg in failures:
        print(f"warning: {ds_id}: {msg}", file=sys.stderr)
    return 0


def cmd_print_schema(args) -> int:
    for name, schema in SCHEMAS.items():
        print(f"{name}: {schema}")
    return 0


def _read_feature_csv(path, input_dim):
    if not os.path.exists(path):
        raise InputError(f"input file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if rows and not _all_numeric(rows[0]):
        rows = rows[1:]
    data = []
    for i, row in enumerate(rows):
        if len(row) != input_dim:
            raise InputError(f"row {i}: expected {input_dim} features, got {len(row)}")
        try:
            data.append([float(c) for c in row])
        except ValueError as exc:
            raise InputError(f"row {i}: non-numeric feature") from exc
    if not data:
        raise InputError(f"no feature rows in {path}")
    return np.array(data)


def _all_numeric(row):
    try:
        [float(c) for c in row]
        return True
    except ValueError:
        return False


def _write_table(out, header, table, fmt):
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in table]
        text = json.dumps(payload, indent=2)
        if out == "-":
            print(text)
        else:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        return
    if out == "-":
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(table)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(table)


if __name__ == "__main__":
    sys.exit(main())
