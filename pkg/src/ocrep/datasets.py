"""CSV loading, target encoding, normalization, and the registry of the
eight UCI benchmark datasets.

Registered datasets use a canonical CSV layout: optional header row, feature
columns first, the target column last. Non-numeric feature columns are
one-hot encoded (categories in lexicographic order). ``scripts/make_datasets.py``
materializes the files that are obtainable offline.
"""

from __future__ import annotations

import csv
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

DATA_DIR_ENV = "OCREP_DATA_DIR"


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray  # N x L
    targets: np.ndarray  # N x Q (one-hot for classification)
    task: str  # "regression" | "classification"
    classes: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def labels(self) -> np.ndarray:
        """Integer class indices (classification only)."""
        if self.task != "classification":
            raise InputError(f"dataset {self.name!r} is not a classification task")
        return np.argmax(self.targets, axis=1)

    def subset(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.name, self.features[idx], self.targets[idx],
                       self.task, self.classes)


@dataclass(frozen=True)
class DatasetSpec:
    id: str
    filename: str
    task: str
    expected_instances: int
    expected_attributes: int
    expected_classes: int | None
    hidden_units: tuple[int, ...]  # the fixed-M list used by the benchmark
    delimiter: str = ","

    def path(self, data_dir: str | None = None) -> str:
        root = data_dir or os.environ.get(DATA_DIR_ENV, "data")
        return os.path.join(root, self.filename)


# The eight benchmark datasets with their published row/attribute counts and
# the fixed hidden-layer sizes used for them.
REGISTRY: dict[str, DatasetSpec] = {
    spec.id: spec
    for spec in [
        DatasetSpec("abalone", "abalone.csv", "regression", 4177, 8, None,
                    (50, 100, 200, 300)),
        DatasetSpec("machine_cpu", "machine_cpu.csv", "regression", 209, 6, None,
                    (50, 100)),
        DatasetSpec("delta_ailerons", "delta_ailerons.csv", "regression", 7129, 5,
                    None, (50, 100, 200, 300)),
        DatasetSpec("housing", "housing.csv", "regression", 506, 13, None,
                    (50, 100, 200, 300)),
        DatasetSpec("iris", "iris.csv", "classification", 150, 4, 3, (50, 100)),
        DatasetSpec("diabetes", "diabetes.csv", "classification", 768, 8, 2,
                    (50, 100, 200, 300)),
        DatasetSpec("wine", "wine.csv", "classification", 178, 13, 3, (50, 100)),
        DatasetSpec("segment", "segment.csv", "classification", 2310, 19, 7,
                    (1000, 1500)),
    ]
}


def load_csv(
    path: str,
    task: str,
    name: str | None = None,
    delimiter: str = ",",
    spec: DatasetSpec | None = None,
) -> Dataset:
    """Load a canonical CSV (features first, target last) into a Dataset."""
    if task not in ("regression", "classification"):
        raise InputError(f"unknown task {task!r}")
    if not os.path.exists(path):
        raise InputError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh, delimiter=delimiter) if row]
    if not rows:
        raise InputError(f"empty dataset file: {path}")
    if _looks_like_header(rows[0]):
        rows = rows[1:]
    if not rows:
        raise InputError(f"dataset file has a header but no rows: {path}")
    width = len(rows[0])
    if width < 2:
        raise InputError("need at least one feature column and one target column")
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InputError(f"row {i}: expected {width} fields, got {len(row)}")
        if any(cell.strip() in ("", "?", "NA") for cell in row):
            raise InputError(f"row {i}: missing value")

    raw_cols = list(zip(*rows))
    feature_blocks = []
    for col in raw_cols[:-1]:
        feature_blocks.append(_encode_feature_column([c.strip() for c in col]))
    features = np.column_stack(feature_blocks)

    target_col = [c.strip() for c in raw_cols[-1]]
    if task == "regression":
        targets = np.array([[_parse_float(c, "target")] for c in target_col])
        classes = None
    else:
        targets, classes = encode_targets(target_col, task)

    ds = Dataset(name or os.path.basename(path), features, targets, task, classes)
    if spec is not None:
        _validate_counts(ds, spec)
    return ds


def load_registered(dataset_id: str, data_dir: str | None = None) -> Dataset:
    spec = REGISTRY.get(dataset_id)
    if spec is None:
        raise InputError(
            f"unknown dataset id {dataset_id!r}; known: {sorted(REGISTRY)}"
        )
    return load_csv(spec.path(data_dir), spec.task, name=spec.id,
                    delimiter=spec.delimiter, spec=spec)


def encode_targets(labels, task: str):
    """One-hot encode class labels with deterministic lexicographic ordering."""
    if task == "regression":
        return np.asarray(labels, dtype=np.float64).reshape(-1, 1), None
    classes = tuple(sorted(set(labels)))
    index = {c: j for j, c in enumerate(classes)}
    onehot = np.zeros((len(labels), len(classes)))
    for i, lab in enumerate(labels):
        onehot[i, index[lab]] = 1.0
    return onehot, classes


def decode_labels(indices: np.ndarray, classes: tuple[str, ...]) -> list[str]:
    out = []
    for i in indices:
        if not 0 <= i < len(classes):
            raise InputError(f"class index {i} outside the trained label map")
        out.append(classes[i])
    return out


@dataclass(frozen=True)
class NormalizationPolicy:
    features: str = "minmax"  # "minmax" (to [-1, 1]) | "zscore" | "none"
    targets: str = "none"  # "none" | "minmax"


@dataclass(frozen=True)
class Normalizer:
    """Per-column affine maps fitted on the training split only."""

    policy: NormalizationPolicy
    feature_scale: np.ndarray = field(default=None)
    feature_offset: np.ndarray = field(default=None)
    target_scale: np.ndarray = field(default=None)
    target_offset: np.ndarray = field(default=None)

    def apply_features(self, x: np.ndarray) -> np.ndarray:
        if self.feature_scale is None:
            return x
        return (x - self.feature_offset) * self.feature_scale

    def apply_targets(self, t: np.ndarray) -> np.ndarray:
        if self.target_scale is None:
            return t
        return (t - self.target_offset) * self.target_scale

    def invert_targets(self, t: np.ndarray) -> np.ndarray:
        if self.target_scale is None:
            return t
        return t / self.target_scale + self.target_offset


def _affine_minmax(x: np.ndarray):
    lo, hi = x.min(axis=0), x.max(axis=0)
    span = hi - lo
    constant = span == 0
    scale = np.where(constant, 0.0, 2.0 / np.where(constant, 1.0, span))
    offset = (lo + hi) / 2.0  # constant columns map to 0
    return scale, offset


def _affine_zscore(x: np.ndarray):
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=1) if x.shape[0] > 1 else np.zeros(x.shape[1])
    constant = std == 0
    scale = np.where(constant, 0.0, 1.0 / np.where(constant, 1.0, std))
    return scale, mean


def fit_normalizer(
    train: Dataset, policy: NormalizationPolicy = NormalizationPolicy()
) -> Normalizer:
    """Fit column statistics on the training split; test rows are never clipped."""
    fs = fo = ts = to = None
    if policy.features == "minmax":
        fs, fo = _affine_minmax(train.features)
    elif policy.features == "zscore":
        fs, fo = _affine_zscore(train.features)
    elif policy.features != "none":
        raise InputError(f"unknown feature policy {policy.features!r}")
    if policy.targets == "minmax":
        if train.task != "regression":
            raise InputError("target normalization applies to regression only")
        ts, to = _affine_minmax(train.targets)
    elif policy.targets != "none":
        raise InputError(f"unknown target policy {policy.targets!r}")
    return Normalizer(policy, fs, fo, ts, to)


def normalized_pair(train: Dataset, test: Dataset, policy: NormalizationPolicy):
    """Normalize a train/test pair with statistics from the training split."""
    norm = fit_normalizer(train, policy)
    t_tr = Dataset(train.name, norm.apply_features(train.features),
                   norm.apply_targets(train.targets), train.task, train.classes)
    t_te = Dataset(test.name, norm.apply_features(test.features),
                   norm.apply_targets(test.targets), test.task, test.classes)
    return t_tr, t_te, norm


def _looks_like_header(row) -> bool:
    def numeric(cell):
        try:
            float(cell)
            return True
        except ValueError:
            return False

    return not any(numeric(c) for c in row)


def _encode_feature_column(col):
    try:
        return np.array([[float(c)] for c in col])
    except ValueError:
        categories = sorted(set(col))
        index = {c: j for j, c in enumerate(categories)}
        block = np.zeros((len(col), len(categories)))
        for i, c in enumerate(col):
            block[i, index[c]] = 1.0
        return block


def _parse_float(cell: str, what: str) -> float:
    try:
        return float(cell)
    except ValueError as exc:
        raise InputError(f"cannot parse {what} value {cell!r}") from exc


def _validate_counts(ds: Dataset, spec: DatasetSpec) -> None:
    # published counts are advisory; UCI file revisions exist
    if ds.n != spec.expected_instances:
        warnings.warn(
            f"{spec.id}: {ds.n} rows, expected {spec.expected_instances}",
            stacklevel=3,
        )
    if spec.expected_classes is not None and ds.classes is not None:
        if len(ds.classes) != spec.expected_classes:
            warnings.warn(
                f"{spec.id}: {len(ds.classes)} classes, expected "
                f"{spec.expected_classes}",
                stacklevel=3,
            )
