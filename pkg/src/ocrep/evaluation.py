"""Experimental protocol: splits, folds, metrics, repetition statistics,
significance testing, hidden-unit sweeps, and condition-number ratio reports.

One 70/30 split is fixed per dataset and base seed; the repetitions vary only
the random input weights (seed = base_seed + r).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import network, strategies as strat
from .datasets import Dataset, NormalizationPolicy, normalized_pair
from .errors import InputError
from .spectral import condition_numbers, factorize, filter_spectrum
from .strategies import GammaStrategy, cv_grid_select, ocrep_gamma


@dataclass(frozen=True)
class ExperimentPlan:
    dataset_id: str
    strategies: tuple[GammaStrategy, ...]
    hidden_units: tuple[int, ...]
    repetitions: int = 50
    folds: int = 3
    base_seed: int = 0
    normalization: NormalizationPolicy = field(default_factory=NormalizationPolicy)

    def __post_init__(self):
        if self.repetitions < 2:
            raise InputError("repetitions must be >= 2")


@dataclass(frozen=True)
class CellResult:
    """Statistics of one (dataset, strategy, M) cell over the repetitions."""

    dataset: str
    strategy_tag: str
    hidden_units: int
    metric_kind: str  # "rmse" | "misclassification"
    errors: np.ndarray  # one test metric per repetition
    gammas: tuple

    @property
    def err_mean(self) -> float:
        return float(np.mean(self.errors))

    @property
    def err_std(self) -> float:
        return float(np.std(self.errors, ddof=1))


def split_70_30(dataset: Dataset, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then a 70/30 partition (stratified for classification)."""
    n = dataset.n
    if n < 10:
        raise InputError(f"need at least 10 rows to split, got {n}")
    rng = np.random.default_rng(seed)
    n_train = int(np.floor(0.7 * n))
    if dataset.task == "classification":
        train_idx = _stratified_train_indices(dataset.labels, n_train, rng)
    else:
        perm = rng.permutation(n)
        train_idx = perm[:n_train]
    mask = np.zeros(n, dtype=bool)
    mask[train_idx] = True
    return dataset.subset(np.flatnonzero(mask)), dataset.subset(np.flatnonzero(~mask))


def _stratified_train_indices(labels, n_train, rng):
    classes, counts = np.unique(labels, return_counts=True)
    if np.any(counts < 2):
        raise InputError("every class needs at least 2 instances to stratify")
    takes = np.floor(0.7 * counts).astype(int)
    # top up to the global 70% count by largest fractional parts
    frac = 0.7 * counts - takes
    for j in np.argsort(-frac):
        if takes.sum() >= n_train:
            break
        takes[j] += 1
    picked = []
    for cls, take in zip(classes, takes):
        members = rng.permutation(np.flatnonzero(labels == cls))
        picked.append(members[:take])
    return np.concatenate(picked)


def kfold(n: int, k: int = 3, seed: int = 0, labels=None):
    """Disjoint (fit, validate) index pairs covering range(n), sizes within 1.

    With ``labels`` given, folds are stratified by dealing each class's
    shuffled members out in turn.
    """
    if n < k:
        raise InputError(f"cannot make {k} folds from {n} rows")
    rng = np.random.default_rng(seed)
    if labels is None:
        folds = np.array_split(rng.permutation(n), k)
    else:
        labels = np.asarray(labels)
        buckets = [[] for _ in range(k)]
        cursor = 0
        for cls in np.unique(labels):
            for idx in rng.permutation(np.flatnonzero(labels == cls)):
                buckets[cursor % k].append(idx)
                cursor += 1
        folds = [np.array(sorted(b)) for b in buckets]
    pairs = []
    for i in range(k):
        val = folds[i]
        fit = np.concatenate([folds[j] for j in range(k) if j != i])
        pairs.append((fit, val))
    return pairs


def rmse(pred: np.ndarray, target: np.ndarray) -> float:
    pred = np.asarray(pred).reshape(-1)
    target = np.asarray(target).reshape(-1)
    if pred.size == 0:
        raise InputError("empty prediction vector")
    if pred.size != target.size:
        raise InputError("prediction/target length mismatch")
    return float(np.sqrt(np.mean((pred - target) ** 2)))


def misclassification_rate(pred_labels, true_labels) -> float:
    pred_labels = np.asarray(pred_labels).reshape(-1)
    true_labels = np.asarray(true_labels).reshape(-1)
    if pred_labels.size == 0:
        raise InputError("empty label vector")
    if pred_labels.size != true_labels.size:
        raise InputError("label length mismatch")
    return 100.0 * float(np.mean(pred_labels != true_labels))


def test_metric(model, test: Dataset) -> float:
    out = network.predict(model, test.features)
    if test.task == "classification":
        return misclassification_rate(network.decode_class(out), test.labels)
    return rmse(out[:, 0], test.targets[:, 0])


def run_cell(
    train: Dataset,
    test: Dataset,
    strategy: GammaStrategy,
    hidden_units: int,
    repetitions: int = 50,
    base_seed: int = 0,
) -> CellResult:
    """Train/evaluate over ``repetitions`` input-weight draws (seed base+r)."""
    errors = np.zeros(repetitions)
    gammas = []
    for r in range(repetitions):
        config = network.ProjectionConfig(
            input_dim=train.features.shape[1],
            hidden_units=hidden_units,
            seed=base_seed + r,
        )
        model = network.train(train.features, train.targets, config, strategy,
                              task=train.task)
        errors[r] = test_metric(model, test)
        gammas.append(model.gamma_used)
    metric = "misclassification" if train.task == "classification" else "rmse"
    return CellResult(train.name, strategy.tag, hidden_units, metric,
                      errors, tuple(gammas))


def repeat_experiment(
    train: Dataset,
    test: Dataset,
    strategy: GammaStrategy,
    hidden_units: int,
    repetitions: int = 50,
    base_seed: int = 0,
) -> tuple[float, float]:
    """Mean and sample standard deviation (n-1 divisor) of the test metric."""
    cell = run_cell(train, test, strategy, hidden_units, repetitions, base_seed)
    return cell.err_mean, cell.err_std


def significance_test(
    sample_a, sample_b, confidence: float = 0.99, pooled: bool = False
) -> str:
    """Two-sample t-test on the mean difference; lower metric means better.

    Welch (unequal variances) by default; ``pooled`` switches to the classic
    pooled-variance test. Returns "a_better", "b_better", or
    "indistinguishable".
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise InputError("both samples need at least 2 values")
    if np.var(a) == 0 and np.var(b) == 0:
        if a.mean() == b.mean():
            return "indistinguishable"
        return "a_better" if a.mean() < b.mean() else "b_better"
    result = stats.ttest_ind(a, b, equal_var=pooled)
    if result.pvalue >= 1.0 - confidence:
        return "indistinguishable"
    return "a_better" if a.mean() < b.mean() else "b_better"


@dataclass(frozen=True)
class SweepPoint:
    hidden_units: int
    cv_error: float
    err_mean: float
    err_std: float


@dataclass(frozen=True)
class SweepResult:
    strategy_tag: str
    points: tuple[SweepPoint, ...]

    @property
    def best_m(self) -> int:
        """Hidden-unit count with the lowest cross-validation error."""
        cv = [p.cv_error for p in self.points]
        return self.points[int(np.argmin(cv))].hidden_units


def sweep_hidden_units(
    train: Dataset,
    test: Dataset,
    strategies: tuple[GammaStrategy, ...],
    m_range: tuple[int, int],
    repetitions: int = 10,
    folds: int = 3,
    base_seed: int = 0,
    step: int = 1,
) -> list[SweepResult]:
    """Mean test error per hidden-unit count per strategy, plus the
    cross-validation error used to pick the best M."""
    m_lo, m_hi = m_range
    if m_lo < 1 or m_hi < m_lo:
        raise InputError(f"invalid hidden-unit range {m_range}")
    labels = train.labels if train.task == "classification" else None
    results = []
    for strategy in strategies:
        points = []
        for m in range(m_lo, m_hi + 1, step):
            cell = run_cell(train, test, strategy, m, repetitions, base_seed)
            cv_err = _cv_error(train, strategy, m, folds, base_seed, labels)
            points.append(SweepPoint(m, cv_err, cell.err_mean, cell.err_std))
        results.append(SweepResult(strategy.tag, tuple(points)))
    return results


def _cv_error(train, strategy, m, folds, seed, labels):
    pairs = kfold(train.n, k=folds, seed=seed, labels=labels)
    config = network.ProjectionConfig(
        input_dim=train.features.shape[1], hidden_units=m, seed=seed
    )
    total = 0.0
    for fit_idx, val_idx in pairs:
        fit, val = train.subset(fit_idx), train.subset(val_idx)
        model = network.train(fit.features, fit.targets, config, strategy,
                              task=train.task)
        total += test_metric(model, val)
    return total / folds


def condition_ratio_report(
    train: Dataset,
    hidden_units: int,
    repetitions: int = 50,
    base_seed: int = 0,
    grid=None,
    folds: int = 3,
) -> tuple[float, float]:
    """Ratios of average condition numbers at the largest benchmarked M.

    Returns mean mu(H_reg at optimal gamma) / mean mu(H_pinv) and
    mean mu(H_reg at optimal gamma) / mean mu(H_reg at cv-selected gamma).
    mu(H_pinv) uses the smallest singular value kept by the default
    pseudoinverse threshold, matching the conditioning of the thresholded
    pseudoinverse actually computed.
    """
    if grid is None:
        grid = strat.default_gamma_grid()
    mu_opt = np.zeros(repetitions)
    mu_pinv = np.zeros(repetitions)
    mu_cv = np.zeros(repetitions)
    for r in range(repetitions):
        config = network.ProjectionConfig(
            input_dim=train.features.shape[1],
            hidden_units=hidden_units,
            seed=base_seed + r,
        )
        c = network.init_projection(config)
        f = factorize(network.hidden_output(train.features, c))
        threshold = f.default_threshold()
        kept = f.singular_values[f.singular_values > threshold]
        mu_pinv[r] = kept[0] / kept[-1]
        mu_opt[r] = condition_numbers(f, ocrep_gamma(f)).mu_regularized
        gamma_cv = cv_grid_select(
            train.features, train.targets, config, grid,
            folds=folds, task=train.task,
        )
        spec = filter_spectrum(f, gamma_cv)
        mu_cv[r] = spec.d_values[spec.argmax_index] / spec.d_values[spec.argmin_index]
    return (
        float(mu_opt.mean() / mu_pinv.mean()),
        float(mu_opt.mean() / mu_cv.mean()),
    )


@dataclass(frozen=True)
class GammaSweepRow:
    kind: str  # "grid" | "ocrep" | "cv"
    gamma: float  # mean over repetitions for the marker rows
    err_mean: float
    err_std: float
    mu_reg_mean: float


def gamma_sweep(
    train: Dataset,
    test: Dataset,
    hidden_units: int,
    grid=None,
    repetitions: int = 50,
    base_seed: int = 0,
    folds: int = 3,
) -> list[GammaSweepRow]:
    """Test error versus gamma over a grid, with marker rows for the
    analytically selected and the cross-validation-selected gamma.

    Each repetition factorizes its hidden matrix once and reuses it for every
    gamma, so the sweep costs one SVD per repetition.
    """
    if grid is None:
        grid = strat.default_gamma_grid()
    grid = np.asarray(list(grid), dtype=np.float64)
    n_grid = grid.size
    errs = np.zeros((n_grid + 2, repetitions))
    mus = np.zeros((n_grid + 2, repetitions))
    gammas_marker = np.zeros((2, repetitions))
    for r in range(repetitions):
        config = network.ProjectionConfig(
            input_dim=train.features.shape[1],
            hidden_units=hidden_units,
            seed=base_seed + r,
        )
        c = network.init_projection(config)
        f = factorize(network.hidden_output(train.features, c))
        h_test = network.hidden_output(test.features, c)
        utt = f.left_vectors.T @ train.targets
        gamma_opt = ocrep_gamma(f)
        gamma_cv = cv_grid_select(
            train.features, train.targets, config, grid,
            folds=folds, task=train.task,
        )
        gammas_marker[0, r] = gamma_opt
        gammas_marker[1, r] = gamma_cv
        for j, gamma in enumerate(np.concatenate([grid, [gamma_opt, gamma_cv]])):
            s = f.singular_values
            d = s / (s * s + gamma)
            w = f.right_vectors @ (d[:, None] * utt)
            out = h_test @ w
            if train.task == "classification":
                errs[j, r] = misclassification_rate(
                    network.decode_class(out), test.labels
                )
            else:
                errs[j, r] = rmse(out[:, 0], test.targets[:, 0])
            spec = filter_spectrum(f, gamma)
            mus[j, r] = (
                spec.d_values[spec.argmax_index] / spec.d_values[spec.argmin_index]
            )
    rows = [
        GammaSweepRow("grid", float(grid[j]), float(errs[j].mean()),
                      float(errs[j].std(ddof=1)), float(mus[j].mean()))
        for j in range(n_grid)
    ]
    for offset, kind in ((0, "ocrep"), (1, "cv")):
        j = n_grid + offset
        rows.append(GammaSweepRow(kind, float(gammas_marker[offset].mean()),
                                  float(errs[j].mean()), float(errs[j].std(ddof=1)),
                                  float(mus[j].mean())))
    return rows


def prepare_split(
    dataset: Dataset, base_seed: int, normalization: NormalizationPolicy
) -> tuple[Dataset, Dataset]:
    """The fixed per-dataset split: 70/30 at the base seed, then normalize."""
    train, test = split_70_30(dataset, base_seed)
    train, test, _ = normalized_pair(train, test, normalization)
    return train, test
