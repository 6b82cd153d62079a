import numpy as np
import pytest

from ocrep import evaluation as ev
from ocrep.datasets import Dataset, NormalizationPolicy
from ocrep.errors import InputError
from ocrep.strategies import FixedValue, Ocrep, Unregularized


def toy_regression(n=30, l=2, seed=0, noise=0.05):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, size=(n, l))
    y = np.sin(2 * x[:, :1]) + x[:, 1:2] ** 2 + noise * rng.standard_normal((n, 1))
    return Dataset("toy", x, y, "regression")


def toy_classification(n_per_class=20, seed=0):
    rng = np.random.default_rng(seed)
    xs, labels = [], []
    for k, center in enumerate([(-1, -1), (1, 1), (-1, 1)]):
        xs.append(np.array(center) + 0.3 * rng.standard_normal((n_per_class, 2)))
        labels += [f"c{k}"] * n_per_class
    onehot = np.zeros((3 * n_per_class, 3))
    for i, lab in enumerate(labels):
        onehot[i, int(lab[1])] = 1.0
    return Dataset("blobs", np.vstack(xs), onehot, "classification",
                   ("c0", "c1", "c2"))


class TestSplit:
    def test_sizes(self):
        ds = toy_regression(n=10)
        train, test = ev.split_70_30(ds, seed=0)
        assert train.n == 7 and test.n == 3

    def test_deterministic(self):
        ds = toy_regression(n=25)
        a_train, a_test = ev.split_70_30(ds, seed=4)
        b_train, b_test = ev.split_70_30(ds, seed=4)
        assert np.array_equal(a_train.features, b_train.features)
        assert np.array_equal(a_test.features, b_test.features)

    def test_stratified_balanced_classes(self):
        ds = toy_classification(n_per_class=50)
        train, test = ev.split_70_30(ds, seed=0)
        for k in range(3):
            assert np.sum(train.labels == k) == 35
            assert np.sum(test.labels == k) == 15

    def test_too_small(self):
        with pytest.raises(InputError):
            ev.split_70_30(toy_regression(n=9), seed=0)

    def test_tiny_class_rejected(self):
        x = np.random.default_rng(0).uniform(-1, 1, (12, 2))
        t = np.zeros((12, 2))
        t[:11, 0] = 1.0
        t[11, 1] = 1.0
        ds = Dataset("odd", x, t, "classification", ("a", "b"))
        with pytest.raises(InputError):
            ev.split_70_30(ds, seed=0)


class TestKfold:
    def test_even_sizes(self):
        pairs = ev.kfold(9, k=3, seed=0)
        assert sorted(len(v) for _, v in pairs) == [3, 3, 3]

    def test_uneven_sizes(self):
        pairs = ev.kfold(10, k=3, seed=0)
        assert sorted(len(v) for _, v in pairs) == [3, 3, 4]

    def test_partition_property(self):
        pairs = ev.kfold(17, k=3, seed=5)
        vals = np.concatenate([v for _, v in pairs])
        assert sorted(vals) == list(range(17))
        for fit, val in pairs:
            assert set(fit).isdisjoint(val)
            assert sorted(np.concatenate([fit, val])) == list(range(17))

    def test_stratified_partition(self):
        labels = np.repeat([0, 1, 2], 12)
        pairs = ev.kfold(36, k=3, seed=1, labels=labels)
        vals = np.concatenate([v for _, v in pairs])
        assert sorted(vals) == list(range(36))
        for _, val in pairs:
            counts = np.bincount(labels[val], minlength=3)
            assert counts.max() - counts.min() <= 1

    def test_too_few_rows(self):
        with pytest.raises(InputError):
            ev.kfold(2, k=3)


class TestMetrics:
    def test_rmse_zero(self):
        assert ev.rmse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_rmse_arithmetic(self):
        assert ev.rmse([3.0, 4.0], [0.0, 0.0]) == pytest.approx(np.sqrt(25 / 2))

    def test_rmse_constant_offset(self):
        assert ev.rmse([1.5, 2.5, 3.5], [1.0, 2.0, 3.0]) == pytest.approx(0.5)

    def test_rmse_empty(self):
        with pytest.raises(InputError):
            ev.rmse([], [])

    def test_misclassification(self):
        assert ev.misclassification_rate([0, 1, 2], [0, 1, 2]) == 0.0
        assert ev.misclassification_rate([0, 1, 1, 1], [0, 1, 1, 0]) == 25.0
        assert ev.misclassification_rate([1, 1], [0, 0]) == 100.0


class TestRepeatExperiment:
    def test_mean_and_std(self):
        ds = toy_regression(n=40)
        train, test = ev.split_70_30(ds, seed=0)
        mean, std = ev.repeat_experiment(train, test, FixedValue(0.1), 10,
                                         repetitions=5, base_seed=0)
        assert std >= 0
        cell = ev.run_cell(train, test, FixedValue(0.1), 10,
                           repetitions=5, base_seed=0)
        assert mean == pytest.approx(np.mean(cell.errors))
        assert std == pytest.approx(np.std(cell.errors, ddof=1))

    def test_sample_std_of_two(self):
        # frozen arithmetic check: metrics {1, 3} -> mean 2, std sqrt(2)
        errs = np.array([1.0, 3.0])
        assert np.mean(errs) == 2.0
        assert np.std(errs, ddof=1) == pytest.approx(np.sqrt(2))

    def test_rerun_identical(self):
        ds = toy_regression(n=40)
        train, test = ev.split_70_30(ds, seed=0)
        a = ev.run_cell(train, test, Ocrep(), 12, repetitions=4, base_seed=7)
        b = ev.run_cell(train, test, Ocrep(), 12, repetitions=4, base_seed=7)
        assert np.array_equal(a.errors, b.errors)


class TestSignificance:
    def test_identical(self):
        assert ev.significance_test([1.0] * 50, [1.0] * 50) == "indistinguishable"

    def test_separated_constants(self):
        a = np.zeros(50) + np.linspace(0, 1e-9, 50)
        b = np.full(50, 10.0) + np.linspace(0, 1e-9, 50)
        assert ev.significance_test(a, b) == "a_better"
        assert ev.significance_test(b, a) == "b_better"

    def test_overlapping_normals(self):
        rng = np.random.default_rng(0)
        a = rng.normal(0.0, 5.0, size=50)
        b = rng.normal(0.1, 5.0, size=50)
        assert ev.significance_test(a, b) == "indistinguishable"

    def test_pooled_variant_runs(self):
        rng = np.random.default_rng(1)
        a = rng.normal(0.0, 1.0, size=50)
        b = rng.normal(3.0, 1.0, size=50)
        assert ev.significance_test(a, b, pooled=True) == "a_better"

    def test_small_sample_rejected(self):
        with pytest.raises(InputError):
            ev.significance_test([1.0], [1.0, 2.0])


class TestSweep:
    def test_single_point(self):
        ds = toy_regression(n=40)
        train, test = ev.split_70_30(ds, seed=0)
        res = ev.sweep_hidden_units(train, test, (Ocrep(),), (5, 5),
                                    repetitions=3, base_seed=0)
        assert len(res) == 1
        assert len(res[0].points) == 1
        assert res[0].best_m == 5

    def test_deterministic(self):
        ds = toy_regression(n=40)
        train, test = ev.split_70_30(ds, seed=0)
        a = ev.sweep_hidden_units(train, test, (Unregularized(),), (3, 6),
                                  repetitions=3, base_seed=0)
        b = ev.sweep_hidden_units(train, test, (Unregularized(),), (3, 6),
                                  repetitions=3, base_seed=0)
        assert a == b


class TestGammaSweep:
    def test_row_structure(self):
        ds = toy_regression(n=40)
        train, test = ev.split_70_30(ds, seed=0)
        grid = [1e-4, 1e-2, 1.0]
        rows = ev.gamma_sweep(train, test, 8, grid, repetitions=3, base_seed=0)
        assert len(rows) == len(grid) + 2
        kinds = [r.kind for r in rows]
        assert kinds == ["grid"] * 3 + ["ocrep", "cv"]
        assert [r.gamma for r in rows[:3]] == grid
        assert all(r.err_mean >= 0 and r.mu_reg_mean >= 1 for r in rows)

    def test_single_gamma_grid(self):
        ds = toy_regression(n=40)
        train, test = ev.split_70_30(ds, seed=0)
        rows = ev.gamma_sweep(train, test, 8, [0.5], repetitions=3, base_seed=0)
        assert len(rows) == 3


class TestConditionRatios:
    def test_strategy_against_itself_is_one(self):
        ds = toy_regression(n=40)
        train, _ = ev.split_70_30(ds, seed=0)
        ratio_unreg, ratio_cv = ev.condition_ratio_report(
            train, 10, repetitions=3, base_seed=0, grid=[1e-6, 1e-2, 1.0]
        )
        assert 0 < ratio_unreg <= 1.0 + 1e-12
        assert 0 < ratio_cv <= 1.0 + 1e-12

    def test_ocrep_never_beaten_on_mu(self):
        # the analytic gamma minimizes the regularized condition number, so
        # the cv-selected gamma can never produce a smaller mu
        ds = toy_regression(n=60, seed=3)
        train, _ = ev.split_70_30(ds, seed=0)
        _, ratio_cv = ev.condition_ratio_report(
            train, 20, repetitions=5, base_seed=0, grid=[1e-8, 1e-3, 1.0, 1e3]
        )
        assert ratio_cv <= 1.0 + 1e-12


class TestPrepareSplit:
    def test_normalized_ranges(self):
        ds = toy_regression(n=50)
        train, test = ev.prepare_split(ds, 0, NormalizationPolicy())
        assert train.features.min() >= -1.0 - 1e-12
        assert train.features.max() <= 1.0 + 1e-12
        # raw targets by default
        assert np.array_equal(
            np.sort(np.concatenate([train.targets, test.targets], axis=0), axis=0),
            np.sort(ds.targets, axis=0),
        )
