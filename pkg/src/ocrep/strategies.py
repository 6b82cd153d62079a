"""Regularization-parameter selection rules.

Strategies are small frozen dataclasses consumed by ``network.train``:
condition-number-optimal selection (gamma = sigma_1 * sigma_p), a fixed
value, cross-validated grid search, generalized cross-validation, the
Kibria and Hoerl-Kennard ridge estimators, and the explicit unregularized
path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateMatrixError,
    DomainError,
    EstimatorError,
    InputError,
)
from .spectral import SpectralFactorization

# Any |alpha_hat| below this is treated as an exact zero and reported as an
# estimator singularity rather than silently clamped.
ALPHA_SINGULAR_FLOOR = 1e-30


def default_gamma_grid() -> np.ndarray:
    """Powers of ten from 1e-25 to 1e+25 (51 values)."""
    return 10.0 ** np.arange(-25, 26, dtype=np.float64)


def elm_gamma_grid() -> np.ndarray:
    """Powers of two from 2^-24 to 2^25 (50 values), the ELM-style grid."""
    return 2.0 ** np.arange(-24, 26, dtype=np.float64)


GRID_PRESETS = {"default": default_gamma_grid, "elm": elm_gamma_grid}


def _check_grid(grid) -> tuple[float, ...]:
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise InputError("gamma grid must be non-empty")
    if any(g <= 0 for g in grid):
        raise InputError("gamma grid values must be strictly positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError("gamma grid must be strictly increasing")
    return grid


def _sorted_grid(grid) -> tuple[float, ...]:
    # selector functions accept any order; sorting makes the smallest-gamma
    # tie rule independent of input order
    return _check_grid(sorted(set(float(g) for g in grid)))


@dataclass(frozen=True)
class Ocrep:
    """gamma = sigma_1 * sigma_p, the condition-number minimizer."""

    tag = "ocrep"


@dataclass(frozen=True)
class FixedValue:
    gamma: float
    tag = "fixed"

    def __post_init__(self):
        if self.gamma <= 0:
            raise DomainError(f"fixed gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class CvGrid:
    """k-fold cross-validated search over a gamma grid on the training set."""

    grid: tuple[float, ...] = field(default_factory=lambda: tuple(default_gamma_grid()))
    folds: int = 3
    tag = "cv"

    def __post_init__(self):
        object.__setattr__(self, "grid", _check_grid(self.grid))
        if self.folds < 2:
            raise InputError(f"folds must be >= 2, got {self.folds}")


@dataclass(frozen=True)
class Gcv:
    """Generalized cross-validation over a gamma grid (single-output only)."""

    grid: tuple[float, ...] = field(default_factory=lambda: tuple(default_gamma_grid()))
    raw_lambda: bool = False
    tag = "gcv"

    def __post_init__(self):
        object.__setattr__(self, "grid", _check_grid(self.grid))


@dataclass(frozen=True)
class Kibria:
    tag = "kibria"


@dataclass(frozen=True)
class HoerlKennard:
    tag = "hoerl-kennard"


@dataclass(frozen=True)
class Unregularized:
    """Plain pseudoinverse solve with small singular values zeroed."""

    threshold: float | None = None
    tag = "unregularized"


GammaStrategy = Ocrep | FixedValue | CvGrid | Gcv | Kibria | HoerlKennard | Unregularized

STRATEGY_NAMES = (
    "ocrep",
    "fixed",
    "cv",
    "gcv",
    "kibria",
    "hoerl-kennard",
    "unregularized",
)


@dataclass(frozen=True)
class RidgeEstimatorInputs:
    """OLS quantities feeding the Kibria and Hoerl-Kennard rules.

    alpha_hat are the canonical-coordinate OLS coefficients, sigma_hat_sq the
    residual variance estimate with n - p - 1 degrees of freedom.
    """

    alpha_hat: np.ndarray
    sigma_hat_sq: float
    n: int
    p: int


def ocrep_gamma(f: SpectralFactorization, threshold: float | None = None) -> float:
    """Product of the largest and the smallest above-threshold singular value."""
    if threshold is None:
        threshold = f.default_threshold() if f.singular_values[0] > 0 else 0.0
    s = f.singular_values[f.singular_values > threshold]
    if s.size == 0:
        raise DegenerateMatrixError("all singular values are zero (or below threshold)")
    return float(s[0] * s[-1])


def gcv_score(f: SpectralFactorization, y: np.ndarray, lam: float) -> float:
    """GCV score V(lambda) for the system H w ~ y, computed spectrally.

    The influence matrix H (H^T H + n*lambda I)^-1 H^T has eigenvalue
    a_i = sigma_i^2 / (sigma_i^2 + n*lambda) along u_i and zero on the
    complement of the column space, so both the residual norm and the trace
    reduce to sums over the spectrum.
    """
    if lam <= 0:
        raise DomainError(f"lambda must be strictly positive, got {lam}")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n = f.source_shape[0]
    if y.size != n:
        raise InputError(f"y has {y.size} entries, expected {n}")
    s2 = f.singular_values**2
    a = s2 / (s2 + n * lam)
    uty = f.left_vectors.T @ y
    ortho_sq = max(float(y @ y - uty @ uty), 0.0)
    resid_sq = float(np.sum(((1.0 - a) * uty) ** 2)) + ortho_sq
    trace = n - float(np.sum(a))
    return (resid_sq / n) / (trace / n) ** 2


def gcv_select(
    f: SpectralFactorization,
    y: np.ndarray,
    grid,
    raw_lambda: bool = False,
) -> float:
    """Grid gamma minimizing the GCV score; ties go to the smaller gamma.

    Grid values are gammas on the bare-penalty scale; they are bridged to the
    GCV lambda by lambda = gamma / n unless ``raw_lambda`` is set.
    """
    grid = _sorted_grid(grid)
    n = f.source_shape[0]
    scores = [
        gcv_score(f, y, g if raw_lambda else g / n) for g in grid
    ]
    return grid[int(np.argmin(scores))]


def ridge_estimator_inputs(
    f: SpectralFactorization, y: np.ndarray, threshold: float | None = None
) -> RidgeEstimatorInputs:
    """OLS estimates in canonical coordinates: alpha_hat_i = (u_i^T y)/sigma_i."""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    n, _ = f.source_shape
    p = f.p
    if y.size != n:
        raise InputError(f"y has {y.size} entries, expected {n}")
    if n <= p + 1:
        raise EstimatorError(f"need n > p + 1 (n={n}, p={p})")
    if threshold is None:
        threshold = f.default_threshold() if f.singular_values[0] > 0 else 0.0
    s = f.singular_values
    if s[-1] <= threshold:
        raise EstimatorError("matrix is numerically rank-deficient")
    uty = f.left_vectors.T @ y
    alpha_hat = uty / s
    sigma_hat_sq = float(y @ y - uty @ uty) / (n - p - 1)
    if sigma_hat_sq < 0:
        # round-off on an exact fit
        sigma_hat_sq = max(sigma_hat_sq, -1e-10 * float(y @ y))
        sigma_hat_sq = max(sigma_hat_sq, 0.0)
    return RidgeEstimatorInputs(alpha_hat=alpha_hat, sigma_hat_sq=sigma_hat_sq, n=n, p=p)


def kibria_gamma(inputs: RidgeEstimatorInputs) -> float:
    """Mean of sigma_hat^2 / alpha_hat_i^2 over the spectrum."""
    alpha = inputs.alpha_hat
    if np.any(np.abs(alpha) < ALPHA_SINGULAR_FLOOR):
        raise EstimatorError("an alpha_hat coefficient is numerically zero")
    return float(np.mean(inputs.sigma_hat_sq / alpha**2))


def hoerl_kennard_gamma(inputs: RidgeEstimatorInputs) -> float:
    """sigma_hat^2 over the square of the largest-magnitude alpha_hat."""
    amax = float(np.max(np.abs(inputs.alpha_hat)))
    if amax < ALPHA_SINGULAR_FLOOR:
        raise EstimatorError("all alpha_hat coefficients are numerically zero")
    return inputs.sigma_hat_sq / amax**2


def cv_grid_select(
    x: np.ndarray,
    t: np.ndarray,
    config,
    grid,
    folds: int = 3,
    task: str = "regression",
    seed: int | None = None,
) -> float:
    """Grid gamma with the best mean validation error over k folds.

    The random input projection is built once from ``config`` and held fixed
    across the whole grid; folds come from the seeded shuffle (``seed``
    defaults to the projection seed). Ties go to the smaller gamma.
    """
    from . import network
    from .evaluation import kfold, misclassification_rate, rmse

    grid = _sorted_grid(grid)
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 1:
        t = t[:, None]
    c = network.init_projection(config)
    labels = np.argmax(t, axis=1) if task == "classification" else None
    fold_seed = config.seed if seed is None else seed
    pairs = kfold(x.shape[0], k=folds, seed=fold_seed, labels=labels)

    errors = np.zeros(len(grid))
    for fit_idx, val_idx in pairs:
        h_fit = network.hidden_output(x[fit_idx], c)
        h_val = network.hidden_output(x[val_idx], c)
        from .spectral import factorize, regularized_apply

        f = factorize(h_fit)
        for j, gamma in enumerate(grid):
            w = regularized_apply(f, gamma, t[fit_idx])
            pred = h_val @ w
            if task == "classification":
                errors[j] += misclassification_rate(
                    np.argmax(pred, axis=1), labels[val_idx]
                )
            else:
                errors[j] += rmse(pred[:, 0], t[val_idx, 0])
    return grid[int(np.argmin(errors))]
