"""Single-hidden-layer feedforward network trained by pseudoinversion.

The input projection (weights + biases) is drawn once from a seeded uniform
(-1, 1) generator and frozen; output weights are solved in one shot through
the spectral core, with the regularization parameter resolved by the chosen
strategy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import strategies as strat
from .errors import InputError, UnsupportedStrategyError
from .spectral import (
    ConditioningRecord,
    condition_numbers,
    factorize,
    pseudoinverse_apply,
    regularized_apply,
    unregularized_conditioning,
)

MODEL_FORMAT_VERSION = 1

ACTIVATIONS = ("sigmoid",)


@dataclass(frozen=True)
class ProjectionConfig:
    """Shape and seed of the frozen random input projection."""

    input_dim: int
    hidden_units: int
    activation: str = "sigmoid"
    seed: int = 0

    def __post_init__(self):
        if self.input_dim < 1 or self.hidden_units < 1:
            raise InputError("input_dim and hidden_units must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise InputError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class TrainedModel:
    projection: np.ndarray  # (L+1) x M, last row = biases
    activation: str
    output_weights: np.ndarray  # M x Q
    gamma_used: float | None  # None on the unregularized path
    conditioning: ConditioningRecord
    strategy_tag: str

    @property
    def input_dim(self) -> int:
        return self.projection.shape[0] - 1

    @property
    def hidden_units(self) -> int:
        return self.projection.shape[1]

    @property
    def output_dim(self) -> int:
        return self.output_weights.shape[1]


def init_projection(config: ProjectionConfig) -> np.ndarray:
    """(L+1) x M matrix of i.i.d. uniform(-1, 1) weights; last row is biases."""
    rng = np.random.default_rng(config.seed)
    return rng.uniform(-1.0, 1.0, size=(config.input_dim + 1, config.hidden_units))


def hidden_output(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Sigmoid of the augmented product: H = expit([X | 1] C)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != c.shape[0] - 1:
        raise InputError(
            f"features have shape {x.shape}, projection expects {c.shape[0] - 1} columns"
        )
    if not np.all(np.isfinite(x)):
        raise InputError("features contain non-finite entries")
    return expit(x @ c[:-1] + c[-1])


def train(
    x: np.ndarray,
    t: np.ndarray,
    config: ProjectionConfig,
    strategy: strat.GammaStrategy,
    task: str = "regression",
) -> TrainedModel:
    """Fit output weights for the given data and gamma strategy.

    The hidden matrix is factorized once; every strategy resolves its gamma
    from that single factorization. A resolved gamma of exactly zero (an
    exact-fit Kibria/Hoerl-Kennard degeneracy) falls back to the
    unregularized solve.
    """
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 1:
        t = t[:, None]
    if t.shape[0] != x.shape[0]:
        raise InputError(f"{x.shape[0]} samples but {t.shape[0]} targets")

    if isinstance(strategy, (strat.Gcv, strat.Kibria, strat.HoerlKennard)):
        if t.shape[1] != 1:
            raise UnsupportedStrategyError(
                f"strategy {strategy.tag!r} requires a single-output regression target"
            )

    c = init_projection(config)
    h = hidden_output(x, c)
    f = factorize(h)

    if isinstance(strategy, strat.Unregularized):
        threshold = (
            f.default_threshold() if strategy.threshold is None else strategy.threshold
        )
        w = pseudoinverse_apply(f, threshold, t)
        return TrainedModel(c, config.activation, w, None,
                            unregularized_conditioning(f, threshold), strategy.tag)

    if isinstance(strategy, strat.FixedValue):
        gamma = strategy.gamma
    elif isinstance(strategy, strat.Ocrep):
        gamma = strat.ocrep_gamma(f)
    elif isinstance(strategy, strat.CvGrid):
        gamma = strat.cv_grid_select(
            x, t, config, strategy.grid, folds=strategy.folds, task=task
        )
    elif isinstance(strategy, strat.Gcv):
        gamma = strat.gcv_select(f, t[:, 0], strategy.grid, raw_lambda=strategy.raw_lambda)
    elif isinstance(strategy, strat.Kibria):
        gamma = strat.kibria_gamma(strat.ridge_estimator_inputs(f, t[:, 0]))
    elif isinstance(strategy, strat.HoerlKennard):
        gamma = strat.hoerl_kennard_gamma(strat.ridge_estimator_inputs(f, t[:, 0]))
    else:
        raise InputError(f"unknown strategy {strategy!r}")

    if gamma == 0.0:
        # no regularization signal; solve by thresholded pseudoinversion
        threshold = f.default_threshold()
        w = pseudoinverse_apply(f, threshold, t)
        return TrainedModel(c, config.activation, w, 0.0,
                            unregularized_conditioning(f, threshold), strategy.tag)

    w = regularized_apply(f, gamma, t)
    return TrainedModel(c, config.activation, w, float(gamma),
                        condition_numbers(f, gamma), strategy.tag)


def predict(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    """Linear readout of the hidden layer: hidden_output(x, C) W."""
    return hidden_output(x, model.projection) @ model.output_weights


def decode_class(outputs: np.ndarray) -> np.ndarray:
    """Per-row argmax column index; ties go to the lowest index."""
    outputs = np.asarray(outputs)
    if outputs.ndim != 2 or outputs.shape[1] < 2:
        raise InputError("classification outputs need at least 2 columns")
    return np.argmax(outputs, axis=1)


def model_to_json(model: TrainedModel) -> str:
    """Versioned JSON document with row-major weight arrays."""
    rec = model.conditioning
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "activation": model.activation,
        "strategy": model.strategy_tag,
        "gamma_used": model.gamma_used,
        "projection_shape": list(model.projection.shape),
        "projection": model.projection.ravel().tolist(),
        "output_weights_shape": list(model.output_weights.shape),
        "output_weights": model.output_weights.ravel().tolist(),
        "conditioning": {
            "mu_unregularized": _json_float(rec.mu_unregularized),
            "mu_regularized": _json_float(rec.mu_regularized),
            "gamma_used": rec.gamma_used,
            "sigma_max_of_dmax": rec.sigma_max_of_dmax,
        },
    }
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str) -> TrainedModel:
    doc = json.loads(text)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise InputError(f"unsupported model format version {doc.get('format_version')}")
    cond = doc["conditioning"]
    record = ConditioningRecord(
        mu_unregularized=_from_json_float(cond["mu_unregularized"]),
        mu_regularized=_from_json_float(cond["mu_regularized"]),
        gamma_used=cond["gamma_used"],
        sigma_max_of_dmax=cond["sigma_max_of_dmax"],
    )
    return TrainedModel(
        projection=np.array(doc["projection"]).reshape(doc["projection_shape"]),
        activation=doc["activation"],
        output_weights=np.array(doc["output_weights"]).reshape(
            doc["output_weights_shape"]
        ),
        gamma_used=doc["gamma_used"],
        conditioning=record,
        strategy_tag=doc["strategy"],
    )


def _json_float(v):
    if v is None:
        return None
    return "inf" if np.isinf(v) else float(v)


def _from_json_float(v):
    if v is None:
        return None
    return float("inf") if v == "inf" else float(v)
