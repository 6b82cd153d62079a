"""Pseudoinverse training of single-hidden-layer networks with
condition-number-optimal Tikhonov regularization."""

from .spectral import (
    ConditioningRecord,
    FilterSpectrum,
    SpectralFactorization,
    condition_numbers,
    d_value,
    factorize,
    filter_spectrum,
    pseudoinverse_apply,
    regularized_apply,
)
from .strategies import (
    CvGrid,
    FixedValue,
    GammaStrategy,
    Gcv,
    HoerlKennard,
    Kibria,
    Ocrep,
    Unregularized,
    default_gamma_grid,
    elm_gamma_grid,
    gcv_score,
    gcv_select,
    hoerl_kennard_gamma,
    kibria_gamma,
    ocrep_gamma,
    ridge_estimator_inputs,
)
from .network import (
    ProjectionConfig,
    TrainedModel,
    decode_class,
    hidden_output,
    init_projection,
    model_from_json,
    model_to_json,
    predict,
    train,
)
from .datasets import Dataset, DatasetSpec, NormalizationPolicy, REGISTRY, load_csv

__version__ = "0.1.0"
