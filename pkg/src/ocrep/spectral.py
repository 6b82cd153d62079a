"""Thin SVD of real rectangular matrices and the spectrum-level constructions
built on it: pseudoinverse solves, Tikhonov-regularized solves, filter
factors, and condition numbers.

Only the p = min(N, M) leading singular triples are ever stored; solves go
through the factored form and never materialize a dense regularized inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatrixError, DomainError, InputError

# Relative gap below which the two extreme filter factors are reported as an
# exact tie (the gamma = sigma_1*sigma_p equality is measure-zero in floats).
END_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralFactorization:
    """Thin SVD H = U diag(s) V^T of an N x M matrix.

    left_vectors is N x p, right_vectors is M x p, singular_values is the
    length-p non-increasing spectrum, p = min(N, M).
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray
    source_shape: tuple[int, int]

    @property
    def p(self) -> int:
        return self.singular_values.size

    def default_threshold(self) -> float:
        """Zero threshold for rank decisions: max(N, M) * eps * sigma_1."""
        n, m = self.source_shape
        return max(n, m) * np.finfo(np.float64).eps * float(self.singular_values[0])


@dataclass(frozen=True)
class FilterSpectrum:
    """Filter factors D_i = sigma_i / (sigma_i^2 + gamma) over a spectrum.

    Indices are 0-based into the above-threshold part of the spectrum.
    ``ends_tied`` reports the first/last filter factors as numerically equal,
    which happens exactly at gamma = sigma_1 * sigma_p.
    """

    gamma: float
    d_values: np.ndarray
    argmax_index: int
    argmin_index: int
    ends_tied: bool


@dataclass(frozen=True)
class ConditioningRecord:
    """Condition numbers of the plain and regularized operators.

    mu_unregularized is sigma_1/sigma_p (inf when the matrix is numerically
    rank-deficient at the threshold); mu_regularized is D_max/D_min, or None
    on the explicitly unregularized path. sigma_max_of_dmax is the singular
    value attaining D_max.
    """

    mu_unregularized: float
    mu_regularized: float | None
    gamma_used: float | None
    sigma_max_of_dmax: float | None


def factorize(h: np.ndarray) -> SpectralFactorization:
    """Thin SVD of a real matrix, singular values in descending order."""
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] < 1 or h.shape[1] < 1:
        raise InputError(f"expected a 2-d matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise InputError("matrix contains non-finite entries")
    u, s, vt = np.linalg.svd(h, full_matrices=False)
    return SpectralFactorization(
        left_vectors=u,
        singular_values=s,
        right_vectors=vt.T,
        source_shape=(h.shape[0], h.shape[1]),
    )


def d_value(sigma: float, gamma: float) -> float:
    """Filter factor sigma / (sigma^2 + gamma); peaks at sigma = sqrt(gamma)."""
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if gamma < 0:
        raise DomainError(f"gamma must be non-negative, got {gamma}")
    return sigma / (sigma * sigma + gamma)


def pseudoinverse_apply(
    f: SpectralFactorization, threshold: float, t: np.ndarray
) -> np.ndarray:
    """Minimum-norm least-squares solve: V diag(1/sigma_i) U^T t.

    Singular values at or below ``threshold`` are zeroed out rather than
    inverted, the standard approximation for near-rank-deficient matrices.
    """
    t = _check_rhs(f, t)
    if threshold < 0:
        raise DomainError(f"threshold must be non-negative, got {threshold}")
    s = f.singular_values
    s_inv = np.where(s > threshold, np.divide(1.0, s, where=s > 0), 0.0)
    return f.right_vectors @ (s_inv[:, None] * (f.left_vectors.T @ t))


def regularized_apply(
    f: SpectralFactorization, gamma: float, t: np.ndarray
) -> np.ndarray:
    """Tikhonov-regularized solve: V diag(D_i) U^T t with D_i filter factors."""
    if gamma <= 0:
        raise DomainError(
            f"gamma must be strictly positive, got {gamma}; "
            "use pseudoinverse_apply for the unregularized path"
        )
    t = _check_rhs(f, t)
    s = f.singular_values
    d = s / (s * s + gamma)
    return f.right_vectors @ (d[:, None] * (f.left_vectors.T @ t))


def filter_spectrum(
    f: SpectralFactorization, gamma: float, threshold: float | None = None
) -> FilterSpectrum:
    """Filter factors over the above-threshold spectrum, with extreme indices.

    The minimum factor always sits at an end of the spectrum; the maximum
    can sit anywhere (the curve peaks at sigma = sqrt(gamma)).
    """
    if gamma <= 0:
        raise DomainError(f"gamma must be strictly positive, got {gamma}")
    if threshold is None:
        threshold = f.default_threshold() if f.singular_values[0] > 0 else 0.0
    s = f.singular_values[f.singular_values > threshold]
    if s.size == 0:
        raise DegenerateMatrixError("all singular values are zero (or below threshold)")
    d = s / (s * s + gamma)
    argmax = int(np.argmax(d))
    argmin = int(np.argmin(d))
    ends_tied = abs(d[0] - d[-1]) <= END_TIE_RTOL * max(d[0], d[-1])
    return FilterSpectrum(
        gamma=float(gamma),
        d_values=d,
        argmax_index=argmax,
        argmin_index=argmin,
        ends_tied=bool(ends_tied),
    )


def condition_numbers(
    f: SpectralFactorization, gamma: float, threshold: float | None = None
) -> ConditioningRecord:
    """mu(H) = sigma_1/sigma_p and mu(H_reg) = D_max/D_min at the given gamma."""
    if threshold is None:
        threshold = f.default_threshold() if f.singular_values[0] > 0 else 0.0
    spec = filter_spectrum(f, gamma, threshold)
    s_full = f.singular_values
    if s_full[-1] > threshold:
        mu_unreg = float(s_full[0] / s_full[-1])
    else:
        mu_unreg = float("inf")
    d = spec.d_values
    s_above = s_full[s_full > threshold]
    return ConditioningRecord(
        mu_unregularized=mu_unreg,
        mu_regularized=float(d[spec.argmax_index] / d[spec.argmin_index]),
        gamma_used=float(gamma),
        sigma_max_of_dmax=float(s_above[spec.argmax_index]),
    )


def unregularized_conditioning(
    f: SpectralFactorization, threshold: float | None = None
) -> ConditioningRecord:
    """Conditioning record for the explicitly unregularized path."""
    if threshold is None:
        threshold = f.default_threshold() if f.singular_values[0] > 0 else 0.0
    s = f.singular_values
    if s[0] <= threshold:
        raise DegenerateMatrixError("all singular values are zero (or below threshold)")
    mu_unreg = float(s[0] / s[-1]) if s[-1] > threshold else float("inf")
    return ConditioningRecord(
        mu_unregularized=mu_unreg,
        mu_regularized=None,
        gamma_used=None,
        sigma_max_of_dmax=None,
    )


def _check_rhs(f: SpectralFactorization, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 1:
        t = t[:, None]
    if t.ndim != 2 or t.shape[0] != f.source_shape[0]:
        raise InputError(
            f"right-hand side has shape {t.shape}, expected {f.source_shape[0]} rows"
        )
    return t
