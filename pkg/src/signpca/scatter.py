"""Scatter estimators for elliptical data.

Three estimators are provided:

- ``sscm``: spatial-sign covariance matrix, the average outer product of
  the unit directions from a center to the observations.  Rows equal to
  the center contribute zero (the sign of the zero vector is zero), so
  the trace is then below one; that is intentional and documented rather
  than renormalized away.
- ``kendall_tau``: the pairwise-difference sign covariance over all
  unordered pairs of observations.  Needs no center but costs O(n^2 d^2).
- ``pearson``: the usual unbiased sample covariance about the mean.

Under ellipticity the first two share the eigenvectors of the covariance
matrix; ``population_sscm_eigen`` maps covariance eigenvalues to the
eigenvalues of the population sign covariance by Monte Carlo so the
sample estimators can be checked against their population target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .location import CenterEstimate, _as_data, fixed_center, mean_center

_CHUNK_DRAWS = 50_000


@dataclass(frozen=True)
class ScatterEstimate:
    """A d x d scatter matrix plus its provenance.

    ``kind`` is one of ``"sscm"``, ``"kendall"``, ``"pearson"``; ``center``
    is the location the estimator used (None for the pairwise Kendall tau,
    which needs no center).
    """

    matrix: np.ndarray
    kind: str
    center: CenterEstimate | None = None


def spatial_sign(v: np.ndarray) -> np.ndarray:
    """Row-wise unit directions; zero rows map to zero."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    norms = np.linalg.norm(v, axis=1)
    out = np.zeros_like(v)
    nz = norms > 0.0
    out[nz] = v[nz] / norms[nz, None]
    return out


def sscm(x, center) -> ScatterEstimate:
    """Spatial-sign covariance matrix about `center`.

    Parameters
    ----------
    x : (n, d) array_like
    center : CenterEstimate or (d,) array_like

    Returns
    -------
    ScatterEstimate
        PSD with trace equal to (number of rows distinct from the
        center) / n; trace 1 when no row coincides with the center.
    """
    x = _as_data(x)
    if not isinstance(center, CenterEstimate):
        center = fixed_center(center)
    mu = center.center
    if mu.shape[0] != x.shape[1]:
        raise InvalidInputError("center dimension does not match data")
    signs = spatial_sign(x - mu)
    m = signs.T @ signs / x.shape[0]
    return ScatterEstimate(matrix=(m + m.T) / 2.0, kind="sscm", center=center)


def kendall_tau(x) -> ScatterEstimate:
    """Pairwise-difference sign covariance over all unordered pairs.

    The accumulation runs one anchor row at a time against all later rows
    (vectorized per anchor, fixed order), which keeps memory at O(n d)
    and makes the result deterministic.  No subsampling is done.
    """
    x = _as_data(x)
    n, d = x.shape
    if n < 2:
        raise InvalidInputError("kendall_tau needs at least 2 observations")
    acc = np.zeros((d, d))
    for i in range(n - 1):
        signs = spatial_sign(x[i + 1 :] - x[i])
        acc += signs.T @ signs
    m = acc / (n * (n - 1) / 2)
    return ScatterEstimate(matrix=(m + m.T) / 2.0, kind="kendall", center=None)


def pearson(x) -> ScatterEstimate:
    """Unbiased sample covariance about the coordinate mean."""
    x = _as_data(x)
    if x.shape[0] < 2:
        raise InvalidInputError("pearson needs at least 2 observations")
    center = mean_center(x)
    m = np.cov(x, rowvar=False, ddof=1)
    m = np.atleast_2d(m)
    return ScatterEstimate(matrix=(m + m.T) / 2.0, kind="pearson", center=center)


@dataclass(frozen=True)
class PopulationEigenResult:
    """Monte-Carlo estimate of population sign-covariance eigenvalues."""

    values: np.ndarray
    std_errors: np.ndarray
    draws: int


def population_sscm_eigen(
    sigma_eigenvalues, mc_draws: int = 1_000_000, seed: int = 0
) -> PopulationEigenResult:
    """Eigenvalues of the population sign covariance from those of the scatter.

    For scatter eigenvalues (a_1, ..., a_q) the j-th sign-covariance
    eigenvalue is E[a_j Y_j^2 / sum_k a_k Y_k^2] with Y standard Gaussian.
    Each Monte-Carlo draw produces a ratio vector that sums to one, and it
    is normalized per draw, so the averaged estimates sum to one up to
    rounding.  Per-component standard errors of the mean are reported.
    """
    a = np.asarray(sigma_eigenvalues, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise InvalidInputError("sigma_eigenvalues must be a nonempty vector")
    if np.any(a < 0) or not np.any(a > 0):
        raise InvalidInputError("eigenvalues must be >= 0 with at least one > 0")
    if mc_draws < 1:
        raise InvalidInputError("mc_draws must be >= 1")

    q = a.size
    rng = np.random.default_rng(seed)
    total = np.zeros(q)
    total_sq = np.zeros(q)
    left = mc_draws
    while left > 0:
        b = min(_CHUNK_DRAWS, left)
        y2 = rng.standard_normal((b, q)) ** 2
        num = y2 * a
        ratios = num / num.sum(axis=1, keepdims=True)
        ratios /= ratios.sum(axis=1, keepdims=True)  # per-draw normalization
        total += ratios.sum(axis=0)
        total_sq += (ratios**2).sum(axis=0)
        left -= b

    mean = total / mc_draws
    var = np.maximum(total_sq / mc_draws - mean**2, 0.0)
    se = np.sqrt(var / mc_draws)
    return PopulationEigenResult(values=mean, std_errors=se, draws=mc_draws)
