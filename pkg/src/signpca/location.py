"""Multivariate center estimation.

The workhorse is the spatial median, the minimizer of the summed
Euclidean distances to the observations.  It is computed with a modified
Weiszfeld iteration that applies the Vardi-Zhang correction whenever the
iterate lands on a data point, so the solver cannot stall there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NotConvergedError

# Distance below which an iterate is treated as coinciding with a data
# point and the corrected step is used.
_COINCIDE_EPS = 1e-12


@dataclass(frozen=True)
class CenterEstimate:
    """A location estimate plus how it was obtained.

    Attributes
    ----------
    center : (d,) ndarray
    method : str
        One of ``"spatial_median"``, ``"mean"``, ``"fixed"``.
    iterations : int
        Number of position updates performed (0 for closed-form methods).
    residual : float
        First-order optimality gap at exit: the norm of the summed unit
        directions toward the data, less the weight of any coinciding
        point.  Zero means exact stationarity.
    """

    center: np.ndarray
    method: str
    iterations: int = 0
    residual: float = 0.0


def mean_center(x) -> CenterEstimate:
    """Coordinate-wise mean as a ``CenterEstimate``."""
    x = _as_data(x)
    return CenterEstimate(center=x.mean(axis=0), method="mean")


def fixed_center(mu) -> CenterEstimate:
    """Wrap a known center (e.g. the true model location)."""
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1:
        raise InvalidInputError("center must be a 1-D vector")
    return CenterEstimate(center=mu, method="fixed")


def distance_objective(x, mu) -> float:
    """Sum of Euclidean distances from the rows of `x` to `mu`."""
    x = _as_data(x)
    return float(np.linalg.norm(x - np.asarray(mu, dtype=float), axis=1).sum())


def spatial_median(x, tol: float = 1e-8, max_iter: int = 500) -> CenterEstimate:
    """Spatial median of the rows of `x`.

    Exact duplicate rows are merged into weighted points first, then the
    weighted Weiszfeld map is iterated from the coordinate-wise median.
    When the iterate coincides with a data point the Vardi-Zhang corrected
    step is taken instead, and the optimality test accounts for the
    coinciding weight.

    Parameters
    ----------
    x : (n, d) array_like
    tol : float
        Exit when the first-order residual is at most ``tol * n``.
    max_iter : int

    Raises
    ------
    NotConvergedError
        Iteration budget exhausted; the best iterate is attached.
    """
    x = _as_data(x)
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    n = x.shape[0]

    points, weights = np.unique(x, axis=0, return_counts=True)
    weights = weights.astype(float)
    y = np.median(x, axis=0)

    iterations = 0
    residual = np.inf
    for _ in range(max_iter + 1):
        diff = points - y
        dist = np.linalg.norm(diff, axis=1)
        coincide = dist < _COINCIDE_EPS
        active = ~coincide
        eta = float(weights[coincide].sum())

        if not np.any(active):
            residual = 0.0
            break

        inv = weights[active] / dist[active]
        # Negative gradient over the non-coinciding points.
        r_vec = (inv[:, None] * diff[active]).sum(axis=0)
        r_norm = float(np.linalg.norm(r_vec))
        residual = max(r_norm - eta, 0.0)
        if residual <= tol * n:
            break
        if iterations >= max_iter:
            raise NotConvergedError(
                f"spatial median: no convergence in {max_iter} iterations "
                f"(residual {residual:.3e})",
                result=CenterEstimate(y, "spatial_median", iterations, residual),
            )

        t_step = (inv[:, None] * points[active]).sum(axis=0) / inv.sum()
        if eta > 0.0:
            # Vardi-Zhang: shrink the Weiszfeld step toward the coinciding
            # point in proportion to its weight.
            gamma = min(1.0, eta / r_norm)
            y = (1.0 - gamma) * t_step + gamma * y
        else:
            y = t_step
        iterations += 1

    return CenterEstimate(
        center=y, method="spatial_median", iterations=iterations, residual=residual
    )


def _as_data(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise InvalidInputError(f"expected an (n, d) data matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("data matrix has non-finite entries")
    return x
