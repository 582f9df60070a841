"""Evaluation quantities: angles, subspace distances, ranks, leverage."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .numerics import as_symmetric
from .sparse_pca import best_sparse_quadratic

_UNIT_TOL = 1e-8


@dataclass(frozen=True)
class MetricRecord:
    """One named scalar with context tags (n, d, method, replication, ...)."""

    name: str
    value: float
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise InvalidInputError(f"metric {self.name!r} is not finite")


def _check_unit(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError(f"{name} must be a vector")
    if abs(float(np.linalg.norm(v)) - 1.0) > _UNIT_TOL:
        raise InvalidInputError(f"{name} must be unit norm")
    return v


def sin_angle(v1, v2) -> float:
    """Sine of the angle between two unit vectors; sign-flip invariant."""
    v1 = _check_unit(v1, "v1")
    v2 = _check_unit(v2, "v2")
    c = min(1.0, abs(float(v1 @ v2)))
    return float(np.sqrt(max(0.0, 1.0 - c * c)))


def subspace_distance(u1, u2) -> float:
    """Frobenius distance between the projectors onto two column spans.

    Both inputs are d x m with orthonormal columns; the result is
    invariant to right-rotation of either basis.
    """
    u1 = _check_orthonormal(u1, "u1")
    u2 = _check_orthonormal(u2, "u2")
    if u1.shape != u2.shape:
        raise InvalidInputError("bases must have the same shape")
    m = u1.shape[1]
    cross = u1.T @ u2
    val = 2.0 * m - 2.0 * float((cross * cross).sum())
    return float(np.sqrt(max(0.0, val)))


def _check_orthonormal(u, name: str) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.ndim != 2 or u.shape[0] < u.shape[1]:
        raise InvalidInputError(f"{name} must be a tall d x m basis")
    gram = u.T @ u
    if float(np.abs(gram - np.eye(u.shape[1])).max()) > _UNIT_TOL:
        raise InvalidInputError(f"{name} columns must be orthonormal")
    return u


def restricted_spectral_norm(m, s: int) -> float:
    """Max of |v' M v| over unit vectors with at most s nonzeros.

    Exact enumeration over supports (shared with the combinatoric sparse
    component), so it carries the same d <= 25 guard.  With s = d this is
    the spectral norm.
    """
    signed, _, _ = best_sparse_quadratic(m, s)
    return abs(signed)


def effective_rank(s) -> float:
    """trace / spectral norm; equals 1/lambda_1 for trace-one scatter."""
    s = as_symmetric(s)
    vals = np.linalg.eigvalsh(s)
    top = float(np.abs(vals).max())
    if top == 0.0:
        raise InvalidInputError("effective rank of the zero matrix is undefined")
    if vals.min() < -1e-10 * max(1.0, top):
        raise InvalidInputError("matrix must be positive semidefinite")
    return float(np.trace(s)) / top


def leverage_influence(pc1_scores, pc2_scores) -> np.ndarray:
    """Hat-matrix diagonals of the regression of PC1 on PC2 (with intercept).

    ``h_i = 1/n + (x_i - xbar)^2 / sum_j (x_j - xbar)^2`` where x are the
    PC2 scores; the diagonals always sum to 2 (intercept + slope).
    """
    y = np.asarray(pc1_scores, dtype=float)
    x = np.asarray(pc2_scores, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise InvalidInputError("score vectors must be 1-D with equal length")
    n = x.shape[0]
    if n < 2:
        raise InvalidInputError("need at least 2 observations")
    centered = x - x.mean()
    ssx = float(centered @ centered)
    if ssx == 0.0:
        raise InvalidInputError("PC2 scores are constant; leverage undefined")
    return 1.0 / n + centered**2 / ssx


def flag_leverage(h, threshold: float = 0.05) -> np.ndarray:
    """Indices of observations whose hat diagonal exceeds the threshold."""
    h = np.asarray(h, dtype=float)
    return np.nonzero(h > threshold)[0]
