"""Sparse initializer via an l1-penalized Fantope program.

The Fantope is the convex set ``{M : 0 <= M <= I, tr M = 1}``; the
program maximizes ``<S, M> - lam * sum |M_jk|`` over it.  It is solved
with alternating-direction splitting: one block is the Euclidean
projection onto the Fantope (eigendecomposition plus a monotone clip of
the eigenvalues with a trace-restoring shift found by bisection), the
other is entrywise soft-thresholding.  The leading eigenvector of the
solution, hard-thresholded at ``phi`` and renormalized, makes a sparse
start vector for the truncated power iteration.

Choosing the knobs: theory suggests ``lam`` on the order of
``lambda_1(S) * sqrt(log d / n)`` and ``phi`` on the order of
``s * log d / sqrt(n)`` with constants left to the user; both stay
caller-supplied here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySupportError, InvalidInputError, NotConvergedError
from .numerics import as_symmetric, canonical_sign, sym_eigen

_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class FantopeConfig:
    lam: float = 0.0
    phi: float = 0.0
    admm_rho: float = 1.0
    tol: float = 1e-6
    max_iter: int = 2000

    def __post_init__(self):
        if self.lam < 0 or self.phi < 0:
            raise InvalidInputError("lam and phi must be >= 0")
        if self.admm_rho <= 0 or self.tol <= 0 or self.max_iter < 1:
            raise InvalidInputError("admm_rho, tol, max_iter must be positive")


@dataclass(frozen=True)
class FantopeSolution:
    """Feasible solution of the penalized Fantope program.

    ``y`` is the projected (hence exactly feasible) iterate at exit.
    ``objective_trace`` records ``<S, Y_t> - lam * ||Y_t||_1`` per
    iteration as a diagnostic; alternating-direction iterations are not
    strictly monotone in it.
    """

    y: np.ndarray
    primal_residual: float
    dual_residual: float
    iterations: int
    objective_trace: np.ndarray = field(repr=False, default=None)


def fantope_project(m) -> np.ndarray:
    """Euclidean projection of a symmetric matrix onto the Fantope."""
    m = as_symmetric(m)
    vals, vecs = np.linalg.eigh(m)
    clipped = _shift_and_clip(vals)
    return (vecs * clipped) @ vecs.T


def _shift_and_clip(vals: np.ndarray) -> np.ndarray:
    """Find c with sum(clip(vals + c, 0, 1)) = 1 by bisection."""
    lo = -float(vals.max())          # everything clips to 0
    hi = 1.0 - float(vals.min())     # everything clips to 1

    def total(c):
        return float(np.clip(vals + c, 0.0, 1.0).sum())

    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if total(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    out = np.clip(vals + c, 0.0, 1.0)
    # absorb the last bisection gap into the largest entries
    gap = 1.0 - out.sum()
    if gap != 0.0:
        i = int(np.argmax(vals))
        out[i] = min(1.0, max(0.0, out[i] + gap))
    return out


def soft_threshold(m: np.ndarray, cut: float) -> np.ndarray:
    return np.sign(m) * np.maximum(np.abs(m) - cut, 0.0)


def penalized_objective(s: np.ndarray, m: np.ndarray, lam: float) -> float:
    return float((s * m).sum() - lam * np.abs(m).sum())


def fantope_solve(s_hat, cfg: FantopeConfig) -> FantopeSolution:
    """Solve the l1-penalized Fantope program.

    Returns the projected iterate, which satisfies the Fantope
    constraints exactly up to eigendecomposition rounding.  Raises
    ``NotConvergedError`` (solution attached) if the primal and dual
    residuals do not both reach ``cfg.tol`` within ``cfg.max_iter``.
    """
    s = as_symmetric(s_hat)
    d = s.shape[0]
    rho = cfg.admm_rho
    y = np.zeros((d, d))
    z = np.zeros((d, d))
    u = np.zeros((d, d))
    trace = []
    primal = dual = np.inf

    for it in range(1, cfg.max_iter + 1):
        y = fantope_project(z - u + s / rho)
        z_new = soft_threshold(y + u, cfg.lam / rho)
        dual = rho * float(np.linalg.norm(z_new - z, "fro"))
        z = z_new
        u = u + y - z
        primal = float(np.linalg.norm(y - z, "fro"))
        trace.append(penalized_objective(s, y, cfg.lam))
        if primal <= cfg.tol and dual <= cfg.tol:
            return FantopeSolution(y, primal, dual, it, np.asarray(trace))

    raise NotConvergedError(
        f"fantope solver: residuals ({primal:.2e}, {dual:.2e}) after "
        f"{cfg.max_iter} iterations",
        result=FantopeSolution(y, primal, dual, cfg.max_iter, np.asarray(trace)),
    )


def fantope_initializer(s_hat, cfg: FantopeConfig) -> np.ndarray:
    """Sparse unit start vector from the Fantope solution.

    Takes the leading eigenvector of the solution, keeps the entries with
    magnitude at least ``cfg.phi``, and renormalizes.  Raises
    ``EmptySupportError`` when the threshold removes everything; callers
    then lower ``phi`` or fall back to the plain leading eigenvector.
    """
    try:
        sol = fantope_solve(s_hat, cfg)
    except NotConvergedError as err:
        sol = err.result
    lead = sym_eigen(sol.y)[0].vector
    keep = np.abs(lead) >= cfg.phi
    if not np.any(keep):
        raise EmptySupportError(
            f"threshold phi={cfg.phi} removed every coordinate of the initializer"
        )
    w = np.where(keep, lead, 0.0)
    w = w / np.linalg.norm(w)
    return canonical_sign(w)
