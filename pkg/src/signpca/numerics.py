"""Dense symmetric-matrix kernel: eigendecomposition, power iteration, norms.

Every routine takes and returns plain ``numpy`` arrays.  Matrices are
validated once on entry (square, finite, symmetric) and symmetrized
exactly, so downstream code can rely on ``M == M.T`` bit-for-bit.

Conventions
-----------
- Eigenpairs are ordered by descending eigenvalue.
- Every returned eigenvector is unit-norm with its first nonzero entry
  positive (sign-canonical form).
- Exact eigenvalue ties are ordered by the lexicographically largest
  sign-canonical vector, which makes degenerate spectra deterministic.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, NotConvergedError

# Seed of the fixed fallback start vector used when power iteration
# stagnates (start orthogonal to the dominant eigenspace).
_RESTART_SEED = 0x5EED


class EigenPair(NamedTuple):
    """One eigenvalue together with its unit, sign-canonical eigenvector."""

    value: float
    vector: np.ndarray


def as_symmetric(m, tol: float = 1e-8) -> np.ndarray:
    """Validate a square symmetric matrix and return an exactly symmetric copy.

    Accepts small floating-point asymmetry (relative to the largest entry)
    and removes it by averaging with the transpose; anything beyond `tol`
    raises ``InvalidInputError``.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise InvalidInputError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m - m.T).max()) > tol * scale:
        raise InvalidInputError("matrix is not symmetric")
    return (m + m.T) / 2.0


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip `v` so its first nonzero entry is positive (no-op on zero)."""
    v = np.asarray(v, dtype=float)
    nz = np.nonzero(v)[0]
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def sym_eigen(m) -> list[EigenPair]:
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    m : (d, d) array_like
        Symmetric matrix with finite entries.

    Returns
    -------
    list of EigenPair
        All d eigenpairs, eigenvalues descending, vectors orthonormal and
        sign-canonical.  Exact ties are ordered deterministically (see
        module docstring).
    """
    m = as_symmetric(m)
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(-vals, kind="stable")
    pairs = [EigenPair(float(vals[i]), canonical_sign(vecs[:, i])) for i in order]

    # Deterministic order inside runs of exactly equal eigenvalues.
    i = 0
    while i < len(pairs):
        j = i
        while j + 1 < len(pairs) and pairs[j + 1].value == pairs[i].value:
            j += 1
        if j > i:
            pairs[i : j + 1] = sorted(
                pairs[i : j + 1], key=lambda p: tuple(p.vector), reverse=True
            )
        i = j + 1
    return pairs


def power_leading(m, tol: float = 1e-10, max_iter: int = 5000) -> EigenPair:
    """Dominant eigenpair (largest |eigenvalue|) by power iteration.

    Starts from the normalized all-ones vector; if that start is
    orthogonal (or nearly so) to the dominant eigenspace the run either
    stagnates or locks onto a minor eigenpair, so the iteration falls
    back to a fixed seeded random start and keeps the better of the two
    answers.  For positive semidefinite input the result is the top
    eigenpair.

    Raises
    ------
    NotConvergedError
        If the residual ``||Mv - rho v||`` does not drop below
        ``tol * |rho|`` within `max_iter` iterations; the last iterate is
        attached as ``result``.
    """
    m = as_symmetric(m)
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    d = m.shape[0]

    first = _power_run(m, np.ones(d) / np.sqrt(d), tol, max_iter)
    if first is not None and first.value == 0.0:
        # annihilated start: retry below
        first = None
    rng = np.random.default_rng(_RESTART_SEED)
    start = rng.standard_normal(d)
    start /= np.linalg.norm(start)
    second = _power_run(m, start, tol, max_iter)

    if first is None and second is None:
        raise NotConvergedError(
            f"power iteration did not converge in {max_iter} iterations",
            result=_power_last(m, start, tol, max_iter),
        )
    if first is None:
        return second
    if second is None or abs(second.value) <= abs(first.value) * (1.0 + 10.0 * tol):
        return first
    return second


def _power_run(m, v, tol, max_iter):
    """One power run; None if the residual never meets the tolerance."""
    for _ in range(max_iter):
        w = m @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            # v is in the null space; an eigenpair of 0 (caller may retry)
            return EigenPair(0.0, canonical_sign(v))
        v = w / nrm
        rho = float(v @ (m @ v))
        res = float(np.linalg.norm(m @ v - rho * v))
        if res <= tol * max(abs(rho), np.finfo(float).tiny):
            return EigenPair(rho, canonical_sign(v))
    return None


def _power_last(m, v, tol, max_iter):
    for _ in range(max_iter):
        w = m @ v
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            break
        v = w / nrm
    rho = float(v @ (m @ v))
    return EigenPair(rho, canonical_sign(v))


def spectral_norm(m) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    m = as_symmetric(m)
    return float(np.abs(np.linalg.eigvalsh(m)).max())


def frobenius_norm(m) -> float:
    """Entrywise l2 norm."""
    m = as_symmetric(m)
    return float(np.linalg.norm(m, "fro"))


def max_norm(m) -> float:
    """Entrywise maximum absolute value."""
    m = as_symmetric(m)
    return float(np.abs(m).max())
