"""Sparse principal component extraction.

Two routes to the best s-sparse approximation of the leading eigenvector:

- ``truncated_power``: power iteration that hard-thresholds the iterate
  to its k largest-magnitude coordinates each step and renormalizes.
  Scales to any dimension used here.
- ``combinatoric_sparse_pc``: exact maximizer of ``|v' M v|`` over unit
  vectors with at most s nonzeros, by enumerating every size-s support
  and taking the extreme eigenvector of the principal submatrix.  Cost
  is binomial(d, s) eigensolves, so it is guarded to small d and serves
  as the exactness oracle for the iterative route.

Multiple components come from sequential deflation: after extracting v,
the working matrix is replaced by ``(I - vv') M (I - vv')``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import (
    DegenerateIterateError,
    InvalidInputError,
    TooLargeError,
)
from .fantope import FantopeConfig, fantope_initializer
from .numerics import as_symmetric, canonical_sign, sym_eigen

# Exact enumeration guard: binomial(d, s) supports get eigensolved.
MAX_EXACT_DIM = 25


@dataclass(frozen=True)
class SparsePCConfig:
    """Settings for one truncated power run.

    ``init`` is ``"leading"`` (leading eigenvector of the input matrix,
    the default), ``"fantope"`` (sparse initializer from the penalized
    Fantope program configured by ``fantope``), or an explicit start
    vector.
    """

    k: int
    eps: float = 1e-6
    max_iter: int = 1000
    init: object = "leading"
    fantope: FantopeConfig | None = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInputError("sparsity level k must be >= 1")
        if self.eps <= 0:
            raise InvalidInputError("eps must be positive")
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be >= 1")


@dataclass(frozen=True)
class SparsePCResult:
    """A unit vector with at most k nonzeros and how it was found.

    ``rayleigh`` is the quadratic form ``v' M v`` at the final vector;
    ``rayleigh_trace`` records it per iteration (empty for the exact
    combinatoric route, which does not iterate).
    """

    vector: np.ndarray
    support: np.ndarray
    rayleigh: float
    iterations: int
    converged: bool
    rayleigh_trace: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "vector": self.vector.tolist(),
            "support": self.support.tolist(),
            "rayleigh": self.rayleigh,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class SubspaceResult:
    """Sequentially deflated components plus the matrices they came from."""

    components: list
    inputs: list = field(repr=False, default_factory=list)

    def vectors(self) -> np.ndarray:
        return np.column_stack([r.vector for r in self.components])


def trc(v, keep) -> np.ndarray:
    """Zero out every coordinate of `v` outside the index set `keep`."""
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    idx = np.fromiter(keep, dtype=int) if not isinstance(keep, np.ndarray) else keep
    if idx.size:
        if idx.min() < 0 or idx.max() >= v.shape[0]:
            raise InvalidInputError("truncation index out of range")
        out[idx] = v[idx]
    return out


def top_k_indices(w: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest |entries|; ties go to the lower index."""
    order = np.argsort(-np.abs(w), kind="stable")
    return np.sort(order[:k])


def _start_vector(s: np.ndarray, cfg: SparsePCConfig) -> np.ndarray:
    if isinstance(cfg.init, str):
        if cfg.init == "leading":
            return sym_eigen(s)[0].vector
        if cfg.init == "fantope":
            fcfg = cfg.fantope if cfg.fantope is not None else FantopeConfig()
            return fantope_initializer(s, fcfg)
        raise InvalidInputError(f"unknown init {cfg.init!r}")
    v0 = np.asarray(cfg.init, dtype=float)
    if v0.shape != (s.shape[0],):
        raise InvalidInputError("init vector has wrong dimension")
    nrm = float(np.linalg.norm(v0))
    if nrm == 0.0:
        raise InvalidInputError("init vector must be nonzero")
    return v0 / nrm


def truncated_power(s, cfg: SparsePCConfig) -> SparsePCResult:
    """Sparse leading component by hard-thresholded power iteration.

    Each step multiplies the iterate by the matrix; if more than k
    entries are nonzero, only the k of largest magnitude survive; the
    result is renormalized.  Stops when consecutive iterates differ by at
    most ``cfg.eps`` in l2.  Hitting ``max_iter`` is reported via
    ``converged=False`` rather than an exception; a zero multiply raises
    ``DegenerateIterateError`` naming the iteration.
    """
    s = as_symmetric(s)
    d = s.shape[0]
    if cfg.k > d:
        raise InvalidInputError(f"k={cfg.k} exceeds dimension {d}")
    v = _start_vector(s, cfg)

    trace = []
    converged = False
    iterations = 0
    for t in range(1, cfg.max_iter + 1):
        w = s @ v
        if not np.any(w):
            raise DegenerateIterateError(
                f"iterate annihilated at iteration {t}", iteration=t
            )
        if np.count_nonzero(w) > cfg.k:
            w = trc(w, top_k_indices(w, cfg.k))
        v_new = w / np.linalg.norm(w)
        iterations = t
        trace.append(float(v_new @ (s @ v_new)))
        step = float(np.linalg.norm(v_new - v))
        v = v_new
        if step <= cfg.eps:
            converged = True
            break

    v = canonical_sign(v)
    return SparsePCResult(
        vector=v,
        support=np.nonzero(v)[0],
        rayleigh=float(v @ (s @ v)),
        iterations=iterations,
        converged=converged,
        rayleigh_trace=np.asarray(trace),
    )


def best_sparse_quadratic(s, k: int):
    """Exact max of |v' S v| over unit v with at most k nonzeros.

    Enumerates all size-k supports; within a support the maximizer is the
    eigenvector of the principal submatrix with extreme |eigenvalue|.
    Returns ``(signed_value, support, vector)`` with ties broken toward
    the lexicographically smallest support.  Guarded to d <= 25.
    """
    s = as_symmetric(s)
    d = s.shape[0]
    if not 1 <= k <= d:
        raise InvalidInputError(f"need 1 <= k <= d, got k={k}, d={d}")
    if d > MAX_EXACT_DIM:
        raise TooLargeError(
            f"exact enumeration guarded to d <= {MAX_EXACT_DIM}, got d={d}; "
            "use truncated_power"
        )

    best_abs = -np.inf
    best = None
    for supp in combinations(range(d), k):
        idx = np.asarray(supp, dtype=int)
        vals, vecs = np.linalg.eigh(s[np.ix_(idx, idx)])
        j = int(np.argmax(np.abs(vals)))
        cand = float(np.abs(vals[j]))
        if cand > best_abs:
            best_abs = cand
            best = (float(vals[j]), idx, vecs[:, j])
    signed, idx, sub_vec = best
    vector = np.zeros(d)
    vector[idx] = sub_vec
    return signed, idx, canonical_sign(vector)


def combinatoric_sparse_pc(s, k: int) -> SparsePCResult:
    """Exact s-sparse principal component via support enumeration."""
    signed, idx, vector = best_sparse_quadratic(s, k)
    return SparsePCResult(
        vector=vector,
        support=np.nonzero(vector)[0],
        rayleigh=signed,
        iterations=0,
        converged=True,
        rayleigh_trace=np.empty(0),
    )


def deflate(s, v) -> np.ndarray:
    """Project a component out of a symmetric matrix: (I - vv') S (I - vv')."""
    s = as_symmetric(s)
    v = np.asarray(v, dtype=float)
    if abs(float(np.linalg.norm(v)) - 1.0) > 1e-8:
        raise InvalidInputError("deflation vector must be unit norm")
    p = np.eye(s.shape[0]) - np.outer(v, v)
    out = p @ s @ p
    return (out + out.T) / 2.0


def top_m_sparse_pcs(s, configs) -> SubspaceResult:
    """Extract several components by truncated power plus deflation.

    ``configs`` is one ``SparsePCConfig`` per component, applied in
    order; after each extraction the matrix is deflated by the found
    vector.  The matrix each component was extracted from is recorded.
    """
    if len(configs) < 1:
        raise InvalidInputError("need at least one component config")
    current = as_symmetric(s)
    components = []
    inputs = []
    for cfg in configs:
        inputs.append(current)
        res = truncated_power(current, cfg)
        components.append(res)
        current = deflate(current, res.vector)
    return SubspaceResult(components=components, inputs=inputs)
