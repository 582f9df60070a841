"""Sparsity-level selection by repeated sample splitting.

For each of B random splits the candidate component is fitted on the
scatter of one half and scored by its quadratic form on the scatter of
the other half; the chosen sparsity maximizes the mean validation score.
Each half re-estimates its own center, so no information leaks across
the split.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, SignPcaError
from .location import _as_data, spatial_median
from .numerics import sym_eigen
from .sampler import substream
from .scatter import kendall_tau, pearson, sscm
from .sparse_pca import SparsePCConfig, truncated_power


@dataclass(frozen=True)
class TuneConfig:
    """Candidate sparsity levels and the splitting scheme.

    ``scatter`` picks the estimator used on both halves: ``"sscm"``
    (spatial-sign covariance about each half's spatial median, the
    default), ``"kendall"``, or ``"pearson"``.
    """

    candidates: tuple
    splits: int = 10
    split_fraction: float = 0.5
    seed: int = 0
    scatter: str = "sscm"

    def __post_init__(self):
        cands = tuple(int(k) for k in self.candidates)
        if len(cands) < 1:
            raise InvalidInputError("need at least one candidate k")
        if len(set(cands)) != len(cands):
            raise InvalidInputError("candidates must be distinct")
        object.__setattr__(self, "candidates", cands)
        if self.splits < 1:
            raise InvalidInputError("splits must be >= 1")
        if not 0.0 < self.split_fraction < 1.0:
            raise InvalidInputError("split_fraction must be in (0, 1)")
        if self.scatter not in ("sscm", "kendall", "pearson"):
            raise InvalidInputError(f"unknown scatter {self.scatter!r}")


@dataclass(frozen=True)
class TuneResult:
    """Chosen sparsity plus the full per-split score grid."""

    chosen_k: int
    candidates: tuple
    mean_scores: np.ndarray
    split_scores: np.ndarray = field(repr=False, default=None)  # (B, K), NaN = invalid

    def to_dict(self) -> dict:
        return {
            "chosen_k": self.chosen_k,
            "candidates": list(self.candidates),
            "mean_scores": [None if not np.isfinite(v) else float(v) for v in self.mean_scores],
            "split_scores": [
                [None if not np.isfinite(v) else float(v) for v in row]
                for row in self.split_scores
            ],
        }


def _half_scatter(x, kind: str) -> np.ndarray:
    if kind == "sscm":
        return sscm(x, spatial_median(x)).matrix
    if kind == "kendall":
        return kendall_tau(x).matrix
    return pearson(x).matrix


def select_k(x, cfg: TuneConfig, pc_cfg_template: SparsePCConfig | None = None) -> TuneResult:
    """Pick the sparsity level by repeated sample splitting.

    Parameters
    ----------
    x : (n, d) array_like
        Needs n >= 4 so both halves keep at least two rows.
    cfg : TuneConfig
    pc_cfg_template : SparsePCConfig, optional
        Source of eps / max_iter / init policy for the fits; its ``k`` is
        ignored.  Defaults to the stock configuration with the leading
        eigenvector of the fit half as the start vector.

    Returns
    -------
    TuneResult
        ``chosen_k`` attains the maximal mean validation score; exact
        ties go to the smallest candidate.  A candidate is disqualified
        when more than half of its split cells failed.
    """
    x = _as_data(x)
    n, d = x.shape
    if n < 4:
        raise InvalidInputError("need n >= 4 for sample splitting")
    for k in cfg.candidates:
        if not 1 <= k <= d:
            raise InvalidInputError(f"candidate k={k} outside [1, {d}]")
    template = pc_cfg_template if pc_cfg_template is not None else SparsePCConfig(k=1)

    n_fit = int(round(cfg.split_fraction * n))
    n_fit = min(max(n_fit, 2), n - 2)
    n_cand = len(cfg.candidates)
    scores = np.full((cfg.splits, n_cand), np.nan)

    for split in range(cfg.splits):
        rng = substream(cfg.seed, split)
        perm = rng.permutation(n)
        fit_half = x[perm[:n_fit]]
        val_half = x[perm[n_fit:]]
        try:
            s_fit = _half_scatter(fit_half, cfg.scatter)
            s_val = _half_scatter(val_half, cfg.scatter)
        except SignPcaError:
            continue
        init = template.init
        if isinstance(init, str) and init == "leading":
            init = sym_eigen(s_fit)[0].vector
        for j, k in enumerate(cfg.candidates):
            pc_cfg = SparsePCConfig(
                k=k,
                eps=template.eps,
                max_iter=template.max_iter,
                init=init,
                fantope=template.fantope,
            )
            try:
                res = truncated_power(s_fit, pc_cfg)
                u = res.vector
                scores[split, j] = float(u @ (s_val @ u))
            except SignPcaError:
                continue

    valid = np.isfinite(scores)
    disqualified = valid.sum(axis=0) < cfg.splits - cfg.splits // 2
    with np.errstate(invalid="ignore"):
        means = np.where(
            disqualified, -np.inf, np.nanmean(np.where(valid, scores, np.nan), axis=0)
        )
    if not np.any(np.isfinite(means)):
        raise InvalidInputError("every candidate was disqualified during tuning")

    best_k = None
    best_score = -np.inf
    for k in sorted(cfg.candidates):
        j = cfg.candidates.index(k)
        if means[j] > best_score:
            best_score = means[j]
            best_k = k
    return TuneResult(
        chosen_k=best_k,
        candidates=cfg.candidates,
        mean_scores=means,
        split_scores=scores,
    )
