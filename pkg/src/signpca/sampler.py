"""Synthetic data generation from spiked-covariance elliptical models.

Covariance model
----------------
The scatter matrix is a sparse spiked model: a handful of leading
eigenvalues ``omega_1 > omega_2 > ... > omega_tail`` whose eigenvectors
live on consecutive disjoint index blocks with constant entries
``1/sqrt(s_j)``, plus an isotropic tail.

Families
--------
Three elliptical families share one Gaussian core ``Z @ sqrt(Sigma)``:

- ``gaussian``: the core itself.
- ``t``: core divided by ``sqrt(chi2_df / df)``, then standardized by
  ``sqrt(df / (df - 2))`` so the covariance equals the scatter (df > 2).
- ``mixture``: with probability ``1 - kappa`` a row is inflated by
  ``sqrt(inflation)``; everything is standardized by
  ``sqrt(kappa + inflation * (1 - kappa))`` so the covariance again
  equals the scatter.

The radial draws happen after the Gaussian core draws, so a degenerate
mixture (``kappa = 1``) is bit-identical to the Gaussian family under the
same seed.

Seeding
-------
Sampling uses the counter-based Philox generator keyed by
``SeedSequence([seed, stream])``: the ``stream`` argument is the
replication index, so parallel replications get independent,
reproducible substreams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidSpecError
from .numerics import sym_eigen

FAMILIES = ("gaussian", "t", "mixture")


@dataclass(frozen=True)
class SpikedCovarianceSpec:
    """Sparse spiked scatter specification.

    Attributes
    ----------
    d : int
        Dimension.
    spikes : list of (float, int)
        ``(omega_j, s_j)`` pairs: spike eigenvalue and support cardinality.
        Supports are consecutive disjoint blocks starting at coordinate 0.
    omega_tail : float
        The common tail eigenvalue, strictly below every spike.
    """

    d: int
    spikes: tuple = ()
    omega_tail: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "spikes", tuple((float(w), int(s)) for w, s in self.spikes))
        if self.d < 1:
            raise InvalidSpecError("d must be >= 1")
        if self.omega_tail <= 0:
            raise InvalidSpecError("omega_tail must be positive")
        omegas = [w for w, _ in self.spikes]
        if any(b >= a for a, b in zip(omegas, omegas[1:])):
            raise InvalidSpecError("spike eigenvalues must be strictly decreasing")
        if omegas and omegas[-1] <= self.omega_tail:
            raise InvalidSpecError("every spike must exceed omega_tail")
        if any(s < 1 for _, s in self.spikes):
            raise InvalidSpecError("spike cardinalities must be >= 1")
        if sum(s for _, s in self.spikes) > self.d:
            raise InvalidSpecError("spike supports exceed dimension")

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "spikes": [[w, s] for w, s in self.spikes],
            "omega_tail": self.omega_tail,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SpikedCovarianceSpec":
        return cls(
            d=int(doc["d"]),
            spikes=tuple((float(w), int(s)) for w, s in doc.get("spikes", [])),
            omega_tail=float(doc.get("omega_tail", 1.0)),
        )


def build_spiked_sigma(spec: SpikedCovarianceSpec):
    """Materialize the scatter matrix and its sparse leading eigenvectors.

    Returns
    -------
    sigma : (d, d) ndarray
        Eigenvalues are the spike values followed by the tail value
        repeated ``d - m`` times.
    vectors : (d, m) ndarray
        Column j is the j-th spike eigenvector: ``1/sqrt(s_j)`` on its
        block, zero elsewhere.
    """
    d = spec.d
    m = len(spec.spikes)
    vectors = np.zeros((d, m))
    start = 0
    for j, (_, s) in enumerate(spec.spikes):
        vectors[start : start + s, j] = 1.0 / np.sqrt(s)
        start += s
    sigma = spec.omega_tail * np.eye(d)
    for j, (w, _) in enumerate(spec.spikes):
        v = vectors[:, j]
        sigma += (w - spec.omega_tail) * np.outer(v, v)
    return (sigma + sigma.T) / 2.0, vectors


def _spiked_sqrt(spec: SpikedCovarianceSpec) -> np.ndarray:
    """Closed-form symmetric square root of the spiked scatter."""
    _, vectors = build_spiked_sigma(spec)
    root = np.sqrt(spec.omega_tail) * np.eye(spec.d)
    for j, (w, _) in enumerate(spec.spikes):
        v = vectors[:, j]
        root += (np.sqrt(w) - np.sqrt(spec.omega_tail)) * np.outer(v, v)
    return root


def sigma_sqrt(sigma) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition."""
    pairs = sym_eigen(sigma)
    vals = np.array([p.value for p in pairs])
    if np.any(vals < -1e-10 * max(1.0, vals.max(initial=0.0))):
        raise InvalidSpecError("scatter matrix is not positive semidefinite")
    vecs = np.column_stack([p.vector for p in pairs])
    return (vecs * np.sqrt(np.maximum(vals, 0.0))) @ vecs.T


@dataclass(frozen=True)
class EllipticalModel:
    """Generator specification for one elliptical distribution.

    Exactly one of `spec` (spiked model) or `sigma` (explicit scatter)
    must be given.  ``mu = None`` means the zero vector.
    """

    family: str = "gaussian"
    spec: SpikedCovarianceSpec | None = None
    sigma: np.ndarray | None = None
    mu: np.ndarray | None = None
    df: float | None = None
    kappa: float | None = None
    inflation: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpecError(f"unknown family {self.family!r}")
        if (self.spec is None) == (self.sigma is None):
            raise InvalidSpecError("give exactly one of spec= or sigma=")
        if self.sigma is not None:
            object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        if self.mu is not None:
            mu = np.asarray(self.mu, dtype=float)
            if mu.ndim != 1 or mu.shape[0] != self.dim:
                raise InvalidSpecError("mu must be a d-vector")
            object.__setattr__(self, "mu", mu)
        if self.family == "t":
            if self.df is None or self.df <= 2:
                raise InvalidSpecError("t family needs df > 2 (standardization)")
        if self.family == "mixture":
            if self.kappa is None or not 0.0 <= self.kappa <= 1.0:
                raise InvalidSpecError("mixture needs kappa in [0, 1]")
            if self.inflation is None or self.inflation <= 0:
                raise InvalidSpecError("mixture needs inflation > 0")

    @property
    def dim(self) -> int:
        return self.spec.d if self.spec is not None else self.sigma.shape[0]

    def scatter_matrix(self) -> np.ndarray:
        if self.spec is not None:
            return build_spiked_sigma(self.spec)[0]
        return self.sigma

    def scatter_sqrt(self) -> np.ndarray:
        if self.spec is not None:
            return _spiked_sqrt(self.spec)
        return sigma_sqrt(self.sigma)

    def to_dict(self) -> dict:
        doc = {"family": self.family, "seed": self.seed}
        if self.spec is not None:
            doc["spec"] = self.spec.to_dict()
        else:
            doc["sigma"] = self.sigma.tolist()
        if self.mu is not None:
            doc["mu"] = self.mu.tolist()
        for key in ("df", "kappa", "inflation"):
            if getattr(self, key) is not None:
                doc[key] = getattr(self, key)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "EllipticalModel":
        spec = doc.get("spec")
        return cls(
            family=doc.get("family", "gaussian"),
            spec=SpikedCovarianceSpec.from_dict(spec) if spec is not None else None,
            sigma=np.asarray(doc["sigma"], dtype=float) if "sigma" in doc else None,
            mu=np.asarray(doc["mu"], dtype=float) if "mu" in doc else None,
            df=doc.get("df"),
            kappa=doc.get("kappa"),
            inflation=doc.get("inflation"),
            seed=int(doc.get("seed", 0)),
        )


def substream(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for (seed, stream); deterministic splitting."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def sample(model: EllipticalModel, n: int, stream: int = 0) -> np.ndarray:
    """Draw `n` observations, one per row.

    Deterministic given ``(model, n, stream)``; distinct streams are
    independent substreams of the model seed.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    d = model.dim
    rng = substream(model.seed, stream)
    core = rng.standard_normal((n, d)) @ model.scatter_sqrt()

    if model.family == "gaussian":
        x = core
    elif model.family == "t":
        w = rng.chisquare(model.df, size=n)
        x = core / np.sqrt(w / model.df)[:, None]
        x /= np.sqrt(model.df / (model.df - 2.0))
    else:  # mixture
        u = rng.random(n)
        scale = np.where(u > model.kappa, np.sqrt(model.inflation), 1.0)
        x = core * scale[:, None]
        x /= np.sqrt(model.kappa + model.inflation * (1.0 - model.kappa))

    if model.mu is not None:
        x = x + model.mu
    return x
