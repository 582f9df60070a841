"""Robust sparse PCA for heavy-tailed elliptical data.

The estimators operate on the spatial-sign covariance matrix (unit
directions about the spatial median), the pairwise Kendall tau matrix,
or the Pearson covariance, and extract sparse leading components with a
hard-thresholded power iteration backed by an exact combinatoric oracle
at small dimension.
"""

from ._version import __version__
from .errors import (
    CsvParseError,
    DegenerateIterateError,
    EmptySupportError,
    InvalidInputError,
    InvalidSpecError,
    NotConvergedError,
    SignPcaError,
    TooLargeError,
)
from .experiments import (
    ExperimentReport,
    ExperimentSpec,
    bench_runtime,
    fit_csv,
    preset_leading_eigvec,
    preset_top_m,
    run_experiment,
)
from .fantope import FantopeConfig, FantopeSolution, fantope_initializer, fantope_solve
from .location import CenterEstimate, mean_center, spatial_median
from .metrics import (
    MetricRecord,
    effective_rank,
    flag_leverage,
    leverage_influence,
    restricted_spectral_norm,
    sin_angle,
    subspace_distance,
)
from .numerics import (
    EigenPair,
    frobenius_norm,
    max_norm,
    power_leading,
    spectral_norm,
    sym_eigen,
)
from .sampler import (
    EllipticalModel,
    SpikedCovarianceSpec,
    build_spiked_sigma,
    sample,
)
from .scatter import (
    PopulationEigenResult,
    ScatterEstimate,
    kendall_tau,
    pearson,
    population_sscm_eigen,
    spatial_sign,
    sscm,
)
from .sparse_pca import (
    SparsePCConfig,
    SparsePCResult,
    SubspaceResult,
    combinatoric_sparse_pc,
    deflate,
    top_m_sparse_pcs,
    trc,
    truncated_power,
)
from .tuning import TuneConfig, TuneResult, select_k

__all__ = [
    "__version__",
    "CenterEstimate",
    "CsvParseError",
    "DegenerateIterateError",
    "EigenPair",
    "EllipticalModel",
    "EmptySupportError",
    "ExperimentReport",
    "ExperimentSpec",
    "FantopeConfig",
    "FantopeSolution",
    "InvalidInputError",
    "InvalidSpecError",
    "MetricRecord",
    "NotConvergedError",
    "PopulationEigenResult",
    "ScatterEstimate",
    "SignPcaError",
    "SparsePCConfig",
    "SparsePCResult",
    "SpikedCovarianceSpec",
    "SubspaceResult",
    "TooLargeError",
    "TuneConfig",
    "TuneResult",
    "bench_runtime",
    "build_spiked_sigma",
    "combinatoric_sparse_pc",
    "deflate",
    "effective_rank",
    "fantope_initializer",
    "fantope_solve",
    "fit_csv",
    "flag_leverage",
    "frobenius_norm",
    "kendall_tau",
    "leverage_influence",
    "max_norm",
    "mean_center",
    "pearson",
    "population_sscm_eigen",
    "power_leading",
    "preset_leading_eigvec",
    "preset_top_m",
    "restricted_spectral_norm",
    "run_experiment",
    "sample",
    "select_k",
    "sin_angle",
    "spatial_median",
    "spatial_sign",
    "spectral_norm",
    "sscm",
    "subspace_distance",
    "sym_eigen",
    "top_m_sparse_pcs",
    "trc",
    "truncated_power",
]
