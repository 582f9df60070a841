"""Experiment harness: simulation scenarios, CSV fitting, runtime benchmarks.

Four estimators are wired up end to end:

- ``tp``: truncated power on the Pearson covariance,
- ``eca``: truncated power on the pairwise Kendall tau matrix,
- ``sspca``: truncated power on the spatial-sign covariance about the
  spatial median,
- ``sspca_fp``: same scatter, started from the penalized-Fantope
  initializer (falls back to the leading eigenvector when thresholding
  empties the start vector).

Scenarios draw replicated synthetic data from the spiked elliptical
models, fit the requested estimators, and emit long-format metric
records.  Everything is deterministic given the base seed, including
parallel replication: replication r always samples substream r and the
records are reduced in replication order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from ._version import __version__
from .errors import EmptySupportError, InvalidSpecError, SignPcaError
from .fantope import FantopeConfig
from .io import read_data_csv
from .location import mean_center, spatial_median
from .metrics import (
    MetricRecord,
    flag_leverage,
    leverage_influence,
    sin_angle,
)
from .numerics import sym_eigen
from .sampler import EllipticalModel, SpikedCovarianceSpec, build_spiked_sigma, sample
from .scatter import kendall_tau, pearson, sscm
from .sparse_pca import SparsePCConfig, top_m_sparse_pcs, truncated_power
from .tuning import TuneConfig, select_k

METHODS = ("tp", "eca", "sspca", "sspca_fp")
SCENARIOS = ("leading_eigvec", "top_m", "tune_histogram", "runtime_bench", "fit_csv")

_METHOD_SCATTER = {"tp": "pearson", "eca": "kendall", "sspca": "sscm", "sspca_fp": "sscm"}


# ---------------------------------------------------------------------------
# Specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one experiment run needs, JSON round-trippable.

    ``k_values`` entries are integers or the string ``"oracle"``, which
    resolves to the true spike cardinality of the cell.  For the top-m
    scenario ``cardinalities`` fixes the per-spike support sizes;
    otherwise each value of ``s_values`` is applied to every spike.
    """

    scenario: str = "leading_eigvec"
    family: str = "gaussian"
    df: float | None = None
    kappa: float | None = None
    inflation: float | None = None
    omegas: tuple = (5.0, 3.0)
    omega_tail: float = 1.0
    cardinalities: tuple | None = None
    n_values: tuple = (200,)
    d_values: tuple = (100,)
    s_values: tuple = (10,)
    k_values: tuple = ("oracle",)
    methods: tuple = ("tp", "eca", "sspca")
    replications: int = 1
    base_seed: int = 0
    eps: float = 1e-6
    max_iter: int = 1000
    fantope_lam: float | None = None
    fantope_phi: float | None = None
    tune_candidates: tuple | None = None
    tune_splits: int = 10
    input_path: str | None = None
    header: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidSpecError(f"unknown scenario {self.scenario!r}")
        for m in self.methods:
            if m not in METHODS and m not in ("sscm", "kendall", "pearson"):
                raise InvalidSpecError(f"unknown method {m!r}")
        if self.replications < 1:
            raise InvalidSpecError("replications must be >= 1")
        for name in ("n_values", "d_values", "s_values"):
            vals = getattr(self, name)
            object.__setattr__(self, name, tuple(int(v) for v in vals))
            if any(v < 1 for v in getattr(self, name)):
                raise InvalidSpecError(f"{name} must be positive")
        object.__setattr__(
            self,
            "k_values",
            tuple(v if v == "oracle" else int(v) for v in self.k_values),
        )
        object.__setattr__(self, "omegas", tuple(float(w) for w in self.omegas))
        if self.cardinalities is not None:
            object.__setattr__(
                self, "cardinalities", tuple(int(s) for s in self.cardinalities)
            )
        if self.tune_candidates is not None:
            object.__setattr__(
                self, "tune_candidates", tuple(int(k) for k in self.tune_candidates)
            )
        if self.workers < 1:
            raise InvalidSpecError("workers must be >= 1")

    def to_dict(self) -> dict:
        doc = {}
        for key, value in self.__dict__.items():
            doc[key] = list(value) if isinstance(value, tuple) else value
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        kwargs = {}
        for key in cls.__dataclass_fields__:
            if key in doc and doc[key] is not None:
                value = doc[key]
                kwargs[key] = tuple(value) if isinstance(value, list) else value
            elif key in doc:
                kwargs[key] = None
        return cls(**kwargs)

    def distribution_label(self) -> str:
        if self.family == "t":
            return f"t{self.df:g}"
        if self.family == "mixture":
            return f"mix{self.kappa:g}x{self.inflation:g}"
        return "gaussian"


def preset_leading_eigvec(**overrides) -> ExperimentSpec:
    """Two-spike model (5, 3, tail 1), leading-eigenvector accuracy."""
    base = dict(
        scenario="leading_eigvec",
        omegas=(5.0, 3.0),
        omega_tail=1.0,
        n_values=(200,),
        d_values=(100,),
        s_values=(10,),
        k_values=("oracle",),
        methods=("tp", "eca", "sspca"),
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def preset_top_m(**overrides) -> ExperimentSpec:
    """Four-spike model (10.1, 6.2, 3.3, 1.4, tail 0.5), subspace accuracy."""
    base = dict(
        scenario="top_m",
        omegas=(10.1, 6.2, 3.3, 1.4),
        omega_tail=0.5,
        cardinalities=(10, 10, 8, 8),
        n_values=(200,),
        d_values=(100,),
        k_values=("oracle",),
        methods=("tp", "eca", "sspca"),
    )
    base.update(overrides)
    return ExperimentSpec(**base)


PRESETS = {"leading": preset_leading_eigvec, "topm": preset_top_m}


@dataclass(frozen=True)
class ExperimentReport:
    """Metric records plus provenance.

    ``wall_clock`` (seconds per cell) is the only non-deterministic part
    and is serialized separately so the records and summary are
    byte-identical across reruns with the same seed.
    """

    records: list
    config: dict
    version: str = __version__
    wall_clock: dict = field(default_factory=dict)
    detail: dict | None = None

    def summary(self) -> dict:
        """Deterministic aggregate: mean value per (name, tags minus rep)."""
        groups = {}
        for rec in self.records:
            tags = {
                key: value
                for key, value in sorted(rec.context.items())
                if key not in ("replication", "repeat")
            }
            key = (rec.name, tuple(sorted(tags.items())))
            groups.setdefault(key, []).append(rec.value)
        aggregates = []
        for (name, tags), values in sorted(groups.items(), key=lambda kv: str(kv[0])):
            aggregates.append(
                {
                    "name": name,
                    "tags": dict(tags),
                    "mean": float(np.mean(values)),
                    "count": len(values),
                }
            )
        return {
            "version": self.version,
            "config": self.config,
            "aggregates": aggregates,
        }


# ---------------------------------------------------------------------------
# Method fitting
# ---------------------------------------------------------------------------

def method_scatter(x, method: str):
    """Scatter estimate a method operates on (includes its center choice)."""
    kind = _METHOD_SCATTER.get(method, method)
    if kind == "pearson":
        return pearson(x)
    if kind == "kendall":
        return kendall_tau(x)
    if kind == "sscm":
        return sscm(x, spatial_median(x))
    raise InvalidSpecError(f"unknown method {method!r}")


def _pc_config(spec: ExperimentSpec, method: str, k: int, s_matrix, n_obs: int):
    if method != "sspca_fp":
        return SparsePCConfig(k=k, eps=spec.eps, max_iter=spec.max_iter)
    d = s_matrix.shape[0]
    lam = spec.fantope_lam
    if lam is None:
        # scaling from theory, constant calibrated on pilot runs (a full
        # lam1 * sqrt(log d / n) over-penalizes at small n)
        lam = 0.5 * sym_eigen(s_matrix)[0].value * math.sqrt(math.log(d) / n_obs)
    phi = spec.fantope_phi
    if phi is None:
        phi = 0.5 / math.sqrt(k)
    fcfg = FantopeConfig(lam=lam, phi=phi, tol=1e-5, max_iter=1000)
    return SparsePCConfig(
        k=k, eps=spec.eps, max_iter=spec.max_iter, init="fantope", fantope=fcfg
    )


def fit_leading_component(spec: ExperimentSpec, method: str, x, k: int):
    """One estimator's leading sparse component on one data set."""
    s_est = method_scatter(x, method)
    cfg = _pc_config(spec, method, k, s_est.matrix, x.shape[0])
    try:
        return truncated_power(s_est.matrix, cfg), s_est
    except EmptySupportError:
        fallback = SparsePCConfig(k=k, eps=spec.eps, max_iter=spec.max_iter)
        return truncated_power(s_est.matrix, fallback), s_est


def _cell_model(spec: ExperimentSpec, d: int, s: int | None) -> tuple:
    if spec.cardinalities is not None:
        cards = spec.cardinalities
    else:
        if s is None:
            raise InvalidSpecError("cell needs either cardinalities or an s value")
        cards = (s,) * len(spec.omegas)
    cov_spec = SpikedCovarianceSpec(
        d=d,
        spikes=tuple(zip(spec.omegas, cards)),
        omega_tail=spec.omega_tail,
    )
    model = EllipticalModel(
        family=spec.family,
        spec=cov_spec,
        df=spec.df,
        kappa=spec.kappa,
        inflation=spec.inflation,
        seed=spec.base_seed,
    )
    return cov_spec, model


def _resolve_k(k_raw, oracle: int) -> int:
    return oracle if k_raw == "oracle" else int(k_raw)


def _derived_seed(base_seed: int, stream: int) -> int:
    """Documented hash used to key nested procedures per replication."""
    return int(np.random.SeedSequence([base_seed, stream]).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Scenario workers (top-level so a process pool can pickle them)
# ---------------------------------------------------------------------------

def _leading_rep(args) -> list:
    spec, model, v_true, n, d, s, k, rep = args
    x = sample(model, n, stream=rep)
    records = []
    for method in spec.methods:
        context = {
            "scenario": spec.scenario,
            "method": method,
            "distribution": spec.distribution_label(),
            "n": n,
            "d": d,
            "s": s,
            "k": k,
            "replication": rep,
            "seed": spec.base_seed,
        }
        res, _ = fit_leading_component(spec, method, x, k)
        records.append(MetricRecord("sin_angle", sin_angle(res.vector, v_true), context))
        records.append(MetricRecord("support_size", float(res.support.size), context))
    return records


def _top_m_rep(args) -> list:
    spec, model, v_true, n, d, ks, rep = args
    x = sample(model, n, stream=rep)
    records = []
    for method in spec.methods:
        s_est = method_scatter(x, method)
        configs = [
            _pc_config(spec, method, k_j, s_est.matrix, n) for k_j in ks
        ]
        try:
            sub = top_m_sparse_pcs(s_est.matrix, configs)
        except EmptySupportError:
            configs = [SparsePCConfig(k=k_j, eps=spec.eps, max_iter=spec.max_iter) for k_j in ks]
            sub = top_m_sparse_pcs(s_est.matrix, configs)
        angles = []
        for j, res in enumerate(sub.components):
            angle = sin_angle(res.vector, v_true[:, j])
            angles.append(angle)
            context = {
                "scenario": spec.scenario,
                "method": method,
                "distribution": spec.distribution_label(),
                "n": n,
                "d": d,
                "k": ks[j],
                "component": j,
                "replication": rep,
                "seed": spec.base_seed,
            }
            records.append(MetricRecord("sin_angle", angle, context))
        context = {
            "scenario": spec.scenario,
            "method": method,
            "distribution": spec.distribution_label(),
            "n": n,
            "d": d,
            "replication": rep,
            "seed": spec.base_seed,
        }
        records.append(MetricRecord("mean_sin_angle", float(np.mean(angles)), context))
    return records


def _tune_rep(args) -> list:
    spec, model, n, d, s, candidates, rep = args
    x = sample(model, n, stream=rep)
    records = []
    for method in spec.methods:
        cfg = TuneConfig(
            candidates=candidates,
            splits=spec.tune_splits,
            seed=_derived_seed(spec.base_seed, rep),
            scatter=_METHOD_SCATTER.get(method, method),
        )
        result = select_k(x, cfg, SparsePCConfig(k=1, eps=spec.eps, max_iter=spec.max_iter))
        context = {
            "scenario": spec.scenario,
            "method": method,
            "distribution": spec.distribution_label(),
            "n": n,
            "d": d,
            "s": s,
            "replication": rep,
            "seed": spec.base_seed,
        }
        records.append(MetricRecord("chosen_k", float(result.chosen_k), context))
    return records


def _invoke(pair):
    fn, args = pair
    with threadpool_limits(limits=1):
        return fn(args)


def _map_replications(fn, args_list, workers: int) -> list:
    # BLAS threading is pinned to one thread per replication so serial and
    # pooled runs reduce floating point in exactly the same order.
    if workers <= 1 or len(args_list) <= 1:
        return [_invoke((fn, a)) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_invoke, [(fn, a) for a in args_list]))


# ---------------------------------------------------------------------------
# Scenario drivers
# ---------------------------------------------------------------------------

def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Run one scenario; returns records ordered by cell then replication."""
    if spec.scenario == "leading_eigvec":
        records, wall = _run_leading(spec)
    elif spec.scenario == "top_m":
        records, wall = _run_top_m(spec)
    elif spec.scenario == "tune_histogram":
        records, wall = _run_tune(spec)
    elif spec.scenario == "runtime_bench":
        records = bench_runtime(
            spec.n_values,
            spec.d_values[0],
            methods=tuple(_METHOD_SCATTER.get(m, m) for m in spec.methods),
            seed=spec.base_seed,
        )
        wall = {}
    elif spec.scenario == "fit_csv":
        return _run_fit_csv(spec)
    else:  # pragma: no cover - guarded in __post_init__
        raise InvalidSpecError(f"unknown scenario {spec.scenario!r}")
    return ExperimentReport(records=records, config=spec.to_dict(), wall_clock=wall)


def _run_leading(spec: ExperimentSpec):
    records, wall = [], {}
    for n in spec.n_values:
        for d in spec.d_values:
            for s in spec.s_values:
                t0 = time.perf_counter()
                cov_spec, model = _cell_model(spec, d, s)
                _, v_true = build_spiked_sigma(cov_spec)
                # contiguous copy: workers receive pickled (contiguous)
                # arrays, and dot products round differently on views
                v_lead = np.ascontiguousarray(v_true[:, 0])
                for k_raw in spec.k_values:
                    k = _resolve_k(k_raw, cov_spec.spikes[0][1])
                    args = [
                        (spec, model, v_lead, n, d, s, k, rep)
                        for rep in range(spec.replications)
                    ]
                    for recs in _map_replications(_leading_rep, args, spec.workers):
                        records.extend(recs)
                wall[f"n={n},d={d},s={s}"] = time.perf_counter() - t0
    return records, wall


def _run_top_m(spec: ExperimentSpec):
    if spec.cardinalities is None:
        raise InvalidSpecError("top_m scenario needs explicit cardinalities")
    records, wall = [], {}
    for n in spec.n_values:
        for d in spec.d_values:
            t0 = time.perf_counter()
            cov_spec, model = _cell_model(spec, d, None)
            _, v_true = build_spiked_sigma(cov_spec)
            for k_raw in spec.k_values:
                ks = tuple(_resolve_k(k_raw, s_j) for _, s_j in cov_spec.spikes)
                args = [
                    (spec, model, v_true, n, d, ks, rep)
                    for rep in range(spec.replications)
                ]
                for recs in _map_replications(_top_m_rep, args, spec.workers):
                    records.extend(recs)
            wall[f"n={n},d={d}"] = time.perf_counter() - t0
    return records, wall


def _run_tune(spec: ExperimentSpec):
    if spec.tune_candidates is None:
        raise InvalidSpecError("tune_histogram scenario needs tune_candidates")
    records, wall = [], {}
    for n in spec.n_values:
        for d in spec.d_values:
            for s in spec.s_values:
                t0 = time.perf_counter()
                _, model = _cell_model(spec, d, s)
                args = [
                    (spec, model, n, d, s, spec.tune_candidates, rep)
                    for rep in range(spec.replications)
                ]
                for recs in _map_replications(_tune_rep, args, spec.workers):
                    records.extend(recs)
                wall[f"n={n},d={d},s={s}"] = time.perf_counter() - t0
    return records, wall


def _run_fit_csv(spec: ExperimentSpec) -> ExperimentReport:
    if spec.input_path is None:
        raise InvalidSpecError("fit_csv scenario needs input_path")
    t0 = time.perf_counter()
    method = spec.methods[0]
    k = None
    if spec.k_values and spec.k_values[0] != "oracle":
        k = int(spec.k_values[0])
    report = fit_csv(
        spec.input_path,
        method=method,
        k=k,
        tune_candidates=spec.tune_candidates,
        tune_splits=spec.tune_splits,
        header=spec.header,
        eps=spec.eps,
        max_iter=spec.max_iter,
        lam=spec.fantope_lam,
        phi=spec.fantope_phi,
        seed=spec.base_seed,
    )
    records = []
    base = {
        "scenario": spec.scenario,
        "method": method,
        "n": report["n"],
        "d": report["d"],
        "k": report["k"],
        "seed": spec.base_seed,
    }
    for j, comp in enumerate(report["components"]):
        context = dict(base, component=j)
        records.append(MetricRecord("rayleigh", comp["rayleigh"], context))
        records.append(MetricRecord("support_size", float(len(comp["support"])), context))
    if report["leverage"] is not None:
        records.append(
            MetricRecord(
                "leverage_flag_count",
                float(len(report["leverage"]["flagged"])),
                dict(base),
            )
        )
    wall = {"fit_csv": time.perf_counter() - t0}
    return ExperimentReport(
        records=records, config=spec.to_dict(), wall_clock=wall, detail=report
    )


# ---------------------------------------------------------------------------
# CSV fitting front door
# ---------------------------------------------------------------------------

def fit_csv(
    path,
    method: str = "sspca",
    k: int | None = None,
    tune_candidates=None,
    tune_splits: int = 10,
    center: str = "auto",
    standardize: bool = False,
    header: bool = False,
    components: int = 2,
    leverage_threshold: float = 0.05,
    eps: float = 1e-6,
    max_iter: int = 1000,
    lam: float | None = None,
    phi: float | None = None,
    seed: int = 0,
) -> dict:
    """Fit one estimator to a CSV of observations and report components.

    Either give ``k`` directly or a ``tune_candidates`` grid to select it
    by sample splitting.  The report carries the top components, their
    supports and Rayleigh values, PC scores, and the hat-diagonal
    leverage flags of the PC1-on-PC2 regression when at least two
    components are requested.
    """
    if method not in METHODS:
        raise InvalidSpecError(f"unknown method {method!r}")
    x = read_data_csv(path, header=header)
    n, d = x.shape
    if standardize:
        std = x.std(axis=0, ddof=1) if n > 1 else None
        if std is None or np.any(std == 0.0):
            raise InvalidSpecError("cannot standardize: a column is constant")
        x = (x - x.mean(axis=0)) / std

    if center == "auto":
        center = "mean" if method == "tp" else "spatial"
    if center == "spatial":
        center_est = spatial_median(x)
    elif center == "mean":
        center_est = mean_center(x)
    elif center == "none":
        from .location import fixed_center

        center_est = fixed_center(np.zeros(d))
    else:
        raise InvalidSpecError(f"unknown center mode {center!r}")

    kind = _METHOD_SCATTER[method]
    if kind == "pearson":
        s_est = pearson(x)
    elif kind == "kendall":
        s_est = kendall_tau(x)
    else:
        s_est = sscm(x, center_est)

    tune_doc = None
    if k is None:
        if tune_candidates is None:
            k = d
        else:
            tcfg = TuneConfig(
                candidates=tuple(tune_candidates),
                splits=tune_splits,
                seed=seed,
                scatter=kind,
            )
            tuned = select_k(x, tcfg, SparsePCConfig(k=1, eps=eps, max_iter=max_iter))
            k = tuned.chosen_k
            tune_doc = tuned.to_dict()
    if not 1 <= k <= d:
        raise InvalidSpecError(f"k={k} outside [1, {d}]")

    spec_like = ExperimentSpec(
        scenario="fit_csv",
        methods=(method,),
        eps=eps,
        max_iter=max_iter,
        fantope_lam=lam,
        fantope_phi=phi,
        input_path=str(path),
        base_seed=seed,
    )
    configs = [_pc_config(spec_like, method, k, s_est.matrix, n) for _ in range(components)]
    try:
        sub = top_m_sparse_pcs(s_est.matrix, configs)
    except EmptySupportError:
        configs = [SparsePCConfig(k=k, eps=eps, max_iter=max_iter) for _ in range(components)]
        sub = top_m_sparse_pcs(s_est.matrix, configs)

    vectors = sub.vectors()
    scores = (x - center_est.center) @ vectors
    leverage_doc = None
    if components >= 2:
        try:
            h = leverage_influence(scores[:, 0], scores[:, 1])
            leverage_doc = {
                "threshold": leverage_threshold,
                "values": h.tolist(),
                "flagged": flag_leverage(h, leverage_threshold).tolist(),
                "total": float(h.sum()),
            }
        except SignPcaError:
            leverage_doc = None

    return {
        "method": method,
        "n": n,
        "d": d,
        "k": int(k),
        "standardized": bool(standardize),
        "center": {
            "method": center_est.method,
            "center": center_est.center.tolist(),
            "iterations": center_est.iterations,
            "residual": center_est.residual,
        },
        "tune": tune_doc,
        "components": [res.to_dict() for res in sub.components],
        "scores": scores.tolist(),
        "leverage": leverage_doc,
        "version": __version__,
    }


# ---------------------------------------------------------------------------
# Runtime benchmark
# ---------------------------------------------------------------------------

def bench_runtime(
    n_grid, d: int, methods=("sscm", "kendall"), repeats: int = 5, seed: int = 0
) -> list:
    """Median-of-`repeats` wall times of the scatter kernels per n.

    Times only the scatter computation on pregenerated standard Gaussian
    data (the spatial-sign estimator is timed about the known zero
    center, so the comparison isolates the kernels' n-scaling).  Returns
    raw per-repeat records plus one median record per cell.
    """
    records = []
    model = EllipticalModel(sigma=np.eye(d), seed=seed)
    for stream, n in enumerate(n_grid):
        x = sample(model, int(n), stream=stream)
        zero = np.zeros(d)
        for method in methods:
            kind = _METHOD_SCATTER.get(method, method)
            if kind == "sscm":
                fn = lambda: sscm(x, zero)
            elif kind == "kendall":
                fn = lambda: kendall_tau(x)
            elif kind == "pearson":
                fn = lambda: pearson(x)
            else:
                raise InvalidSpecError(f"unknown bench method {method!r}")
            fn()  # warm-up, excluded
            times = []
            for rep in range(repeats):
                t0 = time.perf_counter()
                fn()
                elapsed = time.perf_counter() - t0
                times.append(elapsed)
                records.append(
                    MetricRecord(
                        "runtime_seconds",
                        elapsed,
                        {"scenario": "runtime_bench", "method": kind, "n": int(n),
                         "d": d, "repeat": rep, "seed": seed},
                    )
                )
            records.append(
                MetricRecord(
                    "runtime_median_seconds",
                    float(np.median(times)),
                    {"scenario": "runtime_bench", "method": kind, "n": int(n),
                     "d": d, "seed": seed},
                )
            )
    return records
