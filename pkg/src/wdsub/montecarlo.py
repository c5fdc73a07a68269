"""Monte Carlo replication of the normalized-maximum subsampling estimators.

Each replication simulates one series, builds the normalized subsampling
curve of its block maxima on a fixed grid, and the curves are summarized
pointwise by their mean and empirical quantiles. For the AR(1) model the
curves are also compared with the pinned limit ``K`` in sup norm.

Bandwidth scale
---------------
Block maxima of length ``b`` fluctuate on a scale of order ``1 / u_b``, which
is tiny compared with any fixed bandwidth. With ``bandwidth_scale="normalized"``
(the default) ``epsilon`` is read on the normalized scale: the raw bandwidth is
``epsilon / u`` where ``u`` is the theoretical scale or a pilot scale estimated
from the rough curve. With ``"raw"`` the bandwidth applies directly to the
maxima.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ExperimentFailedError, InvalidBandwidthError, InvalidBlockError, InvalidParameterError, WdsubError
from .extremes import (
    MAXIMUM,
    QuantilePinning,
    ar1_constants,
    ar1_limit_cdf_K,
    normalized_cdf,
    normalizers_from_stats,
    pilot_scale,
    theoretical_normalizers_ar1,
)
from .processes import Ar1Params, LarchParams, TimeSeries, simulate
from .subsample import DEFAULT_GRID_POINTS, EstimatorCurve, Scheme, window_statistics

__all__ = [
    "ExperimentConfig",
    "MonteCarloSummary",
    "default_experiment_grid",
    "replication_seed",
    "replication_curve",
    "run_experiment",
    "sup_distance",
    "bias_bound",
    "worker_count",
]

log = logging.getLogger(__name__)

MAX_FAILURE_RATE = 0.01


def default_experiment_grid(r: int = 3, pin: QuantilePinning = QuantilePinning(), points: int = 401) -> np.ndarray:
    """``points`` equally spaced values on ``[-3, c + d + 0.5]``."""
    _, c, d = ar1_constants(r, pin)
    return np.linspace(-3.0, c + d + 0.5, points)


@dataclass(frozen=True)
class ExperimentConfig:
    process: Union[Ar1Params, LarchParams] = field(default_factory=Ar1Params)
    n: int = 2000
    b: int = 50
    epsilon: float = 0.05
    scheme: Scheme = Scheme.OVERLAPPING
    estimator: str = "smooth"
    normalization: str = "estimated"
    pin: QuantilePinning = field(default_factory=QuantilePinning)
    replications: int = 1000
    grid: Optional[Sequence[float]] = None
    base_seed: int = 0
    bandwidth_scale: str = "normalized"
    raw_grid_points: int = DEFAULT_GRID_POINTS
    levels: tuple = (0.05, 0.95)

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.replications < 1:
            raise InvalidParameterError("need at least one replication")
        if not 1 <= self.b < self.n:
            raise InvalidBlockError(f"block length b={self.b} must satisfy 1 <= b < n={self.n}")
        if not self.epsilon > 0:
            raise InvalidBandwidthError(f"bandwidth must be positive, got {self.epsilon}")
        if self.estimator not in ("smooth", "rough"):
            raise InvalidParameterError(f"unknown estimator {self.estimator!r}")
        if self.normalization not in ("estimated", "theoretical"):
            raise InvalidParameterError(f"unknown normalization {self.normalization!r}")
        if self.normalization == "theoretical" and not isinstance(self.process, Ar1Params):
            raise InvalidParameterError("theoretical normalizers are only known for the AR(1) model")
        if self.bandwidth_scale not in ("normalized", "raw"):
            raise InvalidParameterError(f"unknown bandwidth scale {self.bandwidth_scale!r}")
        if not 0 < self.levels[0] <= self.levels[1] < 1:
            raise InvalidParameterError(f"bad quantile levels {self.levels}")
        if self.base_seed < 0:
            raise InvalidParameterError("base seed must be unsigned")
        grid = self.grid
        if grid is None:
            r = self.process.r if isinstance(self.process, Ar1Params) else 3
            grid = default_experiment_grid(r, self.pin)
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise InvalidParameterError("grid must be strictly increasing")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @property
    def reference(self) -> Optional[Callable]:
        """Limit CDF to compare against, when one is known."""
        if isinstance(self.process, Ar1Params):
            return partial(ar1_limit_cdf_K, self.process.r, pin=self.pin)
        return None

    def to_dict(self) -> dict:
        p = self.process
        if isinstance(p, Ar1Params):
            process = {"model": "ar1", "r": p.r, "x0": p.x0}
        else:
            process = {"model": "larch", "a": p.a, "input": p.input_dist, "rho": p.rho, "burn_in": p.burn_in}
        return {
            "process": process,
            "n": self.n,
            "b": self.b,
            "epsilon": self.epsilon,
            "scheme": self.scheme.value,
            "estimator": self.estimator,
            "normalization": self.normalization,
            "t1": self.pin.t1,
            "t2": self.pin.t2,
            "replications": self.replications,
            "base_seed": self.base_seed,
            "bandwidth_scale": self.bandwidth_scale,
            "raw_grid_points": self.raw_grid_points,
            "levels": list(self.levels),
        }


@dataclass(frozen=True)
class MonteCarloSummary:
    config: ExperimentConfig
    grid: np.ndarray
    mean: np.ndarray
    q_low: np.ndarray
    q_high: np.ndarray
    sup_distance_stats: Optional[dict]
    replications_used: int
    failures: list = field(default_factory=list)

    @property
    def reference_values(self) -> Optional[np.ndarray]:
        ref = self.config.reference
        return None if ref is None else np.asarray(ref(self.grid))

    def band_width(self) -> np.ndarray:
        return self.q_high - self.q_low


def replication_seed(base_seed: int, index: int) -> int:
    """Seed of replication ``index``: ``(base_seed, index)`` mixed by numpy's SeedSequence."""
    ss = np.random.SeedSequence([int(base_seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def replication_curve(series: TimeSeries, config: ExperimentConfig) -> tuple:
    """Normalized curve of one series on ``config.grid`` and the pair used.

    Raises the underlying estimation error (for instance a degenerate scale)
    unchanged.
    """
    stats = window_statistics(series, config.b, MAXIMUM, config.scheme)
    kind = config.estimator
    norm = None
    scale = 1.0
    if config.normalization == "theoretical":
        norm = theoretical_normalizers_ar1(config.b, config.process.r, config.pin)
        scale = norm.u
    elif kind == "smooth" and config.bandwidth_scale == "normalized":
        scale = pilot_scale(stats, config.pin, config.raw_grid_points)
    h = config.epsilon / scale if config.bandwidth_scale == "normalized" else config.epsilon
    if norm is None:
        norm = normalizers_from_stats(stats, config.pin, kind, h, config.b, config.scheme,
                                      config.raw_grid_points)
    values = normalized_cdf(stats, config.grid, norm, kind, h)
    curve = EstimatorCurve(config.grid, values, kind, config.b, config.scheme,
                           h if kind == "smooth" else None)
    return curve, norm


def _one(config: ExperimentConfig, index: int):
    seed = replication_seed(config.base_seed, index)
    try:
        series = simulate(config.n, config.process, seed)
        curve, _ = replication_curve(series, config)
    except WdsubError as exc:
        return index, None, f"{type(exc).__name__}: {exc}"
    return index, curve.values, None


def worker_count(workers: Optional[int] = None) -> int:
    """Explicit count, else ``WDSUB_THREADS`` (0 or unset means one per CPU)."""
    if workers is None:
        workers = int(os.environ.get("WDSUB_THREADS", "0") or 0)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def sup_distance(curve: EstimatorCurve, reference: Callable) -> float:
    """Largest absolute gap between the curve and ``reference`` over the grid."""
    return float(np.max(np.abs(curve.values - np.asarray(reference(curve.grid), dtype=float))))


def bias_bound(r_b: float, epsilon: float, k_prime_sup: float) -> float:
    """Upper bound ``r_b + epsilon * sup|K'|`` on the smooth estimator's bias."""
    if r_b < 0 or epsilon < 0 or k_prime_sup < 0:
        raise InvalidParameterError("bias bound inputs must be nonnegative")
    return r_b + epsilon * k_prime_sup


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> MonteCarloSummary:
    """Run all replications and summarize them pointwise.

    Failed replications are dropped and listed in ``failures``. If more than 1%
    fail, :class:`ExperimentFailedError` is raised.
    """
    workers = min(worker_count(workers), config.replications)
    indices = range(config.replications)
    if workers == 1:
        results = [_one(config, j) for j in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(partial(_one, config), indices))

    failures = [(j, msg) for j, _, msg in results if msg is not None]
    if len(failures) > MAX_FAILURE_RATE * config.replications:
        raise ExperimentFailedError(len(failures), config.replications, failures)
    for j, msg in failures:
        log.warning("replication %d excluded: %s", j, msg)

    curves = np.stack([values for _, values, msg in results if msg is None])
    lo, hi = config.levels
    q_low = np.quantile(curves, lo, axis=0, method="inverted_cdf")
    q_high = np.quantile(curves, hi, axis=0, method="inverted_cdf")
    sup_stats = None
    ref = config.reference
    if ref is not None:
        dist = np.max(np.abs(curves - np.asarray(ref(config.grid))[None, :]), axis=1)
        sup_stats = {"mean": float(np.mean(dist)), "max": float(np.max(dist))}
    return MonteCarloSummary(
        config=config,
        grid=config.grid,
        mean=np.mean(curves, axis=0),
        q_low=q_low,
        q_high=q_high,
        sup_distance_stats=sup_stats,
        replications_used=curves.shape[0],
        failures=failures,
    )
