"""Subsample windows and the smooth / rough subsampling CDF estimators.

Given one series ``X_1..X_n``, a block length ``b`` and a statistic ``s_b``,
the estimators average over the windows ``Y_{b,i}``::

    smooth(x) = 1/N sum_i phi((s_b(Y_{b,i}) - x) / eps)
    rough(x)  = 1/N sum_i 1{s_b(Y_{b,i}) <= x}

where ``phi`` is the ramp equal to 1 on (-inf, 0], 0 on [1, inf) and affine
in between.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    InvalidBandwidthError,
    InvalidBlockError,
    InvalidParameterError,
    InvalidProbabilityError,
    QuantileOutOfRangeError,
)

__all__ = [
    "Scheme",
    "WindowPlan",
    "Statistic",
    "EstimatorCurve",
    "make_windows",
    "window_matrix",
    "window_statistics",
    "ramp_kernel",
    "smooth_cdf",
    "rough_cdf",
    "default_grid",
    "smooth_estimate",
    "rough_estimate",
    "curve_quantile",
    "quantile_index",
    "validate_grid",
    "normalized_mean",
    "DEFAULT_GRID_POINTS",
]

DEFAULT_GRID_POINTS = 2001

# grid points per chunk when evaluating the smooth estimator
_CHUNK = 256


class Scheme(str, enum.Enum):
    OVERLAPPING = "overlapping"
    NONOVERLAPPING = "nonoverlapping"


@dataclass(frozen=True)
class WindowPlan:
    """Windows of length ``b`` over a series of length ``n``.

    Windows are indexed from 0. Overlapping window ``i`` covers the 0-based
    positions ``i .. i+b-1`` (``X_{i+1}..X_{i+b}``) for ``i < N = n - b``;
    the last window that would fit is deliberately not used. Non-overlapping
    window ``i`` covers ``i*b .. (i+1)*b - 1`` for ``i < N = n // b``.
    """

    n: int
    b: int
    scheme: Scheme
    count: int

    def window(self, i: int) -> slice:
        if not 0 <= i < self.count:
            raise IndexError(f"window {i} out of range for N={self.count}")
        if self.scheme is Scheme.OVERLAPPING:
            return slice(i, i + self.b)
        return slice(i * self.b, (i + 1) * self.b)

    def starts(self) -> np.ndarray:
        step = 1 if self.scheme is Scheme.OVERLAPPING else self.b
        return np.arange(self.count) * step


def make_windows(n: int, b: int, scheme=Scheme.OVERLAPPING) -> WindowPlan:
    scheme = Scheme(scheme)
    if int(b) != b or b < 1:
        raise InvalidBlockError(f"block length must be a positive integer, got {b}")
    if b >= n:
        raise InvalidBlockError(f"block length b={b} must be smaller than n={n}")
    count = n - b if scheme is Scheme.OVERLAPPING else n // b
    return WindowPlan(n=int(n), b=int(b), scheme=scheme, count=int(count))


def _as_values(series) -> np.ndarray:
    values = getattr(series, "values", series)
    return np.asarray(values, dtype=float)


def window_matrix(series, b: int, scheme=Scheme.OVERLAPPING) -> np.ndarray:
    """Read-only ``(N, b)`` view of the windows, one per row."""
    values = _as_values(series)
    plan = make_windows(values.size, b, scheme)
    if plan.scheme is Scheme.OVERLAPPING:
        return sliding_window_view(values, plan.b)[: plan.count]
    return values[: plan.count * plan.b].reshape(plan.count, plan.b)


@dataclass(frozen=True)
class Statistic:
    """A block statistic. ``func`` maps an ``(N, b)`` array to ``N`` values."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]

    def evaluate(self, window) -> float:
        window = np.asarray(window, dtype=float)
        if window.ndim != 1 or window.size == 0:
            raise InvalidParameterError("a window must be a nonempty 1-d sequence")
        return float(self.func(window[None, :])[0])

    def evaluate_many(self, windows: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(windows), dtype=float)


def normalized_mean(center: float = 0.0) -> Statistic:
    """``sqrt(b) * (mean(window) - center)``."""

    def func(w):
        return np.sqrt(w.shape[-1]) * (w.mean(axis=-1) - center)

    return Statistic(f"normalized-mean(center={center})", func)


def window_statistics(series, b: int, stat: Statistic, scheme=Scheme.OVERLAPPING) -> np.ndarray:
    """``s_b(Y_{b,i})`` for every window, in window order."""
    return stat.evaluate_many(window_matrix(series, b, scheme))


def ramp_kernel(t):
    """1 for ``t <= 0``, 0 for ``t >= 1`` and ``1 - t`` in between."""
    t = np.asarray(t, dtype=float)
    out = 1.0 - np.clip(t, 0.0, 1.0)
    return out if out.ndim else float(out)


def _check_bandwidth(eps):
    if not eps > 0 or not np.isfinite(eps):
        raise InvalidBandwidthError(f"bandwidth must be positive and finite, got {eps}")


def smooth_cdf(stats, points, eps: float) -> np.ndarray:
    """Smooth estimator over precomputed window statistics."""
    _check_bandwidth(eps)
    stats = np.asarray(stats, dtype=float)
    points = np.atleast_1d(np.asarray(points, dtype=float))
    out = np.empty(points.size)
    for lo in range(0, points.size, _CHUNK):
        x = points[lo:lo + _CHUNK, None]
        phi = ramp_kernel((stats[None, :] - x) / eps)
        # keeps smooth(x) <= rough(x + eps) exact under rounding
        phi[stats[None, :] > x + eps] = 0.0
        out[lo:lo + _CHUNK] = phi.mean(axis=1)
    return out


def rough_cdf(stats, points) -> np.ndarray:
    """Rough estimator: fraction of window statistics ``<= x``."""
    ordered = np.sort(np.asarray(stats, dtype=float))
    points = np.atleast_1d(np.asarray(points, dtype=float))
    return np.searchsorted(ordered, points, side="right") / ordered.size


def default_grid(stats, eps: float = 0.0, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """``points`` equally spaced values on ``[min - 3 eps, max + 3 eps]``."""
    lo = float(np.min(stats)) - 3.0 * eps
    hi = float(np.max(stats)) + 3.0 * eps
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    return np.linspace(lo, hi, points)


@dataclass(frozen=True)
class EstimatorCurve:
    """A CDF estimate evaluated on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    kind: str
    b: int
    scheme: Scheme
    epsilon: Optional[float] = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size == 0:
            raise InvalidParameterError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(grid) <= 0):
            raise InvalidParameterError("grid must be strictly increasing")
        if self.kind not in ("smooth", "rough"):
            raise InvalidParameterError(f"unknown estimator kind {self.kind!r}")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @property
    def spacing(self) -> float:
        """Largest gap between consecutive grid points."""
        return float(np.max(np.diff(self.grid))) if self.grid.size > 1 else 0.0


def validate_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise InvalidParameterError("grid must be a nonempty strictly increasing sequence")
    return grid


def smooth_estimate(series, b: int, epsilon: float, stat: Statistic,
                    scheme=Scheme.OVERLAPPING, grid=None,
                    grid_points: int = DEFAULT_GRID_POINTS) -> EstimatorCurve:
    _check_bandwidth(epsilon)
    stats = window_statistics(series, b, stat, scheme)
    grid = default_grid(stats, epsilon, grid_points) if grid is None else validate_grid(grid)
    return EstimatorCurve(grid, smooth_cdf(stats, grid, epsilon), "smooth", b, scheme, epsilon)


def rough_estimate(series, b: int, stat: Statistic, scheme=Scheme.OVERLAPPING, grid=None,
                   grid_points: int = DEFAULT_GRID_POINTS) -> EstimatorCurve:
    stats = window_statistics(series, b, stat, scheme)
    grid = default_grid(stats, 0.0, grid_points) if grid is None else validate_grid(grid)
    return EstimatorCurve(grid, rough_cdf(stats, grid), "rough", b, scheme)


def quantile_index(curve: EstimatorCurve, t: float) -> int:
    """Index of the first grid point where the curve reaches ``t``."""
    if not 0.0 < t < 1.0:
        raise InvalidProbabilityError(f"probability level must lie in (0, 1), got {t}")
    reached = curve.values >= t
    if not reached.any():
        raise QuantileOutOfRangeError(
            f"level {t} not reached on the grid (curve maximum {curve.values.max():.6g})")
    return int(np.argmax(reached))


def curve_quantile(curve: EstimatorCurve, t: float) -> float:
    """Generalized inverse on the grid: smallest grid ``x`` with ``curve(x) >= t``."""
    return float(curve.grid[quantile_index(curve, t)])
