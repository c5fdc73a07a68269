"""Limit laws of normalized maxima and estimation of the normalizing pair.

The maximum ``M_n`` of a stationary sequence with extremal index ``theta``
satisfies ``P(u_n (M_n - v_n) <= x) -> G_gamma(x) ** theta``. The limit law is
only identified up to an affine map. Pinning its median at 0 and the distance
between its ``t1`` and ``t2`` quantiles at 1 makes ``(u_n, v_n)`` estimable
from the subsampled distribution of block maxima::

    v = H^{<-}(1/2),    u = 1 / |H^{<-}(t2) - H^{<-}(t1)|

For the Chernick AR(1) model (``gamma = -1``, ``theta = (r-1)/r``) the pinned
limit ``K`` and matching theoretical normalizers have closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScaleError, InvalidParameterError, InvalidProbabilityError
from .subsample import (
    DEFAULT_GRID_POINTS,
    EstimatorCurve,
    Scheme,
    Statistic,
    validate_grid,
    curve_quantile,
    default_grid,
    rough_cdf,
    smooth_cdf,
    window_statistics,
)

__all__ = [
    "GUMBEL_THRESHOLD",
    "GevSpec",
    "NormalizationPair",
    "QuantilePinning",
    "MAXIMUM",
    "max_statistic",
    "gev_cdf",
    "limit_cdf_H",
    "ar1_constants",
    "ar1_limit_cdf_K",
    "ar1_limit_quantile_K",
    "estimate_normalizers",
    "normalizers_from_stats",
    "pilot_scale",
    "theoretical_normalizers_ar1",
    "normalized_cdf",
    "normalized_curve",
]

# |gamma| below this uses the Gumbel branch
GUMBEL_THRESHOLD = 1e-10


def max_statistic(window) -> float:
    window = np.asarray(window, dtype=float)
    if window.size == 0:
        raise InvalidParameterError("maximum of an empty window")
    return float(window.max())


MAXIMUM = Statistic("max", lambda w: np.max(w, axis=-1))


@dataclass(frozen=True)
class GevSpec:
    gamma: float
    theta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise InvalidParameterError(f"extremal index must lie in (0, 1], got {self.theta}")


@dataclass(frozen=True)
class QuantilePinning:
    t1: float = 0.25
    t2: float = 0.75

    def __post_init__(self):
        if not 0.0 < self.t1 < self.t2 < 1.0:
            raise InvalidParameterError(
                f"pinning levels need 0 < t1 < t2 < 1, got t1={self.t1}, t2={self.t2}")


@dataclass(frozen=True)
class NormalizationPair:
    """Affine normalization ``x -> u (x - v)``; its inverse is ``w(x) = v + x / u``."""

    u: float
    v: float
    provenance: str = "estimated"

    def __post_init__(self):
        if not self.u > 0 or not math.isfinite(self.u) or not math.isfinite(self.v):
            raise InvalidParameterError(f"need finite u > 0 and finite v, got u={self.u}, v={self.v}")
        if self.provenance not in ("estimated", "theoretical"):
            raise InvalidParameterError(f"unknown provenance {self.provenance!r}")

    def inverse(self, x):
        return self.v + np.asarray(x, dtype=float) / self.u


def _gev_exponent(gamma, x):
    # T(x) with G = exp(-T): exp(-x) for Gumbel, (1 + gamma x)_+^(-1/gamma) otherwise
    x = np.asarray(x, dtype=float)
    if abs(gamma) < GUMBEL_THRESHOLD:
        return np.exp(-x)
    gx = gamma * x
    inside = gx > -1.0
    safe = np.where(inside, gx, 0.0)
    t = np.exp(-np.log1p(safe) / gamma)
    outside = np.inf if gamma > 0 else 0.0
    return np.where(inside, t, outside)


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def gev_cdf(gamma: float, x):
    """Generalized extreme value CDF ``G_gamma``; vectorized in ``x``."""
    return _scalar(np.exp(-_gev_exponent(gamma, x)))


def limit_cdf_H(spec: GevSpec, x):
    """``G_gamma(x) ** theta``, the limit law of a maximum with extremal index theta."""
    return _scalar(np.exp(-spec.theta * _gev_exponent(spec.gamma, x)))


def ar1_constants(r: int, pin: QuantilePinning = QuantilePinning()):
    """``(theta, c, d)`` for the pinned AR(1) limit ``K(x) = H((x - d) / c)``.

    The log-ratio ``ln(t2 / t1)`` sets the quantile distance to 1; with the
    default levels 1/4 and 3/4 it is ``ln 3``.
    """
    if int(r) != r or r < 2:
        raise InvalidParameterError(f"r must be an integer >= 2, got {r}")
    theta = (r - 1) / r
    log_ratio = math.log(pin.t2 / pin.t1)
    c = theta / log_ratio
    d = (math.log(2.0) - theta) / log_ratio
    return theta, c, d


def ar1_limit_cdf_K(r: int, x, pin: QuantilePinning = QuantilePinning()):
    """Pinned limit law of the AR(1) maximum, equal to 1 beyond ``c + d``."""
    theta, c, d = ar1_constants(r, pin)
    x = np.asarray(x, dtype=float)
    # min() keeps the exponent at 0 past the endpoint; no overflow for huge x
    expo = -theta * (1.0 - np.minimum((x - d) / c, 1.0))
    return _scalar(np.exp(expo))


def ar1_limit_quantile_K(r: int, t, pin: QuantilePinning = QuantilePinning()):
    """Closed-form inverse ``K^{<-}(t) = d + c (1 + ln t / theta)``."""
    t = np.asarray(t, dtype=float)
    if np.any((t <= 0) | (t > 1)):
        raise InvalidProbabilityError("quantile levels must lie in (0, 1]")
    theta, c, d = ar1_constants(r, pin)
    return _scalar(d + c * (1.0 + np.log(t) / theta))


def estimate_normalizers(curve: EstimatorCurve, pin: QuantilePinning = QuantilePinning()) -> NormalizationPair:
    v = curve_quantile(curve, 0.5)
    spread = abs(curve_quantile(curve, pin.t2) - curve_quantile(curve, pin.t1))
    if spread == 0.0:
        raise DegenerateScaleError(
            f"quantiles at t1={pin.t1} and t2={pin.t2} coincide; scale is undefined")
    return NormalizationPair(u=1.0 / spread, v=v, provenance="estimated")


def theoretical_normalizers_ar1(n: int, r: int, pin: QuantilePinning = QuantilePinning()) -> NormalizationPair:
    """``u = c n`` and ``v = 1 - 1/n - d / (c n)``, targeting the pinned ``K``."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    _, c, d = ar1_constants(r, pin)
    return NormalizationPair(u=c * n, v=(1.0 - 1.0 / n) - d / (c * n), provenance="theoretical")


def _raw_curve(stats, kind, eps, b, scheme, grid_points):
    if kind == "smooth":
        grid = default_grid(stats, eps, grid_points)
        return EstimatorCurve(grid, smooth_cdf(stats, grid, eps), "smooth", b, scheme, eps)
    grid = default_grid(stats, 0.0, grid_points)
    return EstimatorCurve(grid, rough_cdf(stats, grid), "rough", b, scheme)


def normalizers_from_stats(stats, pin: QuantilePinning = QuantilePinning(), kind: str = "smooth",
                           epsilon: float = None, b: int = 1, scheme=Scheme.OVERLAPPING,
                           grid_points: int = DEFAULT_GRID_POINTS) -> NormalizationPair:
    """Estimate ``(u, v)`` from window maxima on the default raw grid."""
    curve = _raw_curve(np.asarray(stats, dtype=float), kind, epsilon, b, scheme, grid_points)
    return estimate_normalizers(curve, pin)


def pilot_scale(stats, pin: QuantilePinning = QuantilePinning(),
                grid_points: int = DEFAULT_GRID_POINTS) -> float:
    """Scale ``u`` estimated from the rough curve.

    Dividing a bandwidth given on the normalized scale by this value gives the
    bandwidth to use on the raw scale of the block maxima.
    """
    return normalizers_from_stats(stats, pin, "rough", grid_points=grid_points).u


def normalized_cdf(stats, x, norm: NormalizationPair, kind: str = "smooth", epsilon: float = None):
    """Raw-scale estimator over ``stats`` evaluated at ``v + x / u``."""
    points = norm.inverse(x)
    if kind == "smooth":
        return smooth_cdf(stats, points, epsilon)
    if kind == "rough":
        return rough_cdf(stats, points)
    raise InvalidParameterError(f"unknown estimator kind {kind!r}")


def normalized_curve(series, b: int, epsilon, scheme, norm: NormalizationPair, grid,
                     kind: str = "smooth", stat: Statistic = MAXIMUM) -> EstimatorCurve:
    """Subsampling estimator of the block maxima evaluated at ``v + x / u``.

    ``epsilon`` is the bandwidth on the raw scale of the maxima; it is ignored
    for the rough estimator.
    """
    grid = validate_grid(grid)
    stats = window_statistics(series, b, stat, scheme)
    values = normalized_cdf(stats, grid, norm, kind, epsilon)
    return EstimatorCurve(grid, values, kind, b, scheme, epsilon if kind == "smooth" else None)
