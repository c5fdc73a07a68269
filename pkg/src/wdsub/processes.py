"""Simulators for the weakly dependent test processes.

Two models are provided:

* the Chernick first-order autoregression ``X_t = (X_{t-1} + e_t) / r`` with
  innovations uniform on ``{0, ..., r-1}``. It is not strongly mixing, but its
  maximum has an explicit limit law;
* the LARCH recursion ``X_t = xi_t (1 + a X_{t-1})`` with Rademacher or
  parabolic inputs.

Random numbers come from numpy's counter-based Philox bit generator. The
integer seed goes through ``numpy.random.SeedSequence``, so a given
``(n, params, seed)`` produces the same series on every platform numpy supports.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import InvalidLengthError, InvalidParameterError

__all__ = [
    "TimeSeries",
    "Ar1Params",
    "LarchParams",
    "make_rng",
    "simulate_ar1",
    "ar1_recursion",
    "simulate_larch",
    "larch_recursion",
    "parabolic_cdf",
    "parabolic_ppf",
    "sample_parabolic",
    "simulate",
]


@dataclass(frozen=True)
class TimeSeries:
    """A finite realization ``X_1..X_n`` together with how it was generated."""

    values: np.ndarray
    model_tag: str = "data"
    seed: Optional[int] = None
    params: Optional[object] = field(default=None, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise InvalidLengthError("a time series needs at least one value")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("time series values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class Ar1Params:
    """Parameters of the Chernick AR(1) model.

    ``x0=None`` draws the start uniformly on [0, 1], which is the stationary
    law; a float in [0, 1] fixes it (mainly useful for tests).
    """

    r: int = 3
    x0: Optional[float] = None

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 2:
            raise InvalidParameterError(f"r must be an integer >= 2, got {self.r}")
        if self.x0 is not None and not 0.0 <= self.x0 <= 1.0:
            raise InvalidParameterError(f"fixed start must lie in [0, 1], got {self.x0}")

    @property
    def tag(self):
        return f"ar1(r={self.r})"


@dataclass(frozen=True)
class LarchParams:
    """Parameters of the LARCH model.

    ``rho=None`` selects Rademacher inputs, otherwise inputs follow the
    parabolic density ``0.5 (1 + rho) |x|^rho`` on [-1, 1]. ``a=0`` is accepted
    as a degenerate case (the output is then the input sequence).
    """

    a: float = 0.4
    rho: Optional[float] = None
    burn_in: int = 1000

    def __post_init__(self):
        if not 0.0 <= self.a < 1.0:
            raise InvalidParameterError(f"a must lie in (0, 1), got {self.a}")
        if self.rho is not None and not self.rho > -1.0:
            raise InvalidParameterError(f"rho must exceed -1, got {self.rho}")
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise InvalidParameterError(f"burn_in must be a nonnegative integer, got {self.burn_in}")

    @property
    def input_dist(self):
        return "rademacher" if self.rho is None else "parabolic"

    @property
    def tag(self):
        if self.rho is None:
            return f"larch(a={self.a},rademacher)"
        return f"larch(a={self.a},parabolic(rho={self.rho}))"


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator keyed by an unsigned integer seed."""
    if seed < 0:
        raise InvalidParameterError(f"seed must be unsigned, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def _check_length(n):
    if int(n) != n or n < 1:
        raise InvalidLengthError(f"series length must be >= 1, got {n}")
    return int(n)


def ar1_recursion(x0: float, innovations, r: int) -> np.ndarray:
    """Run ``X_t = (X_{t-1} + e_t) / r`` from ``x0`` over the given innovations."""
    out = np.empty(len(innovations))
    x = float(x0)
    for t, e in enumerate(np.asarray(innovations, dtype=float).tolist()):
        x = (x + e) / r
        out[t] = x
    return out


def simulate_ar1(n: int, params: Ar1Params = Ar1Params(), seed: int = 0) -> TimeSeries:
    n = _check_length(n)
    rng = make_rng(seed)
    x0 = rng.random() if params.x0 is None else params.x0
    innovations = rng.integers(0, params.r, size=n)
    values = ar1_recursion(x0, innovations, params.r)
    return TimeSeries(values, model_tag=params.tag, seed=seed, params=params)


def parabolic_cdf(x, rho: float):
    """CDF of the density ``0.5 (1 + rho) |x|^rho`` on [-1, 1]."""
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    return 0.5 + 0.5 * np.sign(x) * np.abs(x) ** (1.0 + rho)


def parabolic_ppf(u, rho: float):
    """Closed-form inverse of :func:`parabolic_cdf`."""
    s = 2.0 * np.asarray(u, dtype=float) - 1.0
    return np.sign(s) * np.abs(s) ** (1.0 / (1.0 + rho))


def sample_parabolic(rng: np.random.Generator, size, rho: float) -> np.ndarray:
    if not rho > -1.0:
        raise InvalidParameterError(f"rho must exceed -1, got {rho}")
    return parabolic_ppf(rng.random(size), rho)


def larch_recursion(inputs, a: float, x_start: float = 0.0) -> np.ndarray:
    """Run ``X_t = xi_t (1 + a X_{t-1})`` from ``x_start`` over the inputs."""
    out = np.empty(len(inputs))
    x = float(x_start)
    for t, xi in enumerate(np.asarray(inputs, dtype=float).tolist()):
        x = xi * (1.0 + a * x)
        out[t] = x
    return out


def simulate_larch(n: int, params: LarchParams = LarchParams(), seed: int = 0) -> TimeSeries:
    """Simulate LARCH from ``X = 0`` and keep the last ``n`` values after burn-in."""
    n = _check_length(n)
    rng = make_rng(seed)
    total = n + params.burn_in
    if params.rho is None:
        inputs = 2.0 * rng.integers(0, 2, size=total) - 1.0
    else:
        inputs = sample_parabolic(rng, total, params.rho)
    values = larch_recursion(inputs, params.a)[params.burn_in:]
    return TimeSeries(values, model_tag=params.tag, seed=seed, params=params)


def simulate(n: int, params: Union[Ar1Params, LarchParams], seed: int) -> TimeSeries:
    """Dispatch on the parameter type."""
    if isinstance(params, Ar1Params):
        return simulate_ar1(n, params, seed)
    if isinstance(params, LarchParams):
        return simulate_larch(n, params, seed)
    raise InvalidParameterError(f"unknown process parameters: {params!r}")
