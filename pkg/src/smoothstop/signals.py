"""Signals in the singular basis and their bias / smoothness functionals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _numerics as num
from . import rng
from .csvio import read_indexed_csv, write_indexed_csv
from .errors import DimensionMismatchError, InvalidArgumentError, MissingSeedError
from .spectrum import Spectrum, _check_alpha

BENCHMARK_SIGNALS = ("supersmooth", "smooth3", "smooth21", "rough")

# smoothness label 2*beta attached to each built-in signal; metadata only
SMOOTHNESS_LABELS = {
    "supersmooth": math.inf,
    "smooth3": 3.0,
    "smooth21": 2.1,
    "rough": 0.5,
    "zero": math.inf,
}


@dataclass(frozen=True, eq=False)
class Signal:
    coefficients: np.ndarray
    label: str = "custom"
    seed: int | None = None

    def __post_init__(self):
        coef = np.array(self.coefficients, dtype=float).ravel()
        if coef.size == 0:
            raise InvalidArgumentError("signal must have at least one coefficient")
        if not np.all(np.isfinite(coef)):
            raise InvalidArgumentError("signal coefficients must be finite")
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    @property
    def dimension(self) -> int:
        return int(self.coefficients.size)

    def __len__(self):
        return self.dimension


@dataclass(frozen=True)
class SobolevBall:
    """The ellipsoid ``{mu : sum_i i^(2 beta) mu_i^2 <= r^2}`` in R^D."""

    beta: float
    radius: float
    dimension: int

    def __post_init__(self):
        if self.beta < 0 or self.radius <= 0 or self.dimension < 1:
            raise InvalidArgumentError("need beta >= 0, radius > 0, dimension >= 1")

    def __contains__(self, mu: Signal) -> bool:
        check_pair(mu, self.dimension)
        idx = np.arange(1, self.dimension + 1, dtype=float)
        weighted = num.fsum(idx ** (2 * self.beta) * mu.coefficients ** 2)
        return weighted <= self.radius ** 2


def check_pair(mu: Signal, dim) -> None:
    if isinstance(dim, Spectrum):
        dim = dim.dimension
    if mu.dimension != dim:
        raise DimensionMismatchError(f"signal has {mu.dimension} coefficients, expected {dim}")


def make_benchmark_signal(kind: str, D: int, seed: int | None = None) -> Signal:
    """Build one of the four benchmark signals (or ``"zero"``).

    ``smooth3`` draws ``U_1..U_D`` from the uniform stream keyed by
    ``seed``, in index order.
    """
    if int(D) != D or D < 1:
        raise InvalidArgumentError(f"D must be a positive integer, got {D}")
    i = np.arange(1, int(D) + 1, dtype=float)
    if kind == "supersmooth":
        coef = 5.0 * np.exp(-0.1 * i)
    elif kind == "smooth3":
        if seed is None:
            raise MissingSeedError("smooth3 needs a seed for its uniform draws")
        coef = 500.0 * np.abs(rng.uniforms(seed, int(D))) * i ** -2.05
    elif kind == "smooth21":
        coef = 5000.0 * np.abs(np.sin(0.01 * i)) * i ** -1.6
    elif kind == "rough":
        coef = 250.0 * np.abs(np.sin(0.002 * i)) * i ** -0.8
    elif kind == "zero":
        coef = np.zeros(int(D))
    else:
        raise InvalidArgumentError(f"unknown signal kind {kind!r}")
    return Signal(coef, label=kind, seed=seed if kind == "smooth3" else None)


def bias(mu: Signal, t: float) -> float:
    """Interpolated squared bias ``B^2_t`` of the cut-off estimator."""
    t = num.check_t(t, mu.dimension)
    return num.tail_interp(mu.coefficients ** 2, t)


def alpha_bias(mu: Signal, s: Spectrum, alpha: float, t: float) -> float:
    """Smoothed squared bias with weights ``lambda_i ** (2 + 2 alpha)``."""
    check_pair(mu, s)
    _check_alpha(alpha)
    t = num.check_t(t, mu.dimension)
    w = num.spectral_power(s.values, 2 + 2 * alpha)
    return num.tail_interp(w * mu.coefficients ** 2, t)


def bias_path(mu: Signal) -> np.ndarray:
    """``B^2_m`` for ``m = 0..D``."""
    return num.compensated_suffix(mu.coefficients ** 2)


def alpha_bias_path(mu: Signal, s: Spectrum, alpha: float) -> np.ndarray:
    """``B^2_{m,alpha}`` for ``m = 0..D``."""
    check_pair(mu, s)
    _check_alpha(alpha)
    w = num.spectral_power(s.values, 2 + 2 * alpha)
    return num.compensated_suffix(w * mu.coefficients ** 2)


def sobolev_radius(mu: Signal, beta: float) -> float:
    """Smallest ``r`` with ``mu`` in the Sobolev ellipsoid of smoothness ``beta``."""
    idx = np.arange(1, mu.dimension + 1, dtype=float)
    return math.sqrt(num.fsum(idx ** (2 * beta) * mu.coefficients ** 2))


def polished_tail_check(mu: Signal, rho: int, C0: float) -> bool:
    """Finite-horizon polished tail condition.

    Checks ``sum_{i >= m} mu_i^2 <= C0 sum_{i=m}^{rho m} mu_i^2`` for every
    ``m`` with ``rho * m <= D``; larger ``m`` would compare against a block
    that runs past the data.
    """
    if int(rho) != rho or rho < 2:
        raise InvalidArgumentError(f"rho must be an integer >= 2, got {rho}")
    rho = int(rho)
    sq = mu.coefficients ** 2
    suffix = num.compensated_suffix(sq)
    for m in range(1, mu.dimension // rho + 1):
        tail = suffix[m - 1]
        block = tail - suffix[rho * m]
        if tail > C0 * block:
            return False
    return True


def load_signal(path, label: str | None = None) -> Signal:
    """Read an ``index,mu`` CSV with contiguous indices starting at 1."""
    coef = read_indexed_csv(path, "mu")
    return Signal(np.array(coef), label=label or "file")


def save_signal(mu: Signal, path) -> None:
    write_indexed_csv(path, "mu", mu.coefficients)
