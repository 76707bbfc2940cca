"""Smoothed residuals and the residual-based early stopping rule.

The stopping index is ``tau = min{m : R^2_{m,alpha} <= kappa}`` where

    R^2_{m,alpha} = sum_{i > m} lambda_i^(2 alpha) Y_i^2.

Residuals are produced lazily, one per truncation level, by subtracting
``lambda_{m+1}^(2 alpha) Y_{m+1}^2`` from the previous value. The running
value is carried as an unevaluated double-double sum (``hi + lo``) and
re-anchored to an exact tail sum after every drop of ~15 decades, so the
update stays accurate to ~1e-16 relative to the *current* residual.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import _numerics as num
from .errors import InvalidArgumentError, OutOfRangeError, ZeroCriticalValueWarning
from .estimator import _check_obs
from .observation import Observation
from .spectrum import Spectrum, _check_alpha, alpha_weight_total, sd_std


@dataclass(frozen=True)
class StoppingConfig:
    alpha: float
    kappa: float
    c_kappa: float = 1.0

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise InvalidArgumentError(f"kappa must be finite and nonnegative, got {self.kappa}")
        if not self.c_kappa > 0:
            raise InvalidArgumentError(f"c_kappa must be positive, got {self.c_kappa}")

    @classmethod
    def default(cls, s: Spectrum, delta: float, alpha: float, c_kappa: float = 1.0):
        """Config with ``kappa`` equal to the pure-noise residual expectation."""
        return cls(alpha, default_kappa(s, alpha, delta), c_kappa)


def residual_terms(obs: Observation, s: Spectrum, alpha: float) -> np.ndarray:
    """``lambda_i^(2 alpha) Y_i^2`` for ``i = 1..D``."""
    _check_obs(obs, s)
    _check_alpha(alpha)
    return num.spectral_power(s.values, 2 * alpha) * obs.y * obs.y


def smoothed_residual(obs: Observation, s: Spectrum, alpha: float, m: int) -> float:
    """``R^2_{m,alpha}`` by direct (correctly rounded) summation of the tail."""
    if int(m) != m or not 0 <= m <= s.dimension:
        raise OutOfRangeError(f"m={m} outside 0..{s.dimension}")
    return num.fsum(residual_terms(obs, s, alpha)[int(m):])


def iter_residuals(obs: Observation, s: Spectrum, alpha: float) -> Iterator[float]:
    """Yield ``R^2_{0,alpha}, R^2_{1,alpha}, ...`` using O(1) work per step."""
    return residuals_from_terms(residual_terms(obs, s, alpha))


# re-anchor once the residual has shrunk by this factor since the last exact sum
_REANCHOR = 2.0 ** -50


def residuals_from_terms(terms) -> Iterator[float]:
    """Tail sums of ``terms`` from the full sum down to 0, one per step.

    The double-double accumulator keeps ~32 significant digits relative
    to the value it was last set from. When the running residual falls
    below ``_REANCHOR`` times that value it is reset to the exact tail
    sum, so the relative error stays near 1e-16 however many orders of
    magnitude the residual spans.
    """
    terms = np.asarray(terms, dtype=float).tolist()
    hi = math.fsum(terms)
    lo = math.fsum(terms + [-hi])
    anchor = hi
    prev = hi + lo
    yield prev
    last = len(terms) - 1
    for m, t in enumerate(terms):
        if m == last:
            yield 0.0
            return
        # (hi, lo) -= t as a double-double
        s_ = hi - t
        bb = s_ - hi
        err = (hi - (s_ - bb)) + (-t - bb)
        lo += err
        hi = s_ + lo
        lo -= hi - s_
        if hi < anchor * _REANCHOR:
            tail = terms[m + 1:]
            hi = math.fsum(tail)
            lo = math.fsum(tail + [-hi])
            anchor = hi
        cur = hi + lo
        if cur > prev:
            cur = prev
        elif cur < 0.0:
            cur = 0.0
        prev = cur
        yield cur


def residual_path(obs: Observation, s: Spectrum, alpha: float) -> np.ndarray:
    """All ``D + 1`` smoothed residuals computed by the incremental update."""
    return np.fromiter(iter_residuals(obs, s, alpha), dtype=float, count=s.dimension + 1)


def default_kappa(s: Spectrum, alpha: float, delta: float) -> float:
    """``sum_i lambda_i^(2 alpha) delta^2``, the expected residual at ``m = 0`` for ``mu = 0``."""
    _check_alpha(alpha)
    return delta * delta * alpha_weight_total(s, alpha)


def validate_kappa(cfg: StoppingConfig, s: Spectrum, delta: float) -> bool:
    """Whether ``kappa`` lies within ``c_kappa * s_D * delta^2`` of the default."""
    gap = abs(cfg.kappa - default_kappa(s, cfg.alpha, delta))
    return gap <= cfg.c_kappa * sd_std(s, cfg.alpha) * delta * delta


def first_below(residuals: Iterable[float], kappa: float) -> int:
    """Index of the first value ``<= kappa``; stops pulling from the iterator there."""
    for m, r in enumerate(residuals):
        if r <= kappa:
            return m
    raise InvalidArgumentError("residual sequence never fell below kappa")


def stopping_time(obs: Observation, s: Spectrum, cfg: StoppingConfig) -> int:
    """The smoothed residual stopping index ``tau_alpha`` in ``0..D``."""
    if cfg.kappa == 0:
        warnings.warn(
            "kappa = 0 only stops once the residual vanishes exactly",
            ZeroCriticalValueWarning,
            stacklevel=2,
        )
    return first_below(iter_residuals(obs, s, cfg.alpha), cfg.kappa)


def smoothing_regime(alpha: float, p: float) -> str:
    """Name of the regime ``alpha * p`` falls in."""
    ap = alpha * p
    if ap < 0.25:
        return "undersmoothing"
    if ap < 0.5:
        return "constant-loss"
    return "oversmoothing"


def natural_alpha(p: float) -> float:
    """``1 / (4 p)``: smallest index removing the dimension-dependent error."""
    if not p > 0:
        raise InvalidArgumentError("natural smoothing index needs p > 0")
    return 1.0 / (4.0 * p)


def adaptive_alpha(beta_min: float, beta_max: float, p: float) -> float:
    """Smallest ``alpha`` in ``[0, 1/(4p))`` adapting over ``[beta_min, beta_max]``.

    Solves ``2 beta_max + 2p + 1 <= (1 - 2 alpha p) / (1/2 - 2 alpha p)
    * (2 beta_min + 2p + 1)`` for the least ``alpha``.
    """
    if not p > 0:
        raise InvalidArgumentError("need p > 0")
    if beta_min < 0 or beta_max < beta_min:
        raise InvalidArgumentError("need 0 <= beta_min <= beta_max")
    c = (2 * beta_max + 2 * p + 1) / (2 * beta_min + 2 * p + 1)
    if c <= 2.0:
        return 0.0
    x = (c / 2.0 - 1.0) / (c - 1.0)
    return x / (2.0 * p)
