"""Truncated-SVD (spectral cut-off) estimators and their exact risks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _numerics as num
from . import rng
from .errors import DimensionMismatchError, MissingNoiseError, OutOfRangeError
from .observation import Observation
from .signals import Signal, bias, bias_path, check_pair
from .spectrum import Spectrum, variance, variance_path


@dataclass(frozen=True, eq=False)
class Estimate:
    coefficients: np.ndarray
    truncation: float
    randomization: int | None = None


def _check_obs(obs: Observation, s: Spectrum):
    if obs.dimension != s.dimension:
        raise DimensionMismatchError(
            f"observation has {obs.dimension} entries, spectrum {s.dimension}"
        )


def truncated_estimate(obs: Observation, s: Spectrum, m: int) -> Estimate:
    """Keep ``Y_i / lambda_i`` for ``i <= m`` and zero the rest."""
    _check_obs(obs, s)
    if int(m) != m or not 0 <= m <= s.dimension:
        raise OutOfRangeError(f"m={m} outside 0..{s.dimension}")
    m = int(m)
    coef = np.zeros(s.dimension)
    coef[:m] = obs.y[:m] / s.values[:m]
    return Estimate(coef, float(m))


def continuous_estimate(
    obs: Observation, s: Spectrum, t: float, rand_seed: int, xi: int | None = None
) -> Estimate:
    """Randomised cut-off at a real level ``t``.

    The ``ceil(t)``-th coefficient is kept with probability ``t - floor(t)``,
    decided by a Bernoulli draw from ``rand_seed`` unless ``xi`` forces the
    outcome. Integer ``t`` reduces to :func:`truncated_estimate`.
    """
    _check_obs(obs, s)
    t = num.check_t(t, s.dimension)
    lo, hi, frac = num.split_t(t)
    if not frac:
        return truncated_estimate(obs, s, lo)
    if xi is None:
        xi = rng.bernoulli(rand_seed, frac)
    coef = np.zeros(s.dimension)
    keep = hi if xi else lo
    coef[:keep] = obs.y[:keep] / s.values[:keep]
    return Estimate(coef, t, int(bool(xi)))


def squared_loss(est: Estimate, mu: Signal) -> float:
    """``||mu_hat - mu||^2``."""
    if est.coefficients.size != mu.dimension:
        raise DimensionMismatchError("estimate and signal lengths differ")
    return num.fsum((est.coefficients - mu.coefficients) ** 2)


def risk(s: Spectrum, mu: Signal, delta: float, t: float) -> float:
    """Exact risk ``B^2_t + V_t`` of the (randomised) cut-off at level ``t``."""
    check_pair(mu, s)
    return bias(mu, t) + variance(s, delta, t)


def risk_path(s: Spectrum, mu: Signal, delta: float) -> np.ndarray:
    """Risk at every integer truncation ``m = 0..D``."""
    check_pair(mu, s)
    return bias_path(mu) + variance_path(s, delta)


def stochastic_error(eps, s: Spectrum, delta: float, t: float) -> float:
    """Realised stochastic error ``S_t``: variance weights times ``eps_i^2``.

    ``eps`` may be the noise vector itself or an :class:`Observation`.
    """
    if isinstance(eps, Observation):
        eps = eps.noise
    if eps is None:
        raise MissingNoiseError("observation did not retain its noise vector")
    eps = np.asarray(eps, dtype=float)
    if eps.size != s.dimension:
        raise DimensionMismatchError("noise and spectrum lengths differ")
    t = num.check_t(t, s.dimension)
    return delta * delta * num.head_interp(eps * eps / (s.values * s.values), t)
