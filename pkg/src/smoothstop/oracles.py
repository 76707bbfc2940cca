"""Deterministic oracle truncation indices and minimax reference quantities.

All curves involved (bias, variance and their smoothed versions) are
affine between consecutive integers, so every crossing is found by
scanning the integer grid and solving one linear equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _numerics as num
from .errors import InvalidArgumentError, OutOfRangeError
from .signals import Signal, alpha_bias, alpha_bias_path, bias_path, check_pair
from .spectrum import (
    Spectrum,
    alpha_variance,
    alpha_variance_path,
    alpha_weight_total,
    variance_path,
)
from .stopping import StoppingConfig


@dataclass(frozen=True)
class OracleReport:
    classical: int
    classical_risk: float
    balanced: float
    alpha_balanced: float
    proxy: float
    discrete_balanced: int
    alpha: float = 0.0

    def as_row(self, signal_label):
        return [
            signal_label,
            self.alpha,
            self.classical,
            self.classical_risk,
            self.balanced,
            self.alpha_balanced,
            self.proxy,
            self.discrete_balanced,
        ]


REPORT_COLUMNS = [
    "signal",
    "alpha",
    "t_classical",
    "risk_classical",
    "t_balanced",
    "t_alpha_balanced",
    "t_proxy",
    "m_balanced",
]


def classical_oracle(s: Spectrum, mu: Signal, delta: float) -> tuple[int, float]:
    """Integer minimiser of the risk and the minimal risk (smallest index on ties)."""
    check_pair(mu, s)
    path = bias_path(mu) + variance_path(s, delta)
    m = int(np.argmin(path))
    return m, float(path[m])


def balanced_oracle(s: Spectrum, mu: Signal, delta: float) -> float:
    """First ``t`` with squared bias no larger than variance."""
    check_pair(mu, s)
    return num.first_crossing(bias_path(mu), variance_path(s, delta))


def alpha_balanced_oracle(s: Spectrum, mu: Signal, delta: float, alpha: float) -> float:
    """Balanced oracle for the smoothed bias and variance."""
    check_pair(mu, s)
    return num.first_crossing(alpha_bias_path(mu, s, alpha), alpha_variance_path(s, delta, alpha))


def oracle_proxy(s: Spectrum, mu: Signal, delta: float, cfg: StoppingConfig) -> float:
    """First ``t`` at which the expected smoothed residual drops to ``kappa``.

    Evaluated as the crossing of ``B^2_{t,alpha} + (K - kappa)`` with
    ``V_{t,alpha}``, ``K`` the default critical value, which is the same
    condition rearranged; for ``kappa == K`` it coincides bit-for-bit with
    :func:`alpha_balanced_oracle`.
    """
    check_pair(mu, s)
    shift = delta * delta * alpha_weight_total(s, cfg.alpha) - cfg.kappa
    upper = alpha_bias_path(mu, s, cfg.alpha) + shift
    return num.first_crossing(upper, alpha_variance_path(s, delta, cfg.alpha))


def expected_residual(s: Spectrum, mu: Signal, delta: float, alpha: float, t: float) -> float:
    """``E R^2_{t,alpha} = B^2_{t,alpha} + sum_i lambda_i^(2 alpha) delta^2 - V_{t,alpha}``."""
    check_pair(mu, s)
    t = num.check_t(t, s.dimension)
    if t == s.dimension:
        return 0.0
    total = delta * delta * alpha_weight_total(s, alpha)
    return alpha_bias(mu, s, alpha, t) + (total - alpha_variance(s, delta, alpha, t))


def expected_residual_path(s: Spectrum, mu: Signal, delta: float, alpha: float) -> np.ndarray:
    """``E R^2_{m,alpha}`` for ``m = 0..D``, the noise part as a tail sum."""
    check_pair(mu, s)
    noise_tail = delta * delta * num.compensated_suffix(num.spectral_power(s.values, 2 * alpha))
    return alpha_bias_path(mu, s, alpha) + noise_tail


def discrete_balanced_index(s: Spectrum, mu: Signal, delta: float) -> int:
    """Smallest integer ``m`` with ``B^2_m <= V_m``."""
    check_pair(mu, s)
    hits = np.flatnonzero(bias_path(mu) <= variance_path(s, delta))
    return int(hits[0])


def oracle_report(s: Spectrum, mu: Signal, delta: float, cfg: StoppingConfig) -> OracleReport:
    tc, rc = classical_oracle(s, mu, delta)
    return OracleReport(
        classical=tc,
        classical_risk=rc,
        balanced=balanced_oracle(s, mu, delta),
        alpha_balanced=alpha_balanced_oracle(s, mu, delta, cfg.alpha),
        proxy=oracle_proxy(s, mu, delta, cfg),
        discrete_balanced=discrete_balanced_index(s, mu, delta),
        alpha=cfg.alpha,
    )


def _check_rd(r, delta):
    if not (r > 0 and delta > 0):
        raise InvalidArgumentError(f"need r > 0 and delta > 0, got r={r}, delta={delta}")


def minimax_index(beta: float, p: float, r: float, delta: float) -> float:
    """``(r^2 / delta^2) ** (1 / (2 beta + 2 p + 1))``."""
    _check_rd(r, delta)
    return (r * r / (delta * delta)) ** (1.0 / (2 * beta + 2 * p + 1))


def alpha_minimax_index(beta: float, p: float, r: float, delta: float, alpha: float) -> float:
    """Smoothed analogue of :func:`minimax_index` with three ``alpha p`` regimes.

    At ``alpha p == 1/2`` a log correction appears, which needs
    ``r / delta > 1``.
    """
    _check_rd(r, delta)
    snr = r * r / (delta * delta)
    ap = alpha * p
    if ap < 0.5:
        return ((1 - 2 * ap) * snr) ** (1.0 / (2 * beta + 2 * p + 1))
    if ap == 0.5:
        if snr <= 1:
            raise OutOfRangeError("log-corrected index needs r^2 / delta^2 > 1")
        return (snr / math.log(snr)) ** (1.0 / (2 * beta + 2 * p + 1))
    return snr ** (1.0 / (2 * beta + 2 * p + 2 * ap))


def minimax_rate(beta: float, p: float, r: float, delta: float) -> float:
    """``r^2 (delta^2 / r^2) ** (2 beta / (2 beta + 2 p + 1))``."""
    _check_rd(r, delta)
    return r * r * (delta * delta / (r * r)) ** (2 * beta / (2 * beta + 2 * p + 1))


def smoothing_rate(beta: float, p: float, r: float, delta: float, alpha: float) -> float:
    """Worst-case rate attained by smoothed residual stopping at index ``alpha``."""
    _check_rd(r, delta)
    x = delta * delta / (r * r)
    ap = alpha * p
    if ap < 0.5:
        return r * r * (x / (1 - 2 * ap)) ** (2 * beta / (2 * beta + 2 * p + 1))
    if ap == 0.5:
        if x >= 1:
            raise OutOfRangeError("log-corrected rate needs r^2 / delta^2 > 1")
        return r * r * (x * math.log(1 / x)) ** (2 * beta / (2 * beta + 2 * p + 1))
    return r * r * x ** (2 * beta / (2 * beta + 2 * p + 2 * ap))
