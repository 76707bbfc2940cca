"""Singular-value sequences of the diagonalised forward operator."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _numerics as num
from .csvio import read_indexed_csv, write_indexed_csv
from .errors import FormatError, InvalidArgumentError, OversmoothingWarning


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Singular values ``lambda_1 >= ... >= lambda_D > 0``.

    ``decay_exponent`` and ``decay_constant`` record a polynomial decay
    ``C^-1 i^-p <= lambda_i <= C i^-p`` when the spectrum was built from
    one; spectra read from disk carry no such metadata.
    """

    values: np.ndarray
    decay_exponent: float | None = None
    decay_constant: float | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size == 0:
            raise InvalidArgumentError("spectrum must have at least one value")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise InvalidArgumentError("singular values must be finite and strictly positive")
        if np.any(np.diff(vals) > 0):
            raise InvalidArgumentError("singular values must be nonincreasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if (self.decay_exponent is None) != (self.decay_constant is None):
            raise InvalidArgumentError("decay_exponent and decay_constant go together")
        if self.decay_exponent is not None:
            if self.decay_exponent < 0 or self.decay_constant < 1:
                raise InvalidArgumentError("need p >= 0 and C_A >= 1")
            if not psd_check(self, self.decay_exponent, self.decay_constant):
                raise InvalidArgumentError("values violate the stated polynomial decay")

    @property
    def dimension(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.dimension

    @cached_property
    def inverse_square_prefix(self) -> np.ndarray:
        """Prefix sums of ``lambda_i ** -2`` (index 0 is the empty sum)."""
        return num.compensated_cumsum(1.0 / (self.values * self.values))


def make_polynomial_spectrum(p: float, D: int) -> Spectrum:
    """Spectrum ``lambda_i = i ** -p`` for ``i = 1..D`` with ``C_A = 1``."""
    if int(D) != D or D < 1:
        raise InvalidArgumentError(f"D must be a positive integer, got {D}")
    if not p >= 0:
        raise InvalidArgumentError(f"p must be nonnegative, got {p}")
    idx = np.arange(1, int(D) + 1, dtype=float)
    vals = np.ones(int(D)) if p == 0 else np.exp(-p * np.log(idx))
    return Spectrum(vals, decay_exponent=float(p), decay_constant=1.0)


def normalize(s: Spectrum) -> Spectrum:
    """Divide by ``lambda_1`` so that the largest singular value is 1."""
    vals = s.values / s.values[0]
    p, c = s.decay_exponent, s.decay_constant
    if p is not None and not psd_check(Spectrum(vals), p, c):
        p = c = None
    return Spectrum(vals, decay_exponent=p, decay_constant=c)


def variance(s: Spectrum, delta: float, t: float) -> float:
    """Interpolated variance ``V_t`` of the cut-off estimator at level ``t``."""
    t = num.check_t(t, s.dimension)
    return delta * delta * num.head_interp(1.0 / (s.values * s.values), t)


def alpha_variance(s: Spectrum, delta: float, alpha: float, t: float) -> float:
    """Smoothed variance ``V_{t,alpha}``: weights ``lambda_i ** (2 alpha)``."""
    t = num.check_t(t, s.dimension)
    _check_alpha(alpha)
    return delta * delta * num.head_interp(num.spectral_power(s.values, 2 * alpha), t)


def variance_path(s: Spectrum, delta: float) -> np.ndarray:
    """``V_m`` for ``m = 0..D``."""
    return delta * delta * s.inverse_square_prefix


def alpha_variance_path(s: Spectrum, delta: float, alpha: float) -> np.ndarray:
    """``V_{m,alpha}`` for ``m = 0..D``."""
    _check_alpha(alpha)
    return delta * delta * num.compensated_cumsum(num.spectral_power(s.values, 2 * alpha))


def alpha_weight_total(s: Spectrum, alpha: float) -> float:
    """``sum_i lambda_i ** (2 alpha)``, correctly rounded."""
    return num.fsum(num.spectral_power(s.values, 2 * alpha))


def sd_std(s: Spectrum, alpha: float) -> float:
    """Standard-deviation scale ``s_D = sqrt(2 sum_i lambda_i ** (4 alpha))``."""
    _check_alpha(alpha)
    return math.sqrt(2.0 * num.fsum(num.spectral_power(s.values, 4 * alpha)))


def psd_check(s: Spectrum, p: float, C_A: float) -> bool:
    """True iff ``C_A^-1 i^-p <= lambda_i <= C_A i^-p`` for every ``i``."""
    idx = np.arange(1, s.dimension + 1, dtype=float)
    ref = np.ones(s.dimension) if p == 0 else np.exp(-p * np.log(idx))
    return bool(np.all(ref / C_A <= s.values) and np.all(s.values <= C_A * ref))


def warn_if_oversmoothing(alpha: float, p: float | None) -> None:
    if p is not None and alpha * p >= 0.5:
        warnings.warn(
            f"alpha * p = {alpha * p:g} >= 1/2: smoothed residual stopping oversmooths",
            OversmoothingWarning,
            stacklevel=3,
        )


def _check_alpha(alpha):
    if not alpha >= 0:
        raise InvalidArgumentError(f"alpha must be nonnegative, got {alpha}")


def load_spectrum(path) -> Spectrum:
    """Read a ``index,lambda`` CSV. Indices must run 1..D without gaps."""
    rows = read_indexed_csv(path, "lambda")
    try:
        return Spectrum(np.array(rows))
    except InvalidArgumentError as exc:
        raise FormatError(f"{path}: {exc}") from None


def save_spectrum(s: Spectrum, path) -> None:
    write_indexed_csv(path, "lambda", s.values)
