"""Compensated summation and piecewise-linear interpolation helpers.

Prefix and suffix sums are accumulated with Neumaier's variant of Kahan
summation so that two different evaluation orders of the same identity
agree to ~1e-14 relative even for D ~ 1e5.
"""
import math

import numpy as np

from .errors import OutOfRangeError


def two_sum(a, b):
    """Error-free transformation: returns (s, e) with s + e == a + b exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def compensated_cumsum(values):
    """Return P with P[0] = 0 and P[m] = values[0] + ... + values[m-1]."""
    out = [0.0]
    total = 0.0
    comp = 0.0
    for v in np.asarray(values, dtype=float).tolist():
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out.append(total + comp)
    return np.array(out)


def compensated_suffix(values):
    """Return T with T[m] = values[m] + ... + values[n-1] and T[n] = 0.

    With 1-based coordinates this is T[m] = sum_{i > m}, the tail sum.
    """
    rev = compensated_cumsum(np.asarray(values, dtype=float)[::-1])
    return rev[::-1].copy()


def fsum(values):
    return math.fsum(np.asarray(values, dtype=float).tolist())


def spectral_power(values, exponent):
    """Elementwise ``values ** exponent`` for positive ``values``.

    Small integer exponents are evaluated by multiplication; all other
    exponents go through ``exp(exponent * log(values))`` so that every
    caller sees bit-identical weights for a given exponent.
    """
    values = np.asarray(values, dtype=float)
    if exponent == 0:
        return np.ones_like(values)
    if exponent == 1:
        return values.copy()
    if exponent == 2:
        return values * values
    if exponent == 3:
        return values * values * values
    if exponent == 4:
        sq = values * values
        return sq * sq
    return np.exp(exponent * np.log(values))


def check_t(t, dim):
    t = float(t)
    if not (0.0 <= t <= dim) or math.isnan(t):
        raise OutOfRangeError(f"t={t} outside [0, {dim}]")
    return t


def split_t(t):
    """Return (floor, ceil, frac) of a nonnegative real."""
    lo = math.floor(t)
    frac = t - lo
    hi = lo if frac == 0.0 else lo + 1
    return lo, hi, frac


def head_interp(weights, t):
    """sum_{i <= floor t} w_i + (t - floor t) w_{ceil t}, with 1-based w."""
    lo, hi, frac = split_t(t)
    total = fsum(weights[:lo])
    if frac:
        total += frac * float(weights[hi - 1])
    return total


def tail_interp(weights, t):
    """(ceil t - t) w_{ceil t} + sum_{i > ceil t} w_i, with 1-based w."""
    lo, hi, frac = split_t(t)
    total = fsum(weights[hi:])
    if frac:
        total += (hi - t) * float(weights[hi - 1])
    return total


def path_at(path, t):
    """Linear interpolation of a length D+1 integer-grid path at real t."""
    lo, hi, frac = split_t(t)
    if not frac:
        return float(path[lo])
    return float(path[lo]) + frac * (float(path[hi]) - float(path[lo]))


def first_crossing(upper, lower):
    """Continuous first crossing of two piecewise-linear paths.

    ``upper`` is nonincreasing and ``lower`` nondecreasing on the integer
    grid 0..D. Returns inf{t : upper(t) <= lower(t)}, solving the linear
    equation exactly on the first unit interval whose right end satisfies
    the inequality. Returns ``len - 1`` if no grid point qualifies.
    """
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    gap = upper - lower
    hits = np.flatnonzero(gap <= 0.0)
    if hits.size == 0:
        return float(len(gap) - 1)
    m = int(hits[0])
    if m == 0:
        return 0.0
    d0 = float(gap[m - 1])
    d1 = float(gap[m])
    frac = d0 / (d0 - d1)
    return (m - 1) + min(frac, 1.0)
