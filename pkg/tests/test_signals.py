import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothstop import (
    Signal,
    SobolevBall,
    Spectrum,
    alpha_bias,
    bias,
    load_signal,
    make_benchmark_signal,
    make_polynomial_spectrum,
    polished_tail_check,
    save_signal,
    sobolev_radius,
)
from smoothstop.errors import (
    DimensionMismatchError,
    FormatError,
    InvalidArgumentError,
    MissingSeedError,
)
from smoothstop.signals import alpha_bias_path, bias_path


@pytest.mark.parametrize(
    "kind, i, expected",
    [
        ("supersmooth", 1, 4.524187090179798),
        ("smooth21", 100, 2.654661490157617),
        ("rough", 1, 0.49999966666673333),
    ],
)
def test_benchmark_signal_values(kind, i, expected):
    mu = make_benchmark_signal(kind, 200)
    assert mu.coefficients[i - 1] == pytest.approx(expected, rel=1e-14)
    assert mu.label == kind


def test_smooth3_needs_seed_and_is_reproducible():
    with pytest.raises(MissingSeedError):
        make_benchmark_signal("smooth3", 10)
    a = make_benchmark_signal("smooth3", 50, seed=5)
    b = make_benchmark_signal("smooth3", 50, seed=5)
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    i = np.arange(1, 51)
    u = a.coefficients * i ** 2.05 / 500
    assert np.all((u > 0) & (u < 1))
    assert a.seed == 5


def test_unknown_kind():
    with pytest.raises(InvalidArgumentError):
        make_benchmark_signal("wiggly", 10)


def test_signal_rejects_nonfinite():
    with pytest.raises(InvalidArgumentError):
        Signal([1.0, math.nan])


@pytest.mark.parametrize("t, expected", [(1.5, 3.0), (0, 14.0), (3, 0.0), (2, 1.0)])
def test_bias_examples(t, expected):
    assert bias(Signal([3, 2, 1]), t) == expected


def test_bias_zero_signal():
    assert bias(Signal(np.zeros(5)), 2.3) == 0.0


def test_alpha_bias_examples():
    assert alpha_bias(Signal([3, 2, 1]), Spectrum([1, 1, 1]), 0.7, 1.5) == 3.0
    assert alpha_bias(Signal([0, 2]), Spectrum([1, 0.5]), 1.0, 1) == 0.25
    s = make_polynomial_spectrum(0.5, 100)
    mu = make_benchmark_signal("supersmooth", 100)
    # mpmath direct summation over i = 11..100
    assert alpha_bias(mu, s, 0.5, 10) == pytest.approx(0.2861298732514332, rel=1e-13)


def test_alpha_bias_dimension_check():
    with pytest.raises(DimensionMismatchError):
        alpha_bias(Signal([1, 2]), Spectrum([1, 1, 1]), 0.5, 1)


@settings(max_examples=50)
@given(st.floats(0, 40), st.floats(0, 3))
def test_bias_nonincreasing_and_piecewise_linear(t, alpha):
    mu = make_benchmark_signal("rough", 40)
    s = make_polynomial_spectrum(0.5, 40)
    lo, hi = math.floor(t), math.ceil(t)
    slack = 1e-14 * bias(mu, 0)
    assert bias(mu, hi) - slack <= bias(mu, t) <= bias(mu, lo) + slack
    frac = t - lo
    lin = (1 - frac) * alpha_bias(mu, s, alpha, lo) + frac * alpha_bias(mu, s, alpha, hi)
    assert alpha_bias(mu, s, alpha, t) == pytest.approx(lin, rel=1e-12, abs=1e-300)
    assert alpha_bias(mu, s, alpha, t) <= bias(mu, t) * (1 + 1e-13)


def test_paths_match_pointwise():
    mu = make_benchmark_signal("smooth21", 60)
    s = make_polynomial_spectrum(0.5, 60)
    bp, ap = bias_path(mu), alpha_bias_path(mu, s, 0.3)
    for m in range(61):
        assert bp[m] == bias(mu, m)
        assert ap[m] == alpha_bias(mu, s, 0.3, m)


@pytest.mark.parametrize(
    "coef, beta, expected",
    [([1, 1], 1.0, math.sqrt(5)), ([0, 0, 0], 2.0, 0.0), ([0.5], 3.0, 0.5)],
)
def test_sobolev_radius(coef, beta, expected):
    assert sobolev_radius(Signal(coef), beta) == pytest.approx(expected, rel=1e-15)


def test_sobolev_ball_membership():
    mu = Signal([1, 1])
    assert mu in SobolevBall(1.0, math.sqrt(5), 2)
    assert mu not in SobolevBall(1.0, 2.0, 2)
    with pytest.raises(DimensionMismatchError):
        mu in SobolevBall(1.0, 3.0, 3)


def test_polished_tail_geometric():
    mu = Signal(2.0 ** -np.arange(1, 21))
    assert polished_tail_check(mu, 2, 4 / 3)
    assert not polished_tail_check(mu, 2, 1.0)


def test_polished_tail_literal_cases():
    spike = np.zeros(20)
    spike[-1] = 1.0
    # m <= 10 only; each tail sum_{i>=m} is 1, block sum_{m}^{2m} is 0 except at m=10
    assert not polished_tail_check(Signal(spike), 2, 10.0)
    assert polished_tail_check(Signal(np.zeros(7)), 3, 1.0)


def test_csv_round_trip(tmp_path):
    mu = make_benchmark_signal("smooth3", 30, seed=11)
    save_signal(mu, tmp_path / "mu.csv")
    np.testing.assert_array_equal(load_signal(tmp_path / "mu.csv").coefficients, mu.coefficients)


@pytest.mark.parametrize(
    "body",
    ["index,mu\n1,1\n2,1\n4,1\n5,1\n", "index,mu\n1,1\n2,x\n", "index,mu\n1,inf\n"],
)
def test_loader_rejects(tmp_path, body):
    path = tmp_path / "mu.csv"
    path.write_text(body)
    with pytest.raises(FormatError):
        load_signal(path)
