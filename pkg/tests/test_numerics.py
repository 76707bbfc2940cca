import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from smoothstop import _numerics as num
from smoothstop.errors import OutOfRangeError


def test_two_sum_is_error_free():
    s, e = num.two_sum(1.0, 1e-17)
    assert s == 1.0 and e == 1e-17


@given(st.lists(st.floats(0, 1e6, allow_nan=False), max_size=60))
def test_compensated_cumsum_matches_fsum(values):
    prefix = num.compensated_cumsum(values)
    assert prefix[0] == 0.0
    for m in range(len(values) + 1):
        assert prefix[m] == pytest.approx(math.fsum(values[:m]), rel=1e-15, abs=1e-300)


@given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=60))
def test_compensated_suffix_is_tail_sum(values):
    suffix = num.compensated_suffix(values)
    assert suffix[-1] == 0.0
    for m in range(len(values) + 1):
        assert suffix[m] == pytest.approx(math.fsum(values[m:]), rel=1e-15, abs=1e-300)


def test_compensated_cumsum_survives_cancellation_prone_input():
    vals = [1.0] + [1e-16] * 10000
    assert num.compensated_cumsum(vals)[-1] == pytest.approx(1.0 + 1e-12, rel=1e-15)


@pytest.mark.parametrize("exponent", [0, 1, 2, 3, 4, 0.5, 1.7])
def test_spectral_power_agrees_with_pow(exponent):
    x = np.linspace(0.01, 1, 50)
    np.testing.assert_allclose(num.spectral_power(x, exponent), x ** exponent, rtol=1e-13)


def test_first_crossing_solves_linear_piece():
    # upper 9, 9, 0 ; lower 0, 1, 2  -> crossing on [1, 2] at 1 + 8/10
    assert num.first_crossing([9, 9, 0], [0, 1, 2]) == pytest.approx(1.8)
    assert num.first_crossing([0, 0], [0, 1]) == 0.0


def test_check_t_range():
    with pytest.raises(OutOfRangeError):
        num.check_t(-0.1, 3)
    with pytest.raises(OutOfRangeError):
        num.check_t(3.5, 3)
    assert num.check_t(3, 3) == 3.0
