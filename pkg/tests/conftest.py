import numpy as np
import pytest

from smoothstop import make_benchmark_signal, make_polynomial_spectrum

BENCH_D = 10000
BENCH_DELTA = 0.01
BENCH_P = 0.5


@pytest.fixture(scope="session")
def bench_spectrum():
    return make_polynomial_spectrum(BENCH_P, BENCH_D)


@pytest.fixture(scope="session")
def bench_signals():
    return {
        kind: make_benchmark_signal(kind, BENCH_D, seed=2024)
        for kind in ("supersmooth", "smooth3", "smooth21", "rough")
    }


def random_signal(rng, D):
    """Positive signal with random polynomial decay and random magnitude."""
    decay = rng.uniform(0.3, 2.5)
    scale = 10.0 ** rng.uniform(-1, 3)
    i = np.arange(1, D + 1)
    return scale * np.abs(rng.standard_normal(D)) * i ** -decay


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number, ok, detail):
    """Remember one pass/fail line for the end-of-run acceptance summary."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
