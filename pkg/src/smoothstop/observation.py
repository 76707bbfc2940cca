"""Draws from the Gaussian sequence model ``Y_i = lambda_i mu_i + delta eps_i``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .csvio import write_indexed_csv
from .errors import DimensionMismatchError, InvalidArgumentError
from .signals import Signal, check_pair
from .spectrum import Spectrum

INJECTED = "injected"


@dataclass(frozen=True, eq=False)
class Observation:
    """Observed coefficients plus provenance.

    ``noise`` keeps the standard-normal draws that produced ``y`` so that
    losses can be evaluated without dividing ``y`` by small singular values.
    """

    y: np.ndarray
    delta: float
    seed: int | str
    noise: np.ndarray | None = None

    def __post_init__(self):
        y = np.array(self.y, dtype=float).ravel()
        y.setflags(write=False)
        object.__setattr__(self, "y", y)
        if self.noise is not None:
            eps = np.array(self.noise, dtype=float).ravel()
            if eps.size != y.size:
                raise DimensionMismatchError("noise and y lengths differ")
            eps.setflags(write=False)
            object.__setattr__(self, "noise", eps)

    @property
    def dimension(self) -> int:
        return int(self.y.size)


def _check_delta(delta):
    if not delta >= 0:
        raise InvalidArgumentError(f"delta must be nonnegative, got {delta}")


def simulate(s: Spectrum, mu: Signal, delta: float, seed: int) -> Observation:
    """One observation with noise drawn from the stream keyed by ``seed``.

    ``delta = 0`` is accepted and yields the noiseless data ``lambda * mu``.
    """
    check_pair(mu, s)
    _check_delta(delta)
    eps = rng.standard_normals(seed, s.dimension)
    y = s.values * mu.coefficients + delta * eps
    return Observation(y, float(delta), int(seed), eps)


def inject_noise(s: Spectrum, mu: Signal, delta: float, eps) -> Observation:
    """Observation built from a caller-supplied noise vector."""
    check_pair(mu, s)
    _check_delta(delta)
    eps = np.asarray(eps, dtype=float)
    if eps.size != s.dimension:
        raise DimensionMismatchError(f"noise has {eps.size} entries, expected {s.dimension}")
    y = s.values * mu.coefficients + delta * eps
    return Observation(y, float(delta), INJECTED, eps)


def save_observation(obs: Observation, path) -> None:
    write_indexed_csv(path, "y", obs.y)
