"""Smoothed residual early stopping for truncated-SVD estimation.

Works in the singular basis of a diagonalised linear inverse problem
``Y_i = lambda_i mu_i + delta eps_i``: builds spectra and signals,
simulates observations, evaluates cut-off estimators and their risks,
runs the stopping rule and computes the deterministic oracle indices.
"""
from .errors import (
    ConfigError,
    DimensionMismatchError,
    FormatError,
    InvalidArgumentError,
    MissingNoiseError,
    MissingSeedError,
    OutOfRangeError,
    OversmoothingWarning,
    SmoothStopError,
    ZeroCriticalValueWarning,
)
from .estimator import (
    Estimate,
    continuous_estimate,
    risk,
    risk_path,
    squared_loss,
    stochastic_error,
    truncated_estimate,
)
from .observation import Observation, inject_noise, simulate
from .oracles import (
    OracleReport,
    alpha_balanced_oracle,
    alpha_minimax_index,
    balanced_oracle,
    classical_oracle,
    discrete_balanced_index,
    expected_residual,
    minimax_index,
    minimax_rate,
    oracle_proxy,
    oracle_report,
    smoothing_rate,
)
from .signals import (
    BENCHMARK_SIGNALS,
    Signal,
    SobolevBall,
    alpha_bias,
    bias,
    load_signal,
    make_benchmark_signal,
    polished_tail_check,
    save_signal,
    sobolev_radius,
)
from .spectrum import (
    Spectrum,
    alpha_variance,
    load_spectrum,
    make_polynomial_spectrum,
    normalize,
    psd_check,
    save_spectrum,
    sd_std,
    variance,
)
from .stopping import (
    StoppingConfig,
    default_kappa,
    residual_path,
    smoothed_residual,
    stopping_time,
    validate_kappa,
)

__version__ = "0.1.0"
