"""Monte-Carlo studies of smoothed residual stopping.

Three studies are provided:

* efficiency study: fixed ``D``, relative efficiency and relative
  stopping time per (signal, alpha, replicate);
* rate study: ``D_k = 100 * 2**k`` with ``delta_k`` shrinking so that
  ``D_k`` tracks the minimax truncation index of the roughest class;
* null lower-bound study: ``mu = 0`` over a list of dimensions.

Each replicate draws one observation, shared by every alpha, from a seed
derived from the master seed and the replicate's coordinates. Work is
split into chunks that may run in worker processes; results are sorted
by their coordinates before output, so the bytes written never depend on
the worker count.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _numerics as num
from . import rng
from .csvio import write_rows
from .errors import ConfigError, DimensionMismatchError, OversmoothingWarning
from .oracles import alpha_balanced_oracle, classical_oracle
from .signals import BENCHMARK_SIGNALS, Signal, bias_path, make_benchmark_signal
from .spectrum import (
    Spectrum,
    alpha_weight_total,
    make_polynomial_spectrum,
    sd_std,
    variance_path,
)
from .stopping import first_below, residuals_from_terms

EFFICIENCY_COLUMNS = [
    "signal", "alpha", "replicate", "seed", "tau", "loss",
    "rel_efficiency", "rel_stopping", "flag",
]
RATE_COLUMNS = [
    "k", "D", "delta", "signal", "alpha", "n_reps",
    "mean_loss", "se_loss", "oracle_risk", "sqrtD_risk",
]
SUMMARY_COLUMNS = [
    "signal", "alpha", "metric", "min", "q1", "median", "q3", "max",
    "mean", "se", "n", "n_flagged",
]
NULL_COLUMNS = [
    "D", "p", "delta", "alpha", "kappa", "n_reps",
    "mean_loss", "se_loss", "mean_tau", "se_tau", "lower_bound_order",
]
SUMMARY_METRICS = ("rel_efficiency", "rel_stopping", "tau", "loss")

FLAG_OK = "ok"
FLAG_TAU_ZERO = "tau_zero"


def _as_kappa_policy(value, field_name="kappa_policy"):
    if value is None or value == "default":
        return "default"
    try:
        kappa = float(value)
    except (TypeError, ValueError):
        raise ConfigError(field_name, f"expected 'default' or a number, got {value!r}") from None
    if not (kappa >= 0 and math.isfinite(kappa)):
        raise ConfigError(field_name, "explicit kappa must be finite and nonnegative")
    return kappa


def _check_alphas(alphas, p):
    if not alphas:
        raise ConfigError("alphas", "need at least one smoothing index")
    for a in alphas:
        if not (isinstance(a, (int, float)) and math.isfinite(a) and a >= 0):
            raise ConfigError("alphas", f"smoothing indices must be nonnegative, got {a!r}")
    hot = [a for a in alphas if a * p >= 0.5]
    if hot:
        warnings.warn(
            f"alphas {hot} satisfy alpha * p >= 1/2 (oversmoothing regime)",
            OversmoothingWarning,
            stacklevel=3,
        )


def _check_signals(signals):
    if not signals:
        raise ConfigError("signals", "need at least one signal")
    labels = []
    for sig in signals:
        if isinstance(sig, Signal):
            labels.append(sig.label)
        elif sig in BENCHMARK_SIGNALS or sig == "zero":
            labels.append(sig)
        else:
            raise ConfigError("signals", f"unknown signal {sig!r}")
    if len(set(labels)) != len(labels):
        raise ConfigError("signals", "signal labels must be unique")


def _check_positive_int(name, value):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ConfigError(name, f"must be a positive integer, got {value!r}")


def _check_seed(value):
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 0:
        raise ConfigError("master_seed", f"must be a nonnegative integer, got {value!r}")


def _default_signal_seed(master_seed):
    return rng.derive_seed(master_seed, 0, "smooth3-signal")


def _build_signal(sig, D, signal_seed):
    if isinstance(sig, Signal):
        if sig.dimension != D:
            raise DimensionMismatchError(f"signal {sig.label!r} has {sig.dimension} entries, D={D}")
        return sig
    return make_benchmark_signal(sig, D, seed=signal_seed if sig == "smooth3" else None)


def _signal_label(sig):
    return sig.label if isinstance(sig, Signal) else sig


@dataclass
class EfficiencyStudyConfig:
    p: float = 0.5
    D: int = 10000
    delta: float = 0.01
    signals: list = field(default_factory=lambda: list(BENCHMARK_SIGNALS))
    alphas: list = field(default_factory=lambda: [0.0, 0.2, 0.5, 1.0, 1.5])
    replicates: int = 1000
    master_seed: int = 0
    kappa_policy: object = "default"
    signal_seed: int | None = None

    def validate(self):
        if not (self.p >= 0 and math.isfinite(self.p)):
            raise ConfigError("p", f"must be nonnegative, got {self.p!r}")
        _check_positive_int("D", self.D)
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ConfigError("delta", f"must be positive, got {self.delta!r}")
        _check_positive_int("replicates", self.replicates)
        _check_seed(self.master_seed)
        _check_signals(self.signals)
        _check_alphas(self.alphas, self.p)
        self.kappa_policy = _as_kappa_policy(self.kappa_policy)
        return self


@dataclass
class RateStudyConfig:
    p: float = 0.5
    k_range: list = field(default_factory=lambda: list(range(11)))
    r_max: float = 1000.0
    beta_min2: float = 0.5
    signals: list = field(default_factory=lambda: ["supersmooth", "rough"])
    alphas: list = field(default_factory=lambda: [0.0, 0.2, 0.5, 1.0, 1.5])
    replicates: int = 1000
    large_k_replicates: int = 200
    large_k_from: int = 8
    master_seed: int = 0
    kappa_policy: object = "default"
    signal_seed: int | None = None

    @staticmethod
    def dimension(k):
        return 100 * 2 ** int(k)

    def delta(self, k):
        """``delta_k = sqrt(r_max^2 / D_k^(2 beta_min + 2 p + 1))``."""
        D = self.dimension(k)
        return math.sqrt(self.r_max ** 2 / D ** (self.beta_min2 + 2 * self.p + 1))

    def replicates_for(self, k):
        return self.large_k_replicates if k >= self.large_k_from else self.replicates

    def validate(self):
        if not (self.p >= 0 and math.isfinite(self.p)):
            raise ConfigError("p", f"must be nonnegative, got {self.p!r}")
        if not self.k_range:
            raise ConfigError("k_range", "need at least one k")
        for k in self.k_range:
            if not isinstance(k, (int, np.integer)) or k < 0 or k > 20:
                raise ConfigError("k_range", f"k must be an integer in 0..20, got {k!r}")
        if not (self.r_max > 0 and math.isfinite(self.r_max)):
            raise ConfigError("r_max", "must be positive")
        if not (self.beta_min2 >= 0 and math.isfinite(self.beta_min2)):
            raise ConfigError("beta_min2", "must be nonnegative")
        _check_positive_int("replicates", self.replicates)
        _check_positive_int("large_k_replicates", self.large_k_replicates)
        if not isinstance(self.large_k_from, (int, np.integer)):
            raise ConfigError("large_k_from", "must be an integer")
        _check_seed(self.master_seed)
        _check_signals(self.signals)
        if any(isinstance(s, Signal) for s in self.signals):
            raise ConfigError("signals", "the rate study needs signals defined for every D")
        _check_alphas(self.alphas, self.p)
        self.kappa_policy = _as_kappa_policy(self.kappa_policy)
        return self


@dataclass
class NullBoundConfig:
    D_list: list = field(default_factory=lambda: [1000, 4000])
    p: float = 0.5
    delta: float = 0.01
    alpha: float = 0.0
    replicates: int = 1000
    master_seed: int = 0
    kappa_policy: object = "default"

    def validate(self):
        if not self.D_list:
            raise ConfigError("D_list", "need at least one dimension")
        for D in self.D_list:
            _check_positive_int("D_list", D)
        if not (self.p >= 0 and math.isfinite(self.p)):
            raise ConfigError("p", f"must be nonnegative, got {self.p!r}")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ConfigError("delta", f"must be positive, got {self.delta!r}")
        if not (isinstance(self.alpha, (int, float)) and self.alpha >= 0):
            raise ConfigError("alpha", f"must be nonnegative, got {self.alpha!r}")
        _check_positive_int("replicates", self.replicates)
        _check_seed(self.master_seed)
        self.kappa_policy = _as_kappa_policy(self.kappa_policy)
        return self


@dataclass(frozen=True)
class ReplicateRecord:
    signal: str
    alpha: float
    replicate: int
    seed: int
    tau: int
    loss: float
    rel_efficiency: float
    rel_stopping: float
    flag: str = FLAG_OK

    def as_row(self):
        return [
            self.signal, self.alpha, self.replicate, self.seed, self.tau, self.loss,
            self.rel_efficiency, self.rel_stopping, self.flag,
        ]


@dataclass
class _Cell:
    """Everything a replicate needs for one (spectrum, signal, delta) setting."""

    key: tuple
    label: str
    seed_label: str
    lam: np.ndarray
    mu: np.ndarray
    delta: float
    alphas: list
    weights: list  # lambda^(2 alpha) per alpha
    kappas: list
    bias: np.ndarray  # B^2_m, m = 0..D
    oracle_risk: float
    ceil_tb: list  # ceil(t^b_alpha) per alpha


def _make_cell(key, label, seed_label, s, mu, delta, alphas, kappa_policy):
    weights, kappas, ceil_tb = [], [], []
    for a in alphas:
        weights.append(num.spectral_power(s.values, 2 * a))
        if kappa_policy == "default":
            kappas.append(delta * delta * alpha_weight_total(s, a))
        else:
            kappas.append(float(kappa_policy))
        ceil_tb.append(math.ceil(alpha_balanced_oracle(s, mu, delta, a)))
    _, oracle_risk = classical_oracle(s, mu, delta)
    return _Cell(
        key=key,
        label=label,
        seed_label=seed_label,
        lam=s.values,
        mu=mu.coefficients,
        delta=float(delta),
        alphas=list(alphas),
        weights=weights,
        kappas=kappas,
        bias=bias_path(mu),
        oracle_risk=oracle_risk,
        ceil_tb=ceil_tb,
    )


def _run_replicate(cell, master_seed, r):
    """Per-alpha (tau, loss) for replicate ``r`` of ``cell``.

    The loss at ``tau`` is ``B^2_tau + S_tau``, using the retained noise;
    this equals ``||mu_hat^(tau) - mu||^2`` without dividing ``Y`` by
    small singular values.
    """
    seed = rng.derive_seed(master_seed, r, cell.seed_label)
    eps = rng.standard_normals(seed, cell.lam.size)
    y = cell.lam * cell.mu + cell.delta * eps
    ysq = y * y
    noise_var = (cell.delta * cell.delta) * (eps * eps) / (cell.lam * cell.lam)
    out = []
    for w, kappa in zip(cell.weights, cell.kappas):
        tau = first_below(residuals_from_terms(w * ysq), kappa)
        loss = float(cell.bias[tau]) + num.fsum(noise_var[:tau])
        out.append((tau, loss))
    return seed, out


def _run_chunk(task):
    cell, master_seed, start, stop = task
    return cell.key, start, [_run_replicate(cell, master_seed, r) for r in range(start, stop)]


def _execute(cells_reps, master_seed, workers, chunk_size=50):
    """Run all replicates; returns {cell.key: [(seed, per-alpha results), ...]}."""
    tasks = []
    for cell, n in cells_reps:
        for start in range(0, n, chunk_size):
            tasks.append((cell, master_seed, start, min(n, start + chunk_size)))
    results = {cell.key: [None] * n for cell, n in cells_reps}
    if workers is None or workers <= 1:
        outputs = map(_run_chunk, tasks)
        for key, start, chunk in outputs:
            results[key][start:start + len(chunk)] = chunk
    else:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            for key, start, chunk in pool.map(_run_chunk, tasks):
                results[key][start:start + len(chunk)] = chunk
    return results


def _rel_efficiency(oracle_risk, loss):
    if loss == 0.0:
        return 1.0 if oracle_risk == 0.0 else math.inf
    return math.sqrt(oracle_risk) / math.sqrt(loss)


def run_efficiency_study(cfg: EfficiencyStudyConfig, workers: int = 1) -> list[ReplicateRecord]:
    """Replicate records sorted by (signal, alpha, replicate) in config order."""
    cfg.validate()
    s = make_polynomial_spectrum(cfg.p, cfg.D)
    signal_seed = cfg.signal_seed if cfg.signal_seed is not None else _default_signal_seed(cfg.master_seed)
    cells = []
    for j, sig in enumerate(cfg.signals):
        mu = _build_signal(sig, cfg.D, signal_seed)
        label = _signal_label(sig)
        cells.append((_make_cell(j, label, label, s, mu, cfg.delta, cfg.alphas, cfg.kappa_policy), cfg.replicates))
    results = _execute(cells, cfg.master_seed, workers)
    records = []
    for cell, n in cells:
        for ai, a in enumerate(cell.alphas):
            for r, (seed, per_alpha) in enumerate(results[cell.key]):
                tau, loss = per_alpha[ai]
                if tau == 0:
                    rel_stop, flag = math.nan, FLAG_TAU_ZERO
                else:
                    rel_stop, flag = cell.ceil_tb[ai] / tau, FLAG_OK
                records.append(
                    ReplicateRecord(
                        signal=cell.label,
                        alpha=float(a),
                        replicate=r,
                        seed=seed,
                        tau=tau,
                        loss=loss,
                        rel_efficiency=_rel_efficiency(cell.oracle_risk, loss),
                        rel_stopping=rel_stop,
                        flag=flag,
                    )
                )
    return records


def run_rate_study(cfg: RateStudyConfig, workers: int = 1) -> list[list]:
    """Rows ``k, D, delta, signal, alpha, n_reps, mean_loss, se_loss, oracle_risk, sqrtD_risk``."""
    cfg.validate()
    signal_seed = cfg.signal_seed if cfg.signal_seed is not None else _default_signal_seed(cfg.master_seed)
    cells = []
    meta = {}
    for k in cfg.k_range:
        D = cfg.dimension(k)
        delta = cfg.delta(k)
        s = make_polynomial_spectrum(cfg.p, D)
        m_sqrt = math.ceil(math.sqrt(D))
        v_sqrt = float(variance_path(s, delta)[m_sqrt])
        for sig in cfg.signals:
            mu = _build_signal(sig, D, signal_seed)
            key = (k, sig)
            cell = _make_cell(key, sig, f"{sig}@k{k}", s, mu, delta, cfg.alphas, cfg.kappa_policy)
            meta[key] = (D, delta, float(cell.bias[m_sqrt]) + v_sqrt)
            cells.append((cell, cfg.replicates_for(k)))
    results = _execute(cells, cfg.master_seed, workers)
    rows = []
    for cell, n in cells:
        k, sig = cell.key
        D, delta, sqrt_risk = meta[cell.key]
        for ai, a in enumerate(cell.alphas):
            losses = np.array([per_alpha[ai][1] for _, per_alpha in results[cell.key]])
            mean, se = _mean_se(losses)
            rows.append([k, D, delta, sig, float(a), n, mean, se, cell.oracle_risk, sqrt_risk])
    return rows


def run_null_lowerbound_study(cfg: NullBoundConfig, workers: int = 1) -> list[list]:
    """Rows of ``NULL_COLUMNS``: mean loss and stopping time for ``mu = 0`` per ``D``.

    ``lower_bound_order`` is ``s_D^((2p+1)/(1-2 alpha p)) delta^2``, the
    size of the dimension-dependent error; it is ``nan`` when
    ``alpha p >= 1/2``.
    """
    cfg.validate()
    cells = []
    for D in cfg.D_list:
        s = make_polynomial_spectrum(cfg.p, D)
        mu = make_benchmark_signal("zero", D)
        cells.append(
            (_make_cell(D, "zero", f"zero@D{D}", s, mu, cfg.delta, [cfg.alpha], cfg.kappa_policy), cfg.replicates)
        )
    results = _execute(cells, cfg.master_seed, workers)
    rows = []
    ap = cfg.alpha * cfg.p
    for cell, n in cells:
        D = cell.key
        taus = np.array([per[0][0] for _, per in results[D]], dtype=float)
        losses = np.array([per[0][1] for _, per in results[D]])
        if ap < 0.5:
            sd = sd_std(make_polynomial_spectrum(cfg.p, D), cfg.alpha)
            order = sd ** ((2 * cfg.p + 1) / (1 - 2 * ap)) * cfg.delta ** 2
        else:
            order = math.nan
        mean_l, se_l = _mean_se(losses)
        mean_t, se_t = _mean_se(taus)
        rows.append([D, cfg.p, cfg.delta, cfg.alpha, cell.kappas[0], n, mean_l, se_l, mean_t, se_t, order])
    return rows


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    mean = num.fsum(values) / values.size
    if values.size < 2:
        return mean, math.nan
    return mean, float(np.std(values, ddof=1)) / math.sqrt(values.size)


def summarize(records: list[ReplicateRecord]) -> list[list]:
    """Order statistics, mean and standard error per (signal, alpha, metric).

    Quantiles use linear interpolation between order statistics (type 7).
    Flagged records (``tau == 0``) are left out of ``rel_stopping``
    and counted in ``n_flagged``.
    """
    groups: dict[tuple, list[ReplicateRecord]] = {}
    for rec in records:
        groups.setdefault((rec.signal, rec.alpha), []).append(rec)
    rows = []
    for (signal, alpha), recs in groups.items():
        n_flagged = sum(r.flag != FLAG_OK for r in recs)
        for metric in SUMMARY_METRICS:
            if metric == "rel_stopping":
                vals = [r.rel_stopping for r in recs if r.flag == FLAG_OK]
            else:
                vals = [getattr(r, metric) for r in recs]
            vals = np.array(vals, dtype=float)
            if vals.size == 0:
                stats = [math.nan] * 7
            else:
                q = np.quantile(vals, [0.0, 0.25, 0.5, 0.75, 1.0])
                mean, se = _mean_se(vals)
                stats = [float(v) for v in q] + [mean, se]
            rows.append([signal, alpha, metric, *stats, int(vals.size), n_flagged])
    if not rows:
        raise ValueError("nothing to summarize")
    return rows


def write_efficiency_records(records, path):
    write_rows(path, EFFICIENCY_COLUMNS, (r.as_row() for r in records))


def write_summary(rows, path):
    write_rows(path, SUMMARY_COLUMNS, rows)


def write_rate_rows(rows, path):
    write_rows(path, RATE_COLUMNS, rows)


def write_null_rows(rows, path):
    write_rows(path, NULL_COLUMNS, rows)


def plan_efficiency(cfg: EfficiencyStudyConfig) -> dict:
    cfg.validate()
    n_cells = len(cfg.signals) * len(cfg.alphas)
    return {
        "study": "efficiency",
        "D": cfg.D,
        "delta": cfg.delta,
        "cells": n_cells,
        "replicates": cfg.replicates,
        "rows": n_cells * cfg.replicates,
    }


def plan_rates(cfg: RateStudyConfig) -> dict:
    cfg.validate()
    ks = [
        {"k": k, "D": cfg.dimension(k), "delta": cfg.delta(k), "replicates": cfg.replicates_for(k)}
        for k in cfg.k_range
    ]
    return {
        "study": "rates",
        "cells": len(ks) * len(cfg.signals) * len(cfg.alphas),
        "per_k": ks,
    }


def plan_null(cfg: NullBoundConfig) -> dict:
    cfg.validate()
    return {"study": "nullbound", "D_list": list(cfg.D_list), "replicates": cfg.replicates, "rows": len(cfg.D_list)}
