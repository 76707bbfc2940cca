import math

import numpy as np
import pytest

from smoothstop import (
    Signal,
    StoppingConfig,
    balanced_oracle,
    make_benchmark_signal,
    make_polynomial_spectrum,
    simulate,
    stopping_time,
    truncated_estimate,
    squared_loss,
)
from smoothstop import experiments as ex
from smoothstop import rng
from smoothstop.errors import ConfigError


def small_eff(**kw):
    base = dict(p=0.5, D=400, delta=0.05, signals=["supersmooth", "rough"], alphas=[0.0, 0.5], replicates=10, master_seed=3)
    base.update(kw)
    return ex.EfficiencyStudyConfig(**base)


def test_efficiency_cardinality_and_order():
    recs = ex.run_efficiency_study(small_eff())
    assert len(recs) == 40
    keys = [(r.signal, r.alpha, r.replicate) for r in recs]
    assert keys == [(s, a, i) for s in ("supersmooth", "rough") for a in (0.0, 0.5) for i in range(10)]
    assert all(r.rel_efficiency > 0 and 0 <= r.tau <= 400 for r in recs)


def test_records_match_direct_pipeline():
    cfg = small_eff(signals=["smooth21"], alphas=[0.5], replicates=5)
    s = make_polynomial_spectrum(0.5, 400)
    mu = make_benchmark_signal("smooth21", 400)
    for rec in ex.run_efficiency_study(cfg):
        seed = rng.derive_seed(3, rec.replicate, "smooth21")
        assert rec.seed == seed
        obs = simulate(s, mu, 0.05, seed)
        tau = stopping_time(obs, s, StoppingConfig.default(s, 0.05, 0.5))
        assert rec.tau == tau
        direct = squared_loss(truncated_estimate(obs, s, tau), mu)
        assert rec.loss == pytest.approx(direct, rel=1e-10)


def test_observation_shared_across_alpha():
    recs = ex.run_efficiency_study(small_eff(signals=["rough"], alphas=[0.0, 1.0], replicates=4))
    by_alpha = {}
    for r in recs:
        by_alpha.setdefault(r.alpha, []).append(r.seed)
    assert by_alpha[0.0] == by_alpha[1.0]


def test_tau_zero_is_flagged():
    cfg = small_eff(signals=["zero"], alphas=[0.0], replicates=5, kappa_policy=1e6)
    recs = ex.run_efficiency_study(cfg)
    assert all(r.tau == 0 and r.loss == 0 and r.flag == ex.FLAG_TAU_ZERO for r in recs)
    assert all(math.isnan(r.rel_stopping) for r in recs)
    assert all(r.rel_efficiency == 1.0 for r in recs)


def test_benchmark_oracle_columns(bench_spectrum, bench_signals):
    expected = {"supersmooth": (43, 37), "smooth21": (504, 445), "rough": (1331, 2379)}
    s = bench_spectrum
    for kind, (tc, tb) in expected.items():
        cell = ex._make_cell(0, kind, kind, s, bench_signals[kind], 0.01, [0.0, 0.5], "default")
        path = cell.bias + ex.variance_path(s, 0.01)
        assert int(np.argmin(path)) == tc and cell.oracle_risk == path[tc]
        assert abs(math.ceil(balanced_oracle(s, bench_signals[kind], 0.01)) - tb) <= 1
        # smoothed balanced indices sit at or below the plain one
        assert cell.ceil_tb[1] <= cell.ceil_tb[0] <= tb


@pytest.mark.parametrize(
    "kw, field",
    [
        (dict(replicates=0), "replicates"),
        (dict(delta=0.0), "delta"),
        (dict(alphas=[-0.1]), "alphas"),
        (dict(signals=["nope"]), "signals"),
        (dict(kappa_policy=-1.0), "kappa_policy"),
    ],
)
def test_efficiency_config_validation(kw, field):
    with pytest.raises(ConfigError) as info:
        small_eff(**kw).validate()
    assert info.value.field == field


def test_rate_config_delta():
    cfg = ex.RateStudyConfig()
    assert cfg.dimension(3) == 800
    assert cfg.delta(0) == pytest.approx(math.sqrt(1e6 / 100 ** 2.5), rel=1e-14)
    cfg.p = 1.0
    assert cfg.delta(0) == pytest.approx(math.sqrt(1e6 / 100 ** 3.5), rel=1e-14)
    assert cfg.replicates_for(8) == 200 and cfg.replicates_for(7) == 1000


def test_rate_study_rows_and_oracle_bound():
    cfg = ex.RateStudyConfig(k_range=[0, 1, 2], signals=["supersmooth", "rough"], alphas=[0.0, 0.5], replicates=60)
    rows = ex.run_rate_study(cfg)
    assert len(rows) == 3 * 2 * 2
    for k, D, delta, sig, a, n, mean, se, orisk, sqrt_risk in rows:
        assert D == 100 * 2 ** k and n == 60
        assert orisk <= mean + 4 * se
        assert orisk <= sqrt_risk


def test_null_study_rows():
    cfg = ex.NullBoundConfig(D_list=[200, 800], replicates=50)
    rows = ex.run_null_lowerbound_study(cfg)
    assert [r[0] for r in rows] == [200, 800]
    assert rows[1][6] > rows[0][6]


def test_null_huge_kappa_stops_immediately():
    rows = ex.run_null_lowerbound_study(ex.NullBoundConfig(D_list=[300], replicates=20, kappa_policy=1e9))
    assert rows[0][6] == 0.0 and rows[0][8] == 0.0


@pytest.mark.slow
def test_null_tau_grows_with_D_at_alpha_zero():
    rows = ex.run_null_lowerbound_study(ex.NullBoundConfig(D_list=[250, 1000, 4000], replicates=300))
    taus = [r[8] for r in rows]
    assert taus[0] < taus[1] < taus[2]


def test_null_tau_bounded_when_oversmoothing_in_order():
    # alpha p = 0.5 > 1/4: s_D stays of constant order, so does tau
    rows = ex.run_null_lowerbound_study(ex.NullBoundConfig(D_list=[250, 1000, 4000], alpha=1.0, replicates=300))
    taus = [r[8] for r in rows]
    assert max(taus) < 10 and max(taus) / max(min(taus), 0.1) < 3


def _rec(v):
    return ex.ReplicateRecord("x", 0.5, 0, 0, 1, v, v, v)


def test_summarize_quantiles():
    rows = ex.summarize([_rec(v) for v in (1.0, 2.0, 3.0, 4.0)])
    loss = next(r for r in rows if r[2] == "loss")
    assert loss[3:8] == [1.0, 1.75, 2.5, 3.25, 4.0]
    assert loss[8] == 2.5
    single = next(r for r in ex.summarize([_rec(7.0)]) if r[2] == "loss")
    assert single[3:8] == [7.0] * 5


def test_summarize_group_means():
    recs = ex.run_efficiency_study(small_eff())
    rows = ex.summarize(recs)
    for sig, a, metric, *_, mean, se, n, nf in rows:
        if metric != "tau":
            continue
        vals = [r.tau for r in recs if r.signal == sig and r.alpha == a]
        assert mean == pytest.approx(sum(vals) / len(vals), rel=1e-15)
        assert n == len(vals)


def test_workers_do_not_change_output(tmp_path):
    cfg = small_eff(replicates=120)
    one = ex.run_efficiency_study(cfg, workers=1)
    four = ex.run_efficiency_study(cfg, workers=4)
    ex.write_efficiency_records(one, tmp_path / "a.csv")
    ex.write_efficiency_records(four, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_rerun_reproduces_prefix():
    # an interrupted run restarted with fewer replicates reproduces the same leading rows
    short = ex.run_efficiency_study(small_eff(signals=["rough"], replicates=7))
    full = ex.run_efficiency_study(small_eff(signals=["rough"], replicates=20))
    for a in (0.0, 0.5):
        s_rows = [r for r in short if r.alpha == a]
        f_rows = [r for r in full if r.alpha == a][:7]
        assert s_rows == f_rows


def test_plans():
    assert ex.plan_efficiency(small_eff())["rows"] == 40
    plan = ex.plan_rates(ex.RateStudyConfig(k_range=[0, 9]))
    assert [k["replicates"] for k in plan["per_k"]] == [1000, 200]
