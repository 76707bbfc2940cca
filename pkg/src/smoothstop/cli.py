"""Command-line front end.

Every subcommand reads one JSON config, writes CSV files into ``--out``
and exits with 0 on success, 2 on a configuration error and 3 when a
non-finite number shows up in the results.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

from . import experiments as ex
from .csvio import write_rows
from .errors import ConfigError, SmoothStopError
from .observation import save_observation, simulate
from .oracles import REPORT_COLUMNS, oracle_report
from .signals import BENCHMARK_SIGNALS, load_signal, make_benchmark_signal
from .spectrum import load_spectrum, make_polynomial_spectrum
from .stopping import StoppingConfig, default_kappa

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SIGNAL_KINDS = BENCHMARK_SIGNALS + ("zero",)


class NumericError(SmoothStopError):
    pass


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("--config", f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("--config", "top level must be an object")
    return cfg


def _take(cfg, allowed):
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration field")
    return cfg


def _number(cfg, name, default=None, positive=False, nonnegative=False):
    value = cfg.get(name, default)
    if value is None:
        raise ConfigError(name, "required")
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(name, f"expected a finite number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(name, f"must be positive, got {value!r}")
    if nonnegative and value < 0:
        raise ConfigError(name, f"must be nonnegative, got {value!r}")
    return float(value)


def _integer(cfg, name, default=None, minimum=0):
    value = cfg.get(name, default)
    if value is None:
        raise ConfigError(name, "required")
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(name, f"expected an integer >= {minimum}, got {value!r}")
    return value


def _alpha_list(cfg, default):
    alphas = cfg.get("alpha_list", default)
    if not isinstance(alphas, list) or not alphas:
        raise ConfigError("alpha_list", "expected a nonempty list of numbers")
    for a in alphas:
        if isinstance(a, bool) or not isinstance(a, (int, float)) or not a >= 0:
            raise ConfigError("alpha_list", f"smoothing indices must be nonnegative numbers, got {a!r}")
    return [float(a) for a in alphas]


def _spectrum(cfg, base):
    if "spectrum_file" in cfg:
        try:
            return load_spectrum(base / cfg["spectrum_file"])
        except (OSError, SmoothStopError) as exc:
            raise ConfigError("spectrum_file", str(exc)) from None
    p = _number(cfg, "p", nonnegative=True)
    D = _integer(cfg, "D", minimum=1)
    return make_polynomial_spectrum(p, D)


def _signal_entries(cfg, key, base, D, signal_seed):
    """Resolve a list of signal kinds / ``{"label", "file"}`` objects."""
    entries = cfg.get(key)
    if isinstance(entries, (str, dict)):
        entries = [entries]
    if not isinstance(entries, list) or not entries:
        raise ConfigError(key, "expected a signal kind, a file entry, or a list of them")
    out = []
    for entry in entries:
        if isinstance(entry, str):
            if entry not in SIGNAL_KINDS:
                raise ConfigError(key, f"unknown signal kind {entry!r}")
            out.append(make_benchmark_signal(entry, D, seed=signal_seed))
        elif isinstance(entry, dict) and "file" in entry:
            try:
                mu = load_signal(base / entry["file"], label=entry.get("label"))
            except (OSError, SmoothStopError) as exc:
                raise ConfigError(key, str(exc)) from None
            if mu.dimension != D:
                raise ConfigError(key, f"signal file has {mu.dimension} entries but D = {D}")
            out.append(mu)
        else:
            raise ConfigError(key, f"cannot interpret signal entry {entry!r}")
    return out


def _signal_seed(cfg, master_seed):
    if "signal_seed" in cfg:
        return _integer(cfg, "signal_seed")
    return ex._default_signal_seed(master_seed)


def cmd_simulate(cfg, args, base):
    _take(cfg, {"p", "D", "spectrum_file", "signal", "delta", "seed", "signal_seed"})
    s = _spectrum(cfg, base)
    delta = _number(cfg, "delta", positive=True)
    seed = args.seed if args.seed is not None else _integer(cfg, "seed")
    (mu,) = _signal_entries(cfg, "signal", base, s.dimension, _signal_seed(cfg, seed))
    if args.dry_run:
        _print_plan({"command": "simulate", "D": s.dimension, "delta": delta, "seed": seed, "signal": mu.label})
        return []
    obs = simulate(s, mu, delta, seed)
    _require_finite(obs.y.tolist(), "y")
    path = args.out / "observation.csv"
    save_observation(obs, path)
    return [path]


def cmd_oracles(cfg, args, base):
    _take(cfg, {"p", "D", "spectrum_file", "signals", "delta", "alpha_list", "kappa", "c_kappa", "signal_seed", "master_seed"})
    s = _spectrum(cfg, base)
    delta = _number(cfg, "delta", positive=True)
    alphas = _alpha_list(cfg, [0.0])
    master = args.seed if args.seed is not None else cfg.get("master_seed", 0)
    mus = _signal_entries(cfg, "signals", base, s.dimension, _signal_seed(cfg, master))
    c_kappa = _number(cfg, "c_kappa", default=1.0, positive=True)
    policy = ex._as_kappa_policy(cfg.get("kappa", "default"), "kappa")
    if args.dry_run:
        _print_plan({"command": "oracles", "D": s.dimension, "rows": len(mus) * len(alphas)})
        return []
    rows = []
    for mu in mus:
        for a in alphas:
            kappa = default_kappa(s, a, delta) if policy == "default" else policy
            rep = oracle_report(s, mu, delta, StoppingConfig(a, kappa, c_kappa))
            rows.append(rep.as_row(mu.label))
    _require_finite([v for row in rows for v in row[1:]], "oracle report")
    path = args.out / "oracles.csv"
    write_rows(path, REPORT_COLUMNS, rows)
    return [path]


_EFF_FIELDS = {"p", "D", "delta", "signals", "alpha_list", "replicates", "master_seed", "kappa", "signal_seed"}


def _efficiency_config(cfg, args, base):
    _take(cfg, _EFF_FIELDS)
    master = args.seed if args.seed is not None else _integer(cfg, "master_seed", 0)
    D = _integer(cfg, "D", 10000, minimum=1)
    signals = []
    for entry in cfg.get("signals", list(BENCHMARK_SIGNALS)):
        if isinstance(entry, dict):
            (mu,) = _signal_entries({"signals": [entry]}, "signals", base, D, None)
            signals.append(mu)
        else:
            signals.append(entry)
    return ex.EfficiencyStudyConfig(
        p=_number(cfg, "p", 0.5, nonnegative=True),
        D=D,
        delta=_number(cfg, "delta", 0.01, positive=True),
        signals=signals,
        alphas=_alpha_list(cfg, [0.0, 0.2, 0.5, 1.0, 1.5]),
        replicates=_integer(cfg, "replicates", 1000, minimum=1),
        master_seed=master,
        kappa_policy=cfg.get("kappa", "default"),
        signal_seed=cfg.get("signal_seed"),
    ).validate()


def cmd_efficiency(cfg, args, base):
    study = _efficiency_config(cfg, args, base)
    if args.dry_run:
        _print_plan(ex.plan_efficiency(study))
        return []
    records = ex.run_efficiency_study(study, workers=args.workers)
    _require_finite([r.loss for r in records], "loss")
    rec_path = args.out / "efficiency_records.csv"
    sum_path = args.out / "efficiency_summary.csv"
    ex.write_efficiency_records(records, rec_path)
    ex.write_summary(ex.summarize(records), sum_path)
    return [rec_path, sum_path]


def _rate_config(cfg, args):
    _take(cfg, {"p", "k_range", "r_max", "beta_min2", "signals", "alpha_list", "replicates",
                "large_k_replicates", "large_k_from", "master_seed", "kappa", "signal_seed"})
    k_range = cfg.get("k_range", list(range(11)))
    if not isinstance(k_range, list):
        raise ConfigError("k_range", "expected a list of integers")
    return ex.RateStudyConfig(
        p=_number(cfg, "p", 0.5, nonnegative=True),
        k_range=k_range,
        r_max=_number(cfg, "r_max", 1000.0, positive=True),
        beta_min2=_number(cfg, "beta_min2", 0.5, nonnegative=True),
        signals=cfg.get("signals", ["supersmooth", "rough"]),
        alphas=_alpha_list(cfg, [0.0, 0.2, 0.5, 1.0, 1.5]),
        replicates=_integer(cfg, "replicates", 1000, minimum=1),
        large_k_replicates=_integer(cfg, "large_k_replicates", 200, minimum=1),
        large_k_from=_integer(cfg, "large_k_from", 8),
        master_seed=args.seed if args.seed is not None else _integer(cfg, "master_seed", 0),
        kappa_policy=cfg.get("kappa", "default"),
        signal_seed=cfg.get("signal_seed"),
    ).validate()


def cmd_rates(cfg, args, base):
    study = _rate_config(cfg, args)
    if args.dry_run:
        _print_plan(ex.plan_rates(study))
        return []
    rows = ex.run_rate_study(study, workers=args.workers)
    _require_finite([row[6] for row in rows], "mean_loss")
    path = args.out / "rates.csv"
    ex.write_rate_rows(rows, path)
    return [path]


def _null_config(cfg, args):
    _take(cfg, {"D_list", "p", "delta", "alpha", "replicates", "master_seed", "kappa"})
    D_list = cfg.get("D_list", [1000, 4000])
    if not isinstance(D_list, list):
        raise ConfigError("D_list", "expected a list of integers")
    return ex.NullBoundConfig(
        D_list=D_list,
        p=_number(cfg, "p", 0.5, nonnegative=True),
        delta=_number(cfg, "delta", 0.01, positive=True),
        alpha=_number(cfg, "alpha", 0.0, nonnegative=True),
        replicates=_integer(cfg, "replicates", 1000, minimum=1),
        master_seed=args.seed if args.seed is not None else _integer(cfg, "master_seed", 0),
        kappa_policy=cfg.get("kappa", "default"),
    ).validate()


def cmd_nullbound(cfg, args, base):
    study = _null_config(cfg, args)
    if args.dry_run:
        _print_plan(ex.plan_null(study))
        return []
    rows = ex.run_null_lowerbound_study(study, workers=args.workers)
    _require_finite([row[6] for row in rows], "mean_loss")
    path = args.out / "nullbound.csv"
    ex.write_null_rows(rows, path)
    return [path]


COMMANDS = {
    "simulate": cmd_simulate,
    "oracles": cmd_oracles,
    "efficiency": cmd_efficiency,
    "rates": cmd_rates,
    "nullbound": cmd_nullbound,
}

_PLOT_TEMPLATES = {
    "efficiency": """\
# Boxplots of relative efficiency and relative stopping time.
import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv({path!r})
fig, axes = plt.subplots(2, 1, figsize=(10, 8))
for ax, metric in zip(axes, ["rel_efficiency", "rel_stopping"]):
    groups = [(f"{{s}} a={{a}}", g[metric].dropna()) for (s, a), g in df.groupby(["signal", "alpha"], sort=False)]
    ax.boxplot([g for _, g in groups], labels=[n for n, _ in groups])
    ax.set_ylabel(metric)
    ax.tick_params(axis="x", rotation=90)
fig.tight_layout()
fig.savefig("efficiency.png")
""",
    "rates": """\
# Log-log plot of mean loss against D, with oracle and sqrt(D) references.
import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv({path!r})
for sig, g in df.groupby("signal", sort=False):
    fig, ax = plt.subplots()
    for a, ga in g.groupby("alpha"):
        ax.loglog(ga["D"], ga["mean_loss"], marker="o", label=f"alpha={{a}}")
    ref = g.drop_duplicates("D")
    ax.loglog(ref["D"], ref["oracle_risk"], "k--", label="oracle")
    ax.loglog(ref["D"], ref["sqrtD_risk"], "k:", label="m = sqrt(D)")
    ax.set_title(sig)
    ax.legend()
    fig.savefig(f"rates_{{sig}}.png")
""",
    "nullbound": """\
# Mean loss for the zero signal against D.
import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv({path!r})
fig, ax = plt.subplots()
ax.loglog(df["D"], df["mean_loss"], marker="o", label="mean loss")
ax.loglog(df["D"], df["lower_bound_order"], "k--", label="lower bound order")
ax.legend()
fig.savefig("nullbound.png")
""",
}


def _emit_plot_script(command, written, out):
    template = _PLOT_TEMPLATES.get(command)
    if template is None or not written:
        return None
    path = out / f"plot_{command}.py"
    path.write_text(template.format(path=written[0].name))
    return path


def _print_plan(plan):
    print(json.dumps(plan, indent=2, sort_keys=True))


def _require_finite(values, what):
    for v in values:
        if isinstance(v, float) and not math.isfinite(v):
            raise NumericError(f"non-finite value in {what}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="JSON configuration file")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--dry-run", action="store_true", help="validate and print the plan only")
    common.add_argument("--emit-plot-script", action="store_true",
                        help="also write a matplotlib script for the produced CSV")
    parser = argparse.ArgumentParser(prog="smoothstop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed", "must be an unsigned 64-bit integer")
        if args.workers < 1:
            raise ConfigError("--workers", "must be at least 1")
        cfg = load_config(args.config)
        base = args.config.resolve().parent
        if not args.dry_run:
            args.out.mkdir(parents=True, exist_ok=True)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            written = COMMANDS[args.command](cfg, args, base)
        if args.emit_plot_script and not args.dry_run:
            script = _emit_plot_script(args.command, written, args.out)
            if script is not None:
                written.append(script)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, SmoothStopError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
