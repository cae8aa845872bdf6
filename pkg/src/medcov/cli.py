"""Command-line interface.

Subcommands: ``simulate`` (emit synthetic CSV), ``fit-stream`` (one-pass
robust fit of a CSV), ``fit-weiszfeld`` (batch baseline), ``bench``
(Monte Carlo table), ``curve`` (convergence checkpoints).

Every flag can also be supplied through ``--config FILE`` holding flat
``key=value`` lines (``#`` comments allowed, dashes and underscores
interchangeable in keys); explicit command-line flags override the
file.  Exit codes: 0 success, 2 configuration error, 3 data error,
4 numerical failure.  The ``MEDCOV_MAX_WORKERS`` environment variable
caps the replication worker pool.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as _bench
from .errors import ConfigError, DataError, NumericalError
from .geomedian import StepSchedule, weiszfeld_median
from .linalg import eigh_descending
from .mcm import weiszfeld_mcm
from .simgen import CONTAMINATIONS, ScenarioConfig, draw_sample


def _onoff(value):
    text = str(value).strip().lower()
    if text in ("on", "true", "1", "yes"):
        return True
    if text in ("off", "false", "0", "no"):
        return False
    raise ConfigError(f"expected on/off, got {value!r}")


_CONVERTERS = {
    "d": int, "n": int, "reps": int, "seed": int, "q": int,
    "eigen_seed": int, "eigen_lag": int, "max_iter": int,
    "delta": float, "alpha": float, "c_median": float, "c_mcm": float,
    "eps": float,
    "scenario": str, "estimators": str, "out": str, "input": str,
    "scores_out": str, "resume": str, "checkpoints": str,
    "psd_mode": _onoff, "header": _onoff,
}

_KEY_ALIASES = {"in": "input"}

_SCHEDULE_KEYS = ("alpha", "c_median", "c_mcm")

_DEFAULTS = {
    "simulate": {
        "d": 50, "n": 200, "delta": 0.0, "scenario": "none", "seed": 0,
        "out": "-", "header": False,
    },
    "fit-stream": {
        "input": None, "q": 2, "alpha": 0.75, "c_median": 2.0, "c_mcm": 2.0,
        "psd_mode": True, "eigen_seed": 0, "eigen_lag": None, "out": None,
        "scores_out": None, "resume": None, "header": False,
    },
    "fit-weiszfeld": {
        "input": None, "q": 2, "eps": 1e-8, "max_iter": 1000, "out": None,
        "header": False,
    },
    # bench/curve generate their own data, so missing step constants are
    # calibrated to the scenario dimension (see calibrated_schedules).
    "bench": {
        "d": 50, "n": 200, "delta": 0.0, "scenario": "none",
        "estimators": ",".join(_bench.ESTIMATORS), "reps": 100, "seed": 0,
        "q": 2, "alpha": 0.75, "c_median": None, "c_mcm": None, "out": None,
    },
    "curve": {
        "d": 50, "n": 200, "delta": 0.0, "scenario": "none", "reps": 20,
        "seed": 0, "q": 2, "alpha": 0.75, "c_median": None, "c_mcm": None,
        "psd_mode": True, "eigen_lag": None, "checkpoints": None, "out": None,
    },
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="medcov",
        description="Streaming robust PCA via the median covariation matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(cmd, help_text):
        p = sub.add_parser(cmd, help=help_text)
        p.add_argument("--config", default=None, metavar="FILE",
                       help="key=value file supplying defaults for any flag")
        keys = _DEFAULTS[cmd]
        if "d" in keys:
            p.add_argument("--d", type=int, default=None, help="dimension")
        if "n" in keys:
            p.add_argument("--n", type=int, default=None, help="sample size")
        if "delta" in keys:
            p.add_argument("--delta", type=float, default=None,
                           help="contamination rate in [0, 1]")
        if "scenario" in keys:
            p.add_argument("--scenario", default=None, choices=CONTAMINATIONS,
                           help="contamination law")
        if "estimators" in keys:
            p.add_argument("--estimators", default=None,
                           help="comma-separated subset of "
                                + ",".join(_bench.ESTIMATORS))
        if "reps" in keys:
            p.add_argument("--reps", type=int, default=None,
                           help="Monte Carlo replications")
        if "seed" in keys:
            p.add_argument("--seed", type=int, default=None, help="base seed")
        if "q" in keys:
            p.add_argument("--q", type=int, default=None,
                           help="eigenspace dimension")
        if "alpha" in keys:
            p.add_argument("--alpha", type=float, default=None,
                           help="step decay exponent in (0.5, 1)")
        if "c_median" in keys:
            base = keys["c_median"]
            p.add_argument("--c-median", dest="c_median", type=float,
                           default=None,
                           help="median step constant (default "
                                + ("0.5*sqrt(d)" if base is None else str(base))
                                + ")")
        if "c_mcm" in keys:
            base = keys["c_mcm"]
            p.add_argument("--c-mcm", dest="c_mcm", type=float, default=None,
                           help="MCM step constant (default "
                                + ("0.5*d" if base is None else str(base)) + ")")
        if "psd_mode" in keys:
            p.add_argument("--psd-mode", dest="psd_mode", default=None,
                           choices=("on", "off"), help="PSD step clipping")
        if "eigen_seed" in keys:
            p.add_argument("--eigen-seed", dest="eigen_seed", type=int,
                           default=None, help="seed for tracker reinits")
        if "eigen_lag" in keys:
            p.add_argument("--eigen-lag", dest="eigen_lag", type=int,
                           default=None,
                           help="MCM updates to absorb before eigen tracking"
                                " starts (default: one per dimension)")
        if "input" in keys:
            p.add_argument("--in", dest="input", default=None, metavar="CSV",
                           help="input observations, one row each")
        if "eps" in keys:
            p.add_argument("--eps", type=float, default=None,
                           help="Weiszfeld stopping displacement")
        if "max_iter" in keys:
            p.add_argument("--max-iter", dest="max_iter", type=int,
                           default=None, help="Weiszfeld iteration cap")
        if "resume" in keys:
            p.add_argument("--resume", default=None, metavar="SNAPSHOT",
                           help="snapshot JSON to continue from")
        if "scores_out" in keys:
            p.add_argument("--scores-out", dest="scores_out", default=None,
                           metavar="CSV", help="per-row score sidecar")
        if "checkpoints" in keys:
            p.add_argument("--checkpoints", default=None,
                           help="comma-separated increasing sample sizes")
        if "header" in keys:
            p.add_argument("--header", action="store_true", default=False,
                           help="emit/expect a header line x1..xd")
        if "out" in keys:
            p.add_argument("--out", default=None,
                           help="output path ('-' for stdout where supported)")
        return p

    add("simulate", "draw a synthetic contaminated sample and write CSV")
    add("fit-stream", "one-pass streaming robust fit of a CSV stream")
    add("fit-weiszfeld", "batch Weiszfeld median + MCM fit of a CSV file")
    add("bench", "Monte Carlo benchmark table over replications")
    add("curve", "convergence-curve table at checkpoints")
    return parser


def _read_config_file(path):
    data = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(
                        f"{path}: line {line_no}: expected key=value, got {line!r}"
                    )
                key = key.strip().replace("-", "_")
                key = _KEY_ALIASES.get(key, key)
                data[key] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return data


def _merge_options(args):
    cmd = args.command
    opts = dict(_DEFAULTS[cmd])
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key not in opts:
                raise ConfigError(
                    f"config key {key!r} is not a {cmd} option "
                    f"(expected one of: {', '.join(sorted(opts))})"
                )
            try:
                opts[key] = _CONVERTERS[key](raw)
            except (ValueError, TypeError):
                raise ConfigError(
                    f"config key {key!r}: cannot parse {raw!r}"
                ) from None
    for key in opts:
        cli_value = getattr(args, key, None)
        if key == "header":
            if cli_value:  # flag given; config may still enable it
                opts[key] = True
        elif cli_value is not None:
            opts[key] = _onoff(cli_value) if key == "psd_mode" else cli_value
    return opts


def _schedules(opts):
    try:
        median = StepSchedule(opts["c_median"], opts["alpha"])
        mcm = StepSchedule(opts["c_mcm"], opts["alpha"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return median, mcm


def _require_input(opts):
    if not opts["input"]:
        raise ConfigError("an input CSV is required (--in or config key 'in')")
    return opts["input"]


def _load_points(path, header):
    vectors = [vec for _, vec in _bench.iter_csv_rows(path, skip_header=header)]
    if not vectors:
        raise DataError(f"{path}: file contains no observations")
    return np.array(vectors)


def _cmd_simulate(opts):
    cfg = ScenarioConfig(d=opts["d"], delta=opts["delta"],
                         contamination=opts["scenario"], seed=opts["seed"])
    sample = draw_sample(cfg, opts["n"])
    if opts["out"] == "-":
        _bench._write_csv_stream(sys.stdout, sample, opts["header"])
    else:
        _bench.write_csv(opts["out"], sample, header=opts["header"])
    return 0


def _cmd_fit_stream(opts):
    median_schedule, cov_schedule = _schedules(opts)
    snapshot, report = _bench.fit_stream(
        _require_input(opts),
        q=opts["q"],
        median_schedule=median_schedule,
        cov_schedule=cov_schedule,
        psd_mode=opts["psd_mode"],
        eigen_seed=opts["eigen_seed"],
        eigen_lag=opts["eigen_lag"],
        resume=opts["resume"],
        scores_out=opts["scores_out"],
        skip_header=opts["header"],
    )
    if opts["out"]:
        _bench.save_snapshot(snapshot, opts["out"])
    print(json.dumps(report))
    return 0


def _cmd_fit_weiszfeld(opts):
    points = _load_points(_require_input(opts), opts["header"])
    if not (1 <= opts["q"] <= points.shape[1]):
        raise ConfigError(f"q must be in [1, {points.shape[1]}], got {opts['q']}")
    m_hat = weiszfeld_median(points, eps=opts["eps"], max_iter=opts["max_iter"])
    gamma = weiszfeld_mcm(points, m_hat, eps=opts["eps"], max_iter=opts["max_iter"])
    values, _ = eigh_descending(gamma)
    result = {
        "n": int(points.shape[0]),
        "median": m_hat.tolist(),
        "mcm": gamma.tolist(),
        "eigenvalues": values[: opts["q"]].tolist(),
    }
    text = json.dumps(result)
    if opts["out"]:
        with open(opts["out"], "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _run_config(opts, *, replications):
    scenario = ScenarioConfig(d=opts["d"], delta=opts["delta"],
                              contamination=opts["scenario"], seed=opts["seed"])
    try:
        median_schedule, cov_schedule = _bench.calibrated_schedules(
            opts["d"], c_median=opts["c_median"], c_mcm=opts["c_mcm"],
            alpha=opts["alpha"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    estimators = tuple(e.strip() for e in opts.get("estimators", "").split(",") if e.strip()) \
        if "estimators" in opts else _bench.ESTIMATORS
    return _bench.RunConfig(
        scenario=scenario,
        n=opts["n"],
        q=opts["q"],
        replications=replications,
        estimators=estimators,
        median_schedule=median_schedule,
        cov_schedule=cov_schedule,
        output_path=opts["out"],
        seed=opts["seed"],
    )


def _cmd_bench(opts):
    cfg = _run_config(opts, replications=opts["reps"])
    rows = _bench.run_benchmark(cfg)
    if not cfg.output_path:
        for line in _bench.report_lines(rows):
            print(line)
    return 0


def _cmd_curve(opts):
    if not opts["checkpoints"]:
        raise ConfigError("--checkpoints is required (comma-separated integers)")
    try:
        checkpoints = [int(c) for c in str(opts["checkpoints"]).split(",") if c.strip()]
    except ValueError:
        raise ConfigError(
            f"cannot parse checkpoints {opts['checkpoints']!r}"
        ) from None
    cfg = _run_config(opts, replications=opts["reps"])
    points = _bench.convergence_curve(cfg, checkpoints, psd_mode=opts["psd_mode"],
                                      eigen_lag=opts["eigen_lag"])
    if not cfg.output_path:
        for line in _bench.curve_lines(points):
            print(line)
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "fit-stream": _cmd_fit_stream,
    "fit-weiszfeld": _cmd_fit_weiszfeld,
    "bench": _cmd_bench,
    "curve": _cmd_curve,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](_merge_options(args))
    except ConfigError as exc:
        print(f"medcov: config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"medcov: config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"medcov: data error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"medcov: data error: {exc}", file=sys.stderr)
        return 3
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"medcov: numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
