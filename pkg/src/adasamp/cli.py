"""Command-line entry point: ``run``, ``suite``, ``report`` and ``list``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .acquisition import STRATEGIES
from .benchmarks import SUITES, UnknownBenchmarkError, list_benchmarks
from .harness import ConfigError, ExperimentConfig, ResultsParseError, read_results, run_many, write_results
from .metrics import aggregate, write_rank_table_csv, write_summary_csv

log = logging.getLogger("adasamp")

# flag name -> ExperimentConfig field; the config file uses the flag names
_EXPERIMENT_FLAGS = {
    "function": "function",
    "dim": "dim",
    "strategy": "strategy",
    "reps": "reps",
    "seed": "seed",
    "m-init": "m_init",
    "m-max": "m_max",
    "m-cand": "m_cand",
    "m-test": "m_test",
    "refit-every": "refit_every",
    "n-restarts": "n_restarts",
    "timing": "record_timing",
}


class UsageError(Exception):
    pass


def _add_experiment_flags(p, suite=False):
    if not suite:
        p.add_argument("--function")
        p.add_argument("--strategy")
    else:
        p.add_argument("--strategies", help="comma-separated strategy names (default: all that fit the dimension)")
    p.add_argument("--dim", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--m-init", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--m-cand", type=int)
    p.add_argument("--m-test", type=int)
    p.add_argument("--refit-every", type=int)
    p.add_argument("--n-restarts", type=int, help="hyperparameter restarts per fit (default 10)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")
    p.add_argument("--timing", action="store_true", default=None,
                   help="store wall-clock times (result files are then no longer reproducible bytewise)")
    p.add_argument("--out", required=not suite, help="result file (line-delimited JSON)")
    p.add_argument("--config", help="JSON file with the same keys as the flags; flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adasamp", description="Adaptive sampling experiments for GP surrogates.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_experiment_flags(sub.add_parser("run", help="one function x strategy, several repetitions"))
    suite = sub.add_parser("suite", help="every function and strategy of one dimension suite")
    _add_experiment_flags(suite, suite=True)

    rep = sub.add_parser("report", help="aggregate result files into a summary CSV and a rank table")
    rep.add_argument("files", nargs="+")
    rep.add_argument("--out", required=True, help="per-run summary CSV")
    rep.add_argument("--ranks", help="rank table CSV (default: <out>_ranks.csv)")

    ls = sub.add_parser("list", help="show benchmarks and strategies")
    ls.add_argument("--dim", type=int)
    return parser


def _load_config_file(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    out = {}
    for key, value in raw.items():
        flag = key.replace("_", "-")
        if flag == "out":
            out["out"] = value
        elif flag == "strategies":
            out["strategies"] = value
        elif flag in _EXPERIMENT_FLAGS:
            out[flag] = value
        else:
            raise UsageError(f"unknown config key {key!r}")
    return out


def _merged(args) -> dict:
    """Config file values overridden by explicitly given flags."""
    values = _load_config_file(args.config) if args.config else {}
    for flag in list(_EXPERIMENT_FLAGS) + ["out", "strategies"]:
        v = getattr(args, flag.replace("-", "_"), None)
        if v is not None:
            values[flag] = v
    return values


def _experiment(values: dict, **override) -> ExperimentConfig:
    kw = {_EXPERIMENT_FLAGS[k]: v for k, v in values.items() if k in _EXPERIMENT_FLAGS}
    kw.update(override)
    if not kw.get("function"):
        raise UsageError("--function is required")
    try:
        return ExperimentConfig(**kw).resolved()
    except (UnknownBenchmarkError, ConfigError) as exc:
        raise UsageError(exc.args[0] if exc.args else str(exc)) from None
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _jobs(args) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return args.jobs


def cmd_run(args) -> int:
    values = _merged(args)
    if "out" not in values:
        raise UsageError("--out is required")
    config = _experiment(values)
    log.info("%s/%s: %d reps", config.function, config.strategy, config.reps)
    write_results(run_many([(config, rep) for rep in range(config.reps)], _jobs(args)), values["out"])
    return 0


def cmd_suite(args) -> int:
    values = _merged(args)
    dim = values.get("dim")
    if dim not in SUITES:
        raise UsageError(f"--dim must be one of {sorted(SUITES)}")
    names = values.get("strategies")
    if isinstance(names, str):
        names = [s.strip() for s in names.split(",") if s.strip()]
    if names:
        unknown = [s for s in names if s.lower() not in STRATEGIES]
        if unknown:
            raise UsageError(f"unknown strategies {unknown}")
    else:
        names = [s.name for s in STRATEGIES.values() if s.max_dim is None or dim <= s.max_dim]
    out = values.get("out") or f"suite_dim{dim}.jsonl"
    configs = [_experiment(values, function=fn, strategy=s)
               for fn in SUITES[dim] for s in names]
    Path(out).write_text("")
    jobs = _jobs(args)
    for config in configs:
        log.info("%s/%s: %d reps", config.function, config.strategy, config.reps)
        write_results(run_many([(config, rep) for rep in range(config.reps)], jobs), out, append=True)
    return 0


def cmd_report(args) -> int:
    runs = []
    for path in args.files:
        runs.extend(read_results(path))
    summary = aggregate(runs)
    write_summary_csv(summary, args.out)
    out = Path(args.out)
    ranks = args.ranks or str(out.with_name(out.stem + "_ranks.csv"))
    write_rank_table_csv(summary, ranks)
    return 0


def cmd_list(args) -> int:
    try:
        fns = list_benchmarks(args.dim)
    except UnknownBenchmarkError as exc:
        raise UsageError(exc.args[0]) from None
    print("benchmarks:")
    for fn in fns:
        lo, hi = fn.domain.lower[0], fn.domain.upper[0]
        print(f"  {fn.name:<18} n={fn.dim}  [{lo:g}, {hi:g}]^{fn.dim}")
    print("strategies:")
    for s in STRATEGIES.values():
        note = f"  (n <= {s.max_dim})" if s.max_dim else ""
        print(f"  {s.name}{note}")
    return 0


_COMMANDS = {"run": cmd_run, "suite": cmd_suite, "report": cmd_report, "list": cmd_list}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"adasamp: error: {exc}", file=sys.stderr)
        return 2
    except (ResultsParseError, OSError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"adasamp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
