"""Seeded adaptive-sampling experiments and their persistence.

One run proceeds as: initial Latin hypercube, evaluate, then repeatedly
fit the surrogate, maximize the acquisition, evaluate the proposal and
score the refitted model on a fixed test set, until the sample budget is
spent.

Seeds: the run seed depends on (base seed, function, repetition) only, so
initial designs and test sets are shared by all strategies of one
repetition. Strategy-internal randomness draws from substreams that also
include the strategy name.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import gp
from .acquisition import (
    AcquisitionContext,
    PrevIterState,
    StrategyDimensionError,
    committee_fit,
    fit_eloo_model,
    get_strategy,
    mepe_feedback,
)
from .benchmarks import BenchmarkFunction, get_benchmark
from .core import DesignDomain, Dataset, derive_seed, make_rng, scale_domain_to_unit, scale_unit_to_domain
from .doe import LhsConfig, candidate_set, corner_points, default_sizes, extend_lhs, lhs
from .metrics import r2, r2_area
from .optimize import EsConfig, is_duplicate, maximize_continuous, ranked_distinct

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Experiment configuration that cannot run; raised before any evaluation."""


class ResultsParseError(ValueError):
    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


@dataclass
class ExperimentConfig:
    """One function x strategy experiment.

    Sizes left as ``None`` are filled from the per-dimension defaults by
    :meth:`resolved`.
    """

    function: str
    strategy: str = "guess"
    dim: int | None = None
    m_init: int | None = None
    m_max: int | None = None
    m_cand: int | None = None
    m_test: int | None = None
    reps: int = 10
    seed: int = 0
    refit_every: int = 1
    n_restarts: int = 10
    es_max_evals: int | None = None
    record_timing: bool = False

    def benchmark(self) -> BenchmarkFunction:
        return get_benchmark(self.function, self.dim)

    def resolved(self) -> "ExperimentConfig":
        fn = self.benchmark()
        sizes = default_sizes(fn.dim)
        kw = {k: (getattr(self, k) if getattr(self, k) is not None else sizes[k])
              for k in ("m_init", "m_max", "m_cand", "m_test")}
        cfg = dataclasses.replace(self, function=fn.name, dim=fn.dim, strategy=self.strategy.lower(), **kw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        try:
            strat = get_strategy(self.strategy)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        for k in ("m_init", "m_max", "m_cand", "m_test", "reps", "refit_every", "n_restarts"):
            v = getattr(self, k)
            if v is not None and v < 1:
                raise ConfigError(f"{k} must be at least 1")
        if self.m_init < 2:
            raise ConfigError("m_init must be at least 2 to fit a model")
        if self.m_init >= self.m_max:
            raise ConfigError("m_init must be smaller than m_max")
        if strat.max_dim is not None and self.dim > strat.max_dim:
            raise ConfigError(f"{strat.name} supports at most {strat.max_dim} dimensions, "
                              f"{self.function} has {self.dim}")
        if strat.name == "dlased" and self.m_init + 2 ** self.dim >= self.m_max:
            raise ConfigError("dlased: corner sampling would exhaust the sample budget")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class IterationRecord:
    iter: int
    m: int
    x: list
    y: float
    r2: float
    r2_raw: float
    t_fit_s: float | None = None
    t_propose_s: float | None = None


@dataclass
class RunResult:
    config: ExperimentConfig
    rep: int
    seed: int
    initial_X: np.ndarray
    initial_y: np.ndarray
    records: list = field(default_factory=list)

    @property
    def function(self) -> str:
        return self.config.function

    @property
    def dim(self) -> int:
        return self.config.dim

    @property
    def strategy(self) -> str:
        return self.config.strategy

    @property
    def run_id(self) -> str:
        return f"{self.function}/{self.strategy}/rep{self.rep}/seed{self.config.seed}"

    @property
    def r2_history(self) -> np.ndarray:
        return np.array([r.r2 for r in self.records])

    @property
    def r2_area(self) -> float:
        return r2_area(self.r2_history)

    @property
    def best_r2(self) -> float:
        return float(self.r2_history.max())


# ---------------------------------------------------------------------------
# shared run ingredients

def run_seed(config: ExperimentConfig, rep_index: int) -> int:
    return derive_seed(config.seed, config.function, rep_index)


def initial_design(fn: BenchmarkFunction, config: ExperimentConfig, seed: int) -> np.ndarray:
    """Maximin LHS whose points also sit in distinct strata of the m_max grid."""
    return lhs(fn.domain, LhsConfig(config.m_init, seed=derive_seed(seed, "init"),
                                    fine_strata=config.m_max))


def test_set(fn: BenchmarkFunction, config: ExperimentConfig, seed: int):
    X = candidate_set(fn.domain, config.m_test, derive_seed(seed, "test"))
    return X, fn(X)


def score_iteration(model: gp.GpModel, test_X, test_y, prev_best: float, return_raw: bool = False):
    """Rolling-max, zero-clamped test R^2 of ``model`` (``test_X`` in unit coordinates)."""
    raw = r2(test_y, gp.predict_mean(model, test_X))
    best = max(prev_best, max(0.0, raw))
    return (best, raw) if return_raw else best


def _fit_options(config, seed, *tag):
    return gp.FitOptions(n_restarts=config.n_restarts, seed=derive_seed(seed, *tag))


class _Loop:
    """State shared by the adaptive and baseline loops."""

    def __init__(self, config: ExperimentConfig, rep_index: int):
        self.config = config
        self.rep = rep_index
        self.fn = config.benchmark()
        self.domain: DesignDomain = self.fn.domain
        self.seed = run_seed(config, rep_index)
        self.X0 = initial_design(self.fn, config, self.seed)
        self.y0 = self.fn(self.X0)
        test_X, self.test_y = test_set(self.fn, config, self.seed)
        self.test_U = scale_domain_to_unit(self.domain, test_X)
        self.data = Dataset(self.X0, self.y0, self.domain)
        self.model = gp.fit(self.data, _fit_options(config, self.seed, "fit", "initial"))
        self.best = 0.0
        self.result = RunResult(config, rep_index, self.seed, self.X0, self.y0)

    def add(self, t, x_unit, y, t_propose, refit_tag):
        x_raw = scale_unit_to_domain(self.domain, x_unit)
        self.data = self.data.append(x_raw, y)
        t0 = time.perf_counter()
        if (t + 1) % self.config.refit_every == 0:
            self.model = gp.fit(self.data, _fit_options(self.config, self.seed, *refit_tag, t))
        else:
            self.model = gp.condition(self.model, self.data.X_unit, self.data.y)
        t_fit = time.perf_counter() - t0
        self.best, raw = score_iteration(self.model, self.test_U, self.test_y, self.best, return_raw=True)
        timing = self.config.record_timing
        self.result.records.append(IterationRecord(
            iter=t, m=self.data.m, x=[float(v) for v in x_raw], y=float(y),
            r2=float(self.best), r2_raw=float(raw),
            t_fit_s=t_fit if timing else None, t_propose_s=t_propose if timing else None,
        ))

    def evaluate(self, x_unit) -> float:
        return float(self.fn(scale_unit_to_domain(self.domain, x_unit)))


def run_lhs_baseline(config: ExperimentConfig, rep_index: int = 0) -> RunResult:
    """Grow the shared initial design one point at a time along a precomputed LHS.

    The appended points complete the initial design to an ``m_max``-point
    hypercube, so every prefix is scored exactly like an adaptive run.
    """
    config = config.resolved()
    loop = _Loop(config, rep_index)
    ext = extend_lhs(loop.domain, loop.X0, config.m_max, derive_seed(loop.seed, "lhs-extension"))
    ext_unit = scale_domain_to_unit(loop.domain, ext)
    for t, u in enumerate(ext_unit):
        loop.add(t, u, loop.evaluate(u), 0.0, ("fit", "lhs"))
    return loop.result


def run_adaptive(config: ExperimentConfig, rep_index: int = 0) -> RunResult:
    """Run one seeded adaptive-sampling experiment."""
    config = config.resolved()
    strategy = get_strategy(config.strategy)
    if strategy.acquisition is None:
        return run_lhs_baseline(config, rep_index)

    loop = _Loop(config, rep_index)
    n = loop.fn.dim
    unit = DesignDomain.unit(n)
    sub = lambda *tag: derive_seed(loop.seed, strategy.name, *tag)
    corners = list(corner_points(unit)) if strategy.name == "dlased" else []
    prev = PrevIterState()
    acq_t = 0

    for t in range(config.m_max - config.m_init):
        t0 = time.perf_counter()
        model = loop.model
        X_obs = model.train_X
        ctx = None
        while corners and is_duplicate(corners[0], X_obs):
            corners.pop(0)
        if corners:
            x = corners.pop(0)
        else:
            ctx = AcquisitionContext(model, prev_state=prev)
            if strategy.needs_loocv:
                ctx.loocv()
            if strategy.needs_committee:
                ctx.committee = committee_fit(X_obs, model.train_y, _fit_options(config, loop.seed, "committee", t))
            if strategy.needs_eloo:
                ctx.eloo_model = fit_eloo_model(model, ctx.loocv(), _fit_options(config, loop.seed, "eloo", t))
            x = _propose(strategy, ctx, unit, config, sub, t)
        t_propose = time.perf_counter() - t0

        y = loop.evaluate(x)
        if ctx is not None:
            prev = _next_state(strategy, ctx, x, y, acq_t)
            acq_t += 1
        loop.add(t, x, y, t_propose, ("fit", strategy.name))
    return loop.result


def _propose(strategy, ctx, unit, config, sub, t):
    X_obs = ctx.X_obs
    acq = strategy.acquisition
    if strategy.candidate_based:
        C = candidate_set(unit, config.m_cand, sub("candidates", t))
        ctx.candidates = C
        i = ranked_distinct(acq(ctx, C), C, X_obs)
        if i is not None:
            return C[i]
    else:
        es = EsConfig(max_evals=config.es_max_evals, seed=sub("es", t))
        x, _ = maximize_continuous(lambda u: acq(ctx, u), unit, es)
        if not is_duplicate(x, X_obs):
            return x
        es = dataclasses.replace(es, seed=sub("es-restart", t))
        x, _ = maximize_continuous(lambda u: acq(ctx, u), unit, es)
        if not is_duplicate(x, X_obs):
            return x
    rng = make_rng(sub("fallback", t))
    while True:
        x = rng.random(unit.dim)
        if not is_duplicate(x, X_obs):
            log.warning("%s: acquisition proposed an observed point, using a random point", strategy.name)
            return x


def _next_state(strategy, ctx, x, y, acq_t) -> PrevIterState:
    state = PrevIterState(t=acq_t + 1, last_point=np.asarray(x, dtype=float).copy())
    if strategy.name == "mepe":
        state.last_true_error, state.last_loocv_estimate = mepe_feedback(ctx.model, ctx.loocv(), x, y)
    if strategy.name == "dlased":
        state.prev_loocv = ctx.loocv() * ctx.model.norm_stats.y_sigma
        state.prev_eloo_model = ctx.eloo_model
    return state


def _run_task(task):
    return run_adaptive(*task)


def run_many(tasks, jobs: int = 1) -> list:
    """Run ``(config, rep)`` pairs, in worker processes when ``jobs > 1``.

    Every run derives its own seeds, so the results (returned in task
    order) do not depend on ``jobs``.
    """
    tasks = list(tasks)
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    if jobs == 1 or len(tasks) < 2:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(_run_task, tasks))


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list:
    """All repetitions of ``config``."""
    config = config.resolved()
    return run_many([(config, rep) for rep in range(config.reps)], jobs)


# ---------------------------------------------------------------------------
# persistence

def _header(result: RunResult) -> dict:
    return {
        "type": "header",
        "schema_version": SCHEMA_VERSION,
        "run_id": result.run_id,
        "function": result.function,
        "dim": result.dim,
        "strategy": result.strategy,
        "rep": result.rep,
        "seed": result.seed,
        "config": result.config.to_dict(),
        "initial_X": np.asarray(result.initial_X).tolist(),
        "initial_y": np.asarray(result.initial_y).tolist(),
    }


def _iteration(result: RunResult, rec: IterationRecord) -> dict:
    return {
        "type": "iteration",
        "run_id": result.run_id,
        "function": result.function,
        "dim": result.dim,
        "strategy": result.strategy,
        "rep": result.rep,
        "seed": result.seed,
        **dataclasses.asdict(rec),
    }


def write_results(results, path, append: bool = False) -> None:
    """Write one or more runs as line-delimited JSON (header line, then one line per iteration)."""
    if isinstance(results, RunResult):
        results = [results]
    with open(path, "a" if append else "w") as fh:
        for res in results:
            fh.write(json.dumps(_header(res)) + "\n")
            for rec in res.records:
                fh.write(json.dumps(_iteration(res, rec)) + "\n")


_RECORD_FIELDS = [f.name for f in dataclasses.fields(IterationRecord)]
_CONFIG_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def read_results(path) -> list:
    """Parse every run stored in ``path``."""
    runs = []
    current = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ResultsParseError(path, lineno, f"corrupt line: {exc.msg}") from None
            kind = obj.get("type") if isinstance(obj, dict) else None
            if kind == "header":
                if obj.get("schema_version") != SCHEMA_VERSION:
                    raise ResultsParseError(path, lineno, f"unsupported schema version {obj.get('schema_version')!r}")
                try:
                    cfg = ExperimentConfig(**{k: v for k, v in obj["config"].items() if k in _CONFIG_FIELDS})
                    current = RunResult(cfg, int(obj["rep"]), int(obj["seed"]),
                                        np.array(obj["initial_X"], dtype=float),
                                        np.array(obj["initial_y"], dtype=float))
                except (KeyError, TypeError, ValueError) as exc:
                    raise ResultsParseError(path, lineno, f"malformed header: {exc}") from None
                runs.append(current)
            elif kind == "iteration":
                if current is None:
                    raise ResultsParseError(path, lineno, "iteration record before any header")
                if obj.get("run_id") != current.run_id:
                    raise ResultsParseError(path, lineno, "iteration record does not match the preceding header")
                try:
                    current.records.append(IterationRecord(**{k: obj[k] for k in _RECORD_FIELDS}))
                except KeyError as exc:
                    raise ResultsParseError(path, lineno, f"missing field {exc}") from None
            else:
                raise ResultsParseError(path, lineno, f"unknown record type {kind!r}")
    if current is None:
        raise ResultsParseError(path, 0, "no header found")
    return runs
