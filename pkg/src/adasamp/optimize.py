"""Acquisition maximizers: a steady-state (mu+1) evolution strategy and exhaustive candidate scans."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DesignDomain, make_rng
from .doe import LhsConfig, lhs

DUPLICATE_TOL = 1e-9


class OptimizerError(RuntimeError):
    pass


@dataclass
class EsConfig:
    """(mu+1)-ES settings.

    ``max_evals=None`` means ``2000 * n``. ``mutation_sigma`` is relative to
    the box width and shrinks by ``decay`` after ``stall_factor * n``
    offspring in a row fail to improve the incumbent.
    """

    mu: int = 20
    max_evals: int | None = None
    mutation_sigma: float = 0.1
    decay: float = 0.85
    stall_factor: int = 50
    seed: int | None = 0

    def __post_init__(self):
        if self.mu < 2:
            raise ValueError("mu must be at least 2")
        if self.max_evals is not None and self.max_evals < self.mu:
            raise ValueError("max_evals must be at least mu")
        if not self.mutation_sigma > 0:
            raise ValueError("mutation_sigma must be positive")


def _score(objective, x) -> float:
    try:
        v = float(objective(x))
    except (FloatingPointError, ValueError, ZeroDivisionError):
        return -np.inf
    return v if np.isfinite(v) else -np.inf


def maximize_continuous(objective, domain: DesignDomain, config: EsConfig | None = None,
                        history: list | None = None):
    """Maximize ``objective`` over the box with a (mu+1) evolution strategy.

    Each generation mutates one uniformly chosen parent; the offspring
    replaces the worst parent when it is better. Returns ``(x_best,
    value)``. If ``history`` is a list, the incumbent value after every
    evaluation is appended to it.
    """
    config = config or EsConfig()
    rng = make_rng(config.seed)
    n = domain.dim
    budget = config.max_evals if config.max_evals is not None else 2000 * n
    width = domain.width

    pop = lhs(domain, LhsConfig(config.mu, criterion="plain", seed=rng))
    vals = np.array([_score(objective, x) for x in pop])
    if not np.any(np.isfinite(vals)):
        raise OptimizerError("objective is non-finite at every initial point")
    best = int(np.argmax(vals))
    best_x, best_v = pop[best].copy(), float(vals[best])
    if history is not None:
        history.extend(np.maximum.accumulate(vals).tolist())

    sigma = config.mutation_sigma
    stall = 0
    evals = config.mu
    while evals < budget:
        parent = pop[rng.integers(config.mu)]
        child = np.clip(parent + rng.normal(size=n) * sigma * width, domain.lower, domain.upper)
        v = _score(objective, child)
        evals += 1
        worst = int(np.argmin(vals))
        if v > vals[worst]:
            pop[worst] = child
            vals[worst] = v
        if v > best_v:
            best_x, best_v = child.copy(), v
            stall = 0
        else:
            stall += 1
            if stall >= config.stall_factor * n:
                sigma *= config.decay
                stall = 0
        if history is not None:
            history.append(best_v)
    return best_x, best_v


def _clean(values) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    return np.where(np.isfinite(v), v, -np.inf)


def maximize_over_candidates(objective, candidates, vectorized: bool = True):
    """Exact argmax over a finite candidate set; ties go to the lowest index.

    Returns ``(x, value, index)``.
    """
    C = np.atleast_2d(np.asarray(candidates, dtype=float))
    if C.shape[0] == 0:
        raise ValueError("empty candidate set")
    vals = _clean(objective(C) if vectorized else [objective(c) for c in C])
    i = int(np.argmax(vals))
    return C[i], float(vals[i]), i


def ranked_distinct(values, candidates, X_obs, tol: float = DUPLICATE_TOL):
    """Index of the best candidate not within ``tol`` of an observed point.

    Candidates are visited by decreasing value (stable, so ties keep index
    order). Returns ``None`` when every candidate collides.
    """
    vals = _clean(values)
    C = np.atleast_2d(np.asarray(candidates, dtype=float))
    X_obs = np.atleast_2d(np.asarray(X_obs, dtype=float))
    for i in np.argsort(-vals, kind="stable"):
        if not is_duplicate(C[i], X_obs, tol):
            return int(i)
    return None


def is_duplicate(x, X_obs, tol: float = DUPLICATE_TOL) -> bool:
    if X_obs.size == 0:
        return False
    return bool(np.min(np.max(np.abs(X_obs - x), axis=1)) <= tol)
