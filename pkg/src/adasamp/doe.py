"""Space-filling designs: Latin hypercubes, candidate sets and box corners."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .core import DesignDomain, make_rng, scale_unit_to_domain

# Per-dimension experiment sizes: initial, maximum, candidate and test samples.
TABLE_SETTINGS = {
    1: dict(m_init=10, m_max=40, m_cand=5000, m_test=100000),
    2: dict(m_init=20, m_max=140, m_cand=10000, m_test=100000),
    3: dict(m_init=30, m_max=180, m_cand=15000, m_test=100000),
    4: dict(m_init=40, m_max=250, m_cand=20000, m_test=100000),
    6: dict(m_init=60, m_max=250, m_cand=30000, m_test=100000),
    8: dict(m_init=80, m_max=250, m_cand=40000, m_test=100000),
}

MAX_CORNER_DIM = 20


class CapacityError(ValueError):
    """Request would enumerate an impractically large design."""


def default_sizes(n: int) -> dict:
    """Experiment sizes for input dimension ``n``.

    Dimensions outside the tabulated ones fall back to ``m_init = 10 n`` and
    the sizes of the nearest tabulated dimension at or below ``n``.
    """
    if n in TABLE_SETTINGS:
        return dict(TABLE_SETTINGS[n])
    if n < 1:
        raise ValueError("dimension must be positive")
    base = dict(TABLE_SETTINGS[max(k for k in TABLE_SETTINGS if k <= n)])
    base["m_init"] = 10 * n
    base["m_cand"] = 5000 * n
    base["m_max"] = max(base["m_max"], base["m_init"] + 1)
    return base


@dataclass
class LhsConfig:
    """Latin hypercube settings.

    ``fine_strata`` (>= m) additionally places every point in its own stratum
    of a finer ``fine_strata``-grid so the design can later be extended to a
    ``fine_strata``-point hypercube with :func:`extend_lhs`.
    """

    m: int
    criterion: str = "maximin"
    n_candidates_internal: int = 20
    seed: int | None = 0
    fine_strata: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.criterion not in ("maximin", "plain"):
            raise ValueError("criterion must be 'maximin' or 'plain'")
        if self.n_candidates_internal < 1:
            raise ValueError("n_candidates_internal must be at least 1")
        if self.fine_strata is not None and self.fine_strata < self.m:
            raise ValueError("fine_strata must be at least m")


def _min_distance(U: np.ndarray) -> float:
    return float(pdist(U).min()) if U.shape[0] > 1 else np.inf


def _draw_plain(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    perms = np.argsort(rng.random((m, n)), axis=0)
    return (perms + rng.random((m, n))) / m


def _draw_nested(m: int, n: int, fine: int, rng: np.random.Generator) -> np.ndarray:
    owner = np.floor((np.arange(fine) + 0.5) / fine * m).astype(int)
    U = np.empty((m, n))
    for d in range(n):
        lo = np.empty(m)
        hi = np.empty(m)
        for j in range(m):
            i = rng.choice(np.flatnonzero(owner == j))
            lo[j] = max(i / fine, j / m)
            hi[j] = min((i + 1) / fine, (j + 1) / m)
        vals = lo + rng.random(m) * (hi - lo)
        U[:, d] = vals[rng.permutation(m)]
    return U


def lhs_unit(m: int, n: int, config: LhsConfig | None = None, seed=None) -> np.ndarray:
    config = config or LhsConfig(m)
    rng = make_rng(config.seed if seed is None else seed)
    draws = 1 if config.criterion == "plain" else config.n_candidates_internal
    best, best_d = None, -np.inf
    for _ in range(draws):
        if config.fine_strata is None:
            U = _draw_plain(m, n, rng)
        else:
            U = _draw_nested(m, n, config.fine_strata, rng)
        if draws == 1:
            return U
        d = _min_distance(U)
        if best is None or d > best_d:
            best, best_d = U, d
    return best


def lhs(domain: DesignDomain, config: LhsConfig) -> np.ndarray:
    """Latin hypercube of ``config.m`` points inside ``domain``.

    With the maximin criterion the best of ``n_candidates_internal`` random
    hypercubes (largest minimum pairwise distance) is returned.
    """
    return scale_unit_to_domain(domain, lhs_unit(config.m, domain.dim, config))


def extend_lhs(domain: DesignDomain, X_existing, m_total: int, seed,
               n_candidates_internal: int = 20) -> np.ndarray:
    """Points that grow ``X_existing`` into an ``m_total``-point hypercube.

    Each dimension's free strata of the ``m_total`` grid are filled once, in
    random order; among ``n_candidates_internal`` draws the one with the
    largest minimum distance of the combined design wins. If existing points
    already share a stratum the free strata are sub-sampled and the marginal
    property of the union cannot hold.
    """
    X_existing = np.atleast_2d(np.asarray(X_existing, dtype=float))
    U0 = (X_existing - domain.lower) / domain.width
    m0, n = U0.shape
    k = m_total - m0
    if k < 0:
        raise ValueError("m_total is smaller than the existing design")
    if k == 0:
        return np.empty((0, n))
    rng = make_rng(seed)
    occupied = np.minimum(np.floor(U0 * m_total).astype(int), m_total - 1)
    free = [np.setdiff1d(np.arange(m_total), occupied[:, d]) for d in range(n)]
    best, best_d = None, -np.inf
    for _ in range(n_candidates_internal):
        U = np.empty((k, n))
        for d in range(n):
            strata = rng.permutation(free[d])[:k]
            U[:, d] = (strata + rng.random(k)) / m_total
        dist = _min_distance(np.vstack([U0, U]))
        if best is None or dist > best_d:
            best, best_d = U, dist
    return scale_unit_to_domain(domain, best)


def candidate_set(domain: DesignDomain, m_cand: int, seed) -> np.ndarray:
    """Plain Latin hypercube of ``m_cand`` candidate points."""
    if m_cand < 1:
        raise ValueError("m_cand must be at least 1")
    return lhs(domain, LhsConfig(m_cand, criterion="plain", seed=seed))


def corner_points(domain: DesignDomain) -> np.ndarray:
    """All 2^n vertices of the box, first coordinate as the most significant bit."""
    n = domain.dim
    if n > MAX_CORNER_DIM:
        raise CapacityError(f"refusing to enumerate 2^{n} corners (limit n <= {MAX_CORNER_DIM})")
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return np.where(bits == 1, domain.upper, domain.lower)
