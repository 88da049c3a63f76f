"""Acquisition functions for global-fit adaptive sampling.

Every acquisition takes an :class:`AcquisitionContext` and one point or a
``(p, n)`` batch of points in unit-scaled coordinates, and returns
non-negative scores in standardized response units. Larger is better.

Observed-point lookups ("Voronoi cells") are done implicitly by nearest
neighbour search; ties go to the lowest observation index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import Delaunay, QhullError
from scipy.spatial.distance import cdist

from . import gp
from .gp import GpModel
from .kernels import KernelSpec

MAX_DLASED_DIM = 4
_TINY = 1e-16
_DEGENERATE_VOLUME = 1e-14

COMMITTEE_KERNELS = (
    KernelSpec("squared_exponential"),
    KernelSpec("matern32"),
    KernelSpec("matern52"),
    KernelSpec("dot_product"),
    KernelSpec("rational_quadratic"),
)


class StrategyDimensionError(ValueError):
    """Strategy cannot run in the requested input dimension."""


@dataclass
class PrevIterState:
    """What a strategy remembers from the previous iteration.

    Errors are stored in raw response units so that ratios stay meaningful
    when the response standardization changes between iterations.
    """

    t: int = 0
    last_point: np.ndarray | None = None
    last_true_error: float | None = None
    last_loocv_estimate: float | None = None
    prev_loocv: np.ndarray | None = None
    prev_eloo_model: GpModel | None = None


@dataclass
class AcquisitionContext:
    model: GpModel
    candidates: np.ndarray | None = None
    observed_loocv: np.ndarray | None = None
    prev_state: PrevIterState = field(default_factory=PrevIterState)
    committee: list | None = None
    eloo_model: GpModel | None = None
    alpha_wm: float = 1.0
    alpha_gs: float = 1.0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def X_obs(self) -> np.ndarray:
        return self.model.train_X

    @property
    def y_obs(self) -> np.ndarray:
        return self.model.train_y_norm

    @property
    def dim(self) -> int:
        return self.model.n

    @property
    def d_max(self) -> float:
        return math.sqrt(self.dim)

    def loocv(self) -> np.ndarray:
        if self.observed_loocv is None:
            self.observed_loocv = gp.loocv_errors_fast(self.model)
        return self.observed_loocv

    def cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def candidate_max(self, key, fn) -> float:
        """Max of ``fn`` over the candidate set, cached per context."""
        if self.candidates is None:
            raise ValueError(f"{key} needs a candidate set for its normalizer")
        return self.cached(("max", key), lambda: float(np.max(fn(self.candidates))))


def _batch(x):
    x = np.asarray(x, dtype=float)
    return np.atleast_2d(x), x.ndim == 1


def _out(v, single):
    return float(v[0]) if single else v


def _safe_ratio(num, den):
    if not den > 0:
        return np.zeros_like(num)
    return num / den


# ---------------------------------------------------------------------------
# building blocks

def voronoi_nearest(x, X_obs):
    """Index of and distance to the nearest observed point (lowest index on ties)."""
    X, single = _batch(x)
    X_obs = np.atleast_2d(np.asarray(X_obs, dtype=float))
    if X_obs.shape[0] == 0:
        raise ValueError("no observed points")
    D = cdist(X, X_obs)
    idx = np.argmin(D, axis=1)
    dist = D[np.arange(X.shape[0]), idx]
    if single:
        return int(idx[0]), float(dist[0])
    return idx, dist


def _posterior(ctx, X):
    return gp.predict(ctx.model, X, normalized=True)


def _observed_gradients(ctx) -> np.ndarray:
    return ctx.cached("grad_obs", lambda: gp.mean_gradient(ctx.model, ctx.X_obs, normalized=True))


def _observed_means(ctx) -> np.ndarray:
    return ctx.cached("mean_obs", lambda: gp.predict_mean(ctx.model, ctx.X_obs, normalized=True))


def taylor_remainder(ctx, x, mean=None, nearest=None):
    """Gap between the model and its first-order expansion at the nearest observation."""
    X, single = _batch(x)
    idx = voronoi_nearest(X, ctx.X_obs)[0] if nearest is None else nearest
    mu = gp.predict_mean(ctx.model, X, normalized=True) if mean is None else mean
    g = _observed_gradients(ctx)[idx]
    lin = _observed_means(ctx)[idx] + np.einsum("ij,ij->i", g, X - ctx.X_obs[idx])
    return _out(np.abs(mu - lin), single)


# ---------------------------------------------------------------------------
# variance-based strategies

def acq_mmse(ctx, x):
    X, single = _batch(x)
    return _out(_posterior(ctx, X)[1], single)


def acq_wmmse(ctx, x, alpha_wm=None):
    alpha = ctx.alpha_wm if alpha_wm is None else alpha_wm
    X, single = _batch(x)
    idx, _ = voronoi_nearest(X, ctx.X_obs)
    gamma = ctx.loocv()[idx] ** 2
    return _out(gamma ** alpha * _posterior(ctx, X)[1], single)


def balance_factor_mepe(ctx) -> float:
    prev = ctx.prev_state
    if prev.t == 0 or prev.last_true_error is None or prev.last_loocv_estimate is None:
        return 0.5
    if prev.last_loocv_estimate < _TINY:
        return 0.99
    return 0.99 * min(0.5 * prev.last_true_error / prev.last_loocv_estimate, 1.0)


def mepe_feedback(model: GpModel, loocv_norm, x_new, y_new) -> tuple[float, float]:
    """Squared true error and squared LOOCV estimate at a freshly observed point.

    Both come from the model that proposed ``x_new`` (before refitting) and
    are returned in raw response units.
    """
    mu = gp.predict_mean(model, np.asarray(x_new, dtype=float))
    o, _ = voronoi_nearest(np.asarray(x_new, dtype=float), model.train_X)
    e_loo = loocv_norm[o] * model.norm_stats.y_sigma
    return float((mu - y_new) ** 2), float(e_loo ** 2)


def acq_mepe(ctx, x):
    X, single = _batch(x)
    a = balance_factor_mepe(ctx)
    idx, _ = voronoi_nearest(X, ctx.X_obs)
    gamma = ctx.loocv()[idx] ** 2
    return _out(a * gamma + (1.0 - a) * _posterior(ctx, X)[1], single)


# ---------------------------------------------------------------------------
# geometry-based strategies

def acq_eigf(ctx, x):
    X, single = _batch(x)
    idx, _ = voronoi_nearest(X, ctx.X_obs)
    mu, var = _posterior(ctx, X)
    return _out((mu - ctx.y_obs[idx]) ** 2 + var, single)


def acq_ggess(ctx, x):
    X, single = _batch(x)
    idx, _ = voronoi_nearest(X, ctx.X_obs)
    mu, var = _posterior(ctx, X)
    grad = gp.mean_gradient(ctx.model, X, normalized=True)
    resid = ctx.y_obs[idx] - mu - np.einsum("ij,ij->i", grad, ctx.X_obs[idx] - X)
    return _out(resid ** 2 + var, single)


def _tead_parts(ctx, X):
    idx, d = voronoi_nearest(X, ctx.X_obs)
    delta = taylor_remainder(ctx, X, nearest=idx)
    return d, delta


def acq_tead(ctx, x):
    X, single = _batch(x)
    d, delta = _tead_parts(ctx, X)
    d_norm = ctx.candidate_max("tead_d", lambda C: voronoi_nearest(C, ctx.X_obs)[1])
    delta_norm = ctx.candidate_max("tead_delta", lambda C: taylor_remainder(ctx, C))
    weight = 1.0 - d / ctx.d_max
    return _out(_safe_ratio(d, d_norm) + weight * _safe_ratio(delta, delta_norm), single)


def acq_guess(ctx, x, alpha_gs=None):
    alpha = ctx.alpha_gs if alpha_gs is None else alpha_gs
    X, single = _batch(x)
    idx, _ = voronoi_nearest(X, ctx.X_obs)
    mu, var = _posterior(ctx, X)
    delta = taylor_remainder(ctx, X, mean=mu, nearest=idx)
    return _out((delta ** alpha + 1.0) * np.sqrt(var), single)


# ---------------------------------------------------------------------------
# committee-based strategy

def committee_fit(X, y, options: gp.FitOptions | None = None, kernels=COMMITTEE_KERNELS) -> list:
    """One GP per committee kernel, all trained on the same data."""
    return [gp.fit_arrays(X, y, k, options) for k in kernels]


def qbc_variance(committee, X, normalization=None) -> np.ndarray:
    """Spread of the committee predictions around their average.

    Predictions are expressed in the standardized units of ``normalization``
    (defaults to the first member's statistics).
    """
    X, single = _batch(X)
    preds = np.array([gp.predict_mean(m, X) for m in committee])
    if normalization is not None:
        preds = preds / normalization.y_sigma
    else:
        preds = preds / committee[0].norm_stats.y_sigma
    # offsets from the first member keep identical committees at exactly zero
    dev = preds - preds[0]
    return _out(np.mean((dev - dev.mean(axis=0)) ** 2, axis=0), single)


def acq_masa(ctx, x):
    if not ctx.committee:
        raise ValueError("MASA needs a fitted committee")
    X, single = _batch(x)
    stats = ctx.model.norm_stats
    f = qbc_variance(ctx.committee, X, stats)
    _, d = voronoi_nearest(X, ctx.X_obs)
    f_norm = ctx.candidate_max("masa_qbc", lambda C: qbc_variance(ctx.committee, C, stats))
    d_norm = ctx.candidate_max("masa_d", lambda C: voronoi_nearest(C, ctx.X_obs)[1])
    return _out(_safe_ratio(f, f_norm) + _safe_ratio(d, d_norm), single)


# ---------------------------------------------------------------------------
# DL-ASED

def simplex_volume(V) -> float:
    V = np.asarray(V, dtype=float)
    n = V.shape[1]
    return abs(float(np.linalg.det(V[1:] - V[0]))) / math.factorial(n)


def _triangulation(ctx):
    def build():
        if ctx.dim < 2:
            return None
        try:
            return Delaunay(ctx.X_obs)
        except QhullError:
            return None
    return ctx.cached("delaunay", build)


def support_points(x, X_obs, tri=None):
    """Vertices of the Delaunay simplex containing each point, plus its volume.

    Points outside the triangulation, or inside a degenerate simplex, fall
    back to their ``n + 1`` nearest observations. Returns ``(indices,
    volumes)`` with ``indices`` of shape ``(p, n + 1)``.
    """
    X, single = _batch(x)
    X_obs = np.atleast_2d(np.asarray(X_obs, dtype=float))
    p, n = X.shape
    if n > MAX_DLASED_DIM:
        raise StrategyDimensionError(f"support points need n <= {MAX_DLASED_DIM}, got {n}")
    idx = np.full((p, n + 1), -1, dtype=int)
    if n == 1:
        order = np.argsort(X_obs[:, 0], kind="stable")
        xs = X_obs[order, 0]
        pos = np.searchsorted(xs, X[:, 0], side="right")
        inside = (pos > 0) & (pos < xs.size)
        idx[inside, 0] = order[pos[inside] - 1]
        idx[inside, 1] = order[pos[inside]]
    else:
        if tri is None:
            try:
                tri = Delaunay(X_obs)
            except QhullError:
                tri = None
        if tri is not None:
            s = tri.find_simplex(X)
            ok = s >= 0
            idx[ok] = tri.simplices[s[ok]]
    vols = np.zeros(p)
    good = idx[:, 0] >= 0
    V = X_obs[idx[good]]
    if good.any():
        vols[good] = np.abs(np.linalg.det(V[:, 1:] - V[:, :1])) / math.factorial(n)
    bad = ~good | (vols < _DEGENERATE_VOLUME)
    if bad.any():
        near = np.argsort(cdist(X[bad], X_obs), axis=1, kind="stable")[:, : n + 1]
        idx[bad] = near
        Vb = X_obs[near]
        vols[bad] = np.abs(np.linalg.det(Vb[:, 1:] - Vb[:, :1])) / math.factorial(n)
    if single:
        return idx[0], float(vols[0])
    return idx, vols


def dlased_exploration(ctx, x, p: float = 1.0):
    """Volume-weighted product of distances and response gaps to the support points."""
    X, single = _batch(x)
    idx, vols = support_points(X, ctx.X_obs, _triangulation(ctx))
    mu = gp.predict_mean(ctx.model, X, normalized=True)
    dist = np.linalg.norm(X[:, None, :] - ctx.X_obs[idx], axis=2)
    gap = np.abs(mu[:, None] - ctx.y_obs[idx])
    return _out(vols ** p * np.prod(dist * gap, axis=1), single)


def fit_eloo_model(model: GpModel, loocv_norm, options: gp.FitOptions | None = None) -> GpModel:
    """Matérn-3/2 GP over LOOCV magnitudes (raw response units)."""
    target = np.abs(np.asarray(loocv_norm)) * model.norm_stats.y_sigma
    return gp.fit_arrays(model.train_X, target, KernelSpec("matern32"), options)


def _eloo_prediction(eloo_model, X):
    return np.maximum(gp.predict_mean(eloo_model, X), 0.0)


def dlased_weight(ctx) -> float:
    prev = ctx.prev_state
    if prev.t == 0 or prev.prev_loocv is None or prev.prev_eloo_model is None or prev.last_point is None:
        return 0.5
    e_now = ctx.loocv() * ctx.model.norm_stats.y_sigma
    den_global = float(np.sum(np.asarray(prev.prev_loocv) ** 2))
    if not den_global > 0:
        return 1.0
    zeta_global = float(np.sum(e_now ** 2)) / den_global
    o, _ = voronoi_nearest(np.asarray(prev.last_point, dtype=float), ctx.X_obs)
    prev_at_last = float(_eloo_prediction(prev.prev_eloo_model, np.atleast_2d(prev.last_point))[0])
    if not prev_at_last ** 2 > 0 or not zeta_global > 0:
        return 1.0
    zeta_local = e_now[o] ** 2 / prev_at_last ** 2
    return float(min(0.5 * zeta_local / zeta_global, 1.0))


def acq_dlased(ctx, x):
    if ctx.dim > MAX_DLASED_DIM:
        raise StrategyDimensionError(f"DL-ASED is limited to n <= {MAX_DLASED_DIM}")
    if ctx.eloo_model is None:
        ctx.eloo_model = fit_eloo_model(ctx.model, ctx.loocv())
    X, single = _batch(x)
    a = dlased_weight(ctx)
    g = dlased_exploration(ctx, X)
    e = _eloo_prediction(ctx.eloo_model, X)
    g_norm = ctx.candidate_max("dlased_g", lambda C: dlased_exploration(ctx, C))
    e_norm = ctx.candidate_max("dlased_eloo", lambda C: _eloo_prediction(ctx.eloo_model, C))
    return _out((1.0 - a) * _safe_ratio(g, g_norm) + a * _safe_ratio(e, e_norm), single)


# ---------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class Strategy:
    name: str
    acquisition: Callable | None
    candidate_based: bool
    needs_loocv: bool = False
    needs_committee: bool = False
    needs_eloo: bool = False
    max_dim: int | None = None


STRATEGIES = {
    s.name: s
    for s in (
        Strategy("lhs", None, candidate_based=False),
        Strategy("mmse", acq_mmse, candidate_based=False),
        Strategy("wmmse", acq_wmmse, candidate_based=True, needs_loocv=True),
        Strategy("mepe", acq_mepe, candidate_based=False, needs_loocv=True),
        Strategy("eigf", acq_eigf, candidate_based=False),
        Strategy("ggess", acq_ggess, candidate_based=True),
        Strategy("tead", acq_tead, candidate_based=True),
        Strategy("masa", acq_masa, candidate_based=True, needs_committee=True),
        Strategy("dlased", acq_dlased, candidate_based=True, needs_loocv=True, needs_eloo=True,
                 max_dim=MAX_DLASED_DIM),
        Strategy("guess", acq_guess, candidate_based=True),
    )
}


def get_strategy(name: str) -> Strategy:
    try:
        return STRATEGIES[name.lower()]
    except KeyError:
        raise KeyError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}") from None
