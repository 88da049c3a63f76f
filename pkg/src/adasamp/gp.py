"""Gaussian-process regression with a zero prior mean.

Models are trained on unit-scaled inputs and standardized responses; all
query points passed to :func:`predict` and friends are expected in the same
unit-scaled coordinates the model was trained on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize

from .core import Dataset, NormalizationStats, denormalize_targets, make_rng, normalize_targets
from .kernels import (
    KernelSpec,
    from_log_params,
    kernel_diag,
    kernel_matrix,
    kernel_matrix_grad,
    log_params,
)

log = logging.getLogger(__name__)

DEFAULT_JITTER = 1e-10
MAX_JITTER = 1e-4
_LOG_2PI = np.log(2.0 * np.pi)


class NumericalError(RuntimeError):
    """Cholesky factorization failed even after jitter escalation."""

    def __init__(self, msg, jitter_levels=()):
        super().__init__(f"{msg} (jitter tried: {list(jitter_levels)})")
        self.jitter_levels = tuple(jitter_levels)


class FitError(RuntimeError):
    """No restart of the hyperparameter search produced a finite likelihood."""


@dataclass(frozen=True)
class GpModel:
    kernel: KernelSpec
    noise_variance: float
    jitter: float
    train_X: np.ndarray
    train_y_norm: np.ndarray
    norm_stats: NormalizationStats
    chol: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    log_likelihood: float = float("nan")

    @property
    def m(self) -> int:
        return self.train_X.shape[0]

    @property
    def n(self) -> int:
        return self.train_X.shape[1]

    @property
    def train_y(self) -> np.ndarray:
        return denormalize_targets(self.train_y_norm, self.norm_stats)


@dataclass
class FitOptions:
    """Settings for the restarted marginal-likelihood search.

    Bounds are given on the natural scale and searched in log space.
    """

    n_restarts: int = 10
    length_scale_bounds: tuple = (1e-2, 1e2)
    noise_bounds: tuple = (1e-10, 1e0)
    extra_bounds: tuple = (1e-2, 1e2)
    maxiter: int = 200
    optimize_noise: bool = True
    noise_variance: float = 1e-10
    jitter: float = DEFAULT_JITTER
    seed: int | None = 0

    def __post_init__(self):
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be at least 1")
        for name in ("length_scale_bounds", "noise_bounds", "extra_bounds"):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi) and 0 < lo < hi):
                raise ValueError(f"{name} must be finite with 0 < lower < upper")


def factorize(K: np.ndarray, diag_add: float, jitter: float = DEFAULT_JITTER):
    """Lower Cholesky factor of ``K + (diag_add + jitter) I`` with jitter escalation.

    Returns ``(L, jitter_used)``.
    """
    tried = []
    j = jitter
    while True:
        tried.append(j)
        A = K.copy()
        A[np.diag_indices_from(A)] += diag_add + j
        try:
            return cholesky(A, lower=True, check_finite=True), j
        except (np.linalg.LinAlgError, ValueError):
            j = max(j * 10.0, 1e-10) if j > 0 else DEFAULT_JITTER
            if j > MAX_JITTER * (1 + 1e-9):
                raise NumericalError("kernel matrix is not positive definite", tried) from None


def log_marginal_likelihood(kernel: KernelSpec, noise_variance: float, X, y_norm,
                            jitter: float = DEFAULT_JITTER) -> float:
    """Log evidence of ``y_norm`` under a zero-mean GP, via the Cholesky factor."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y_norm, dtype=float).ravel()
    L, _ = factorize(kernel_matrix(kernel, X, X), noise_variance, jitter)
    a = cho_solve((L, True), y)
    m = y.size
    return float(-0.5 * m * _LOG_2PI - np.sum(np.log(np.diag(L))) - 0.5 * y @ a)


def _nlml_and_grad(theta, kernel, X, y, optimize_noise, fixed_noise, jitter):
    """Negative log likelihood and gradient w.r.t. the packed log parameters."""
    n_k = theta.size - (1 if optimize_noise else 0)
    spec = from_log_params(kernel, theta[:n_k])
    noise = float(np.exp(theta[n_k])) if optimize_noise else fixed_noise
    K, dK = kernel_matrix_grad(spec, X)
    try:
        L, _ = factorize(K, noise, jitter)
    except NumericalError:
        return 1e25, np.zeros_like(theta)
    a = cho_solve((L, True), y)
    m = y.size
    nll = 0.5 * m * _LOG_2PI + np.sum(np.log(np.diag(L))) + 0.5 * y @ a
    W = np.outer(a, a) - cho_solve((L, True), np.eye(m))
    grad = [-0.5 * np.sum(W * D) for D in dK]
    if optimize_noise:
        grad.append(-0.5 * noise * np.trace(W))
    return float(nll), np.asarray(grad)


def _build(kernel, noise, X, y_norm, stats, jitter, loglik=float("nan")) -> GpModel:
    L, used = factorize(kernel_matrix(kernel, X, X), noise, jitter)
    a = cho_solve((L, True), y_norm)
    for arr in (X, y_norm, L, a):
        arr.flags.writeable = False
    return GpModel(kernel, float(noise), float(used), X, y_norm, stats, L, a, float(loglik))


def fit_arrays(X, y, kernel: KernelSpec | None = None, options: FitOptions | None = None) -> GpModel:
    """Fit hyperparameters to raw arrays (inputs used as given)."""
    kernel = kernel or KernelSpec("matern32")
    options = options or FitOptions()
    X = np.array(np.atleast_2d(np.asarray(X, dtype=float)))
    y_norm, stats = normalize_targets(y)
    if X.shape[0] != y_norm.size:
        raise ValueError("X and y disagree in length")
    if X.shape[0] < 2:
        raise ValueError("fitting needs at least two points")
    kernel = kernel.with_params(signal_variance=1.0)

    bounds = []
    if kernel.has_length_scale:
        k = np.atleast_1d(kernel.length_scale).size
        bounds += [np.log(options.length_scale_bounds)] * k
    if kernel.has_extra:
        bounds.append(np.log(options.extra_bounds))
    if options.optimize_noise:
        bounds.append(np.log(options.noise_bounds))
    bounds = np.asarray(bounds, dtype=float)

    if bounds.size == 0:
        return _build(kernel, options.noise_variance, X, y_norm, stats, options.jitter)

    rng = make_rng(options.seed)
    starts = rng.uniform(bounds[:, 0], bounds[:, 1], size=(options.n_restarts, len(bounds)))
    args = (kernel, X, y_norm, options.optimize_noise, options.noise_variance, options.jitter)

    best_theta, best_val = None, np.inf
    for i, x0 in enumerate(starts):
        try:
            res = minimize(_nlml_and_grad, x0, args=args, jac=True, method="L-BFGS-B",
                           bounds=bounds, options={"maxiter": options.maxiter})
        except (ValueError, FloatingPointError) as exc:
            log.debug("restart %d failed: %s", i, exc)
            continue
        theta = np.clip(res.x, bounds[:, 0], bounds[:, 1])
        val = _nlml_and_grad(theta, *args)[0]
        if np.isfinite(val) and val < 1e25 and val < best_val:
            best_theta, best_val = theta, val
    if best_theta is None:
        raise FitError("all restarts failed to produce a finite likelihood")

    n_k = best_theta.size - (1 if options.optimize_noise else 0)
    spec = from_log_params(kernel, best_theta[:n_k])
    noise = float(np.exp(best_theta[n_k])) if options.optimize_noise else options.noise_variance
    return _build(spec, noise, X, y_norm, stats, options.jitter, -best_val)


def fit(data: Dataset, options: FitOptions | None = None, kernel: KernelSpec | None = None) -> GpModel:
    """Fit a GP to ``data`` in unit-scaled input coordinates."""
    if data.m < 2:
        raise ValueError("fitting needs at least two points")
    return fit_arrays(data.X_unit, data.y, kernel, options)


def condition(model: GpModel, X, y) -> GpModel:
    """Re-condition ``model``'s hyperparameters on a new training set without refitting."""
    X = np.array(np.atleast_2d(np.asarray(X, dtype=float)))
    y_norm, stats = normalize_targets(y)
    return _build(model.kernel, model.noise_variance, X, y_norm, stats, model.jitter)


def predict(model: GpModel, X, normalized: bool = False, return_var: bool = True):
    """Posterior mean and variance at ``X``.

    A single point (1-D input) gives scalars, a matrix of points gives
    vectors. ``normalized=True`` keeps the standardized response units.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    Xq = np.atleast_2d(X)
    if Xq.shape[1] != model.n:
        raise ValueError(f"expected dimension {model.n}, got {Xq.shape[1]}")
    Ks = kernel_matrix(model.kernel, Xq, model.train_X)
    mean = Ks @ model.alpha
    var = None
    if return_var:
        v = solve_triangular(model.chol, Ks.T, lower=True, check_finite=False)
        var = np.maximum(kernel_diag(model.kernel, Xq) - np.einsum("ij,ij->j", v, v), 0.0)
    if not normalized:
        mean = mean * model.norm_stats.y_sigma + model.norm_stats.y_mu
        if var is not None:
            var = var * model.norm_stats.y_sigma ** 2
    if single:
        mean = float(mean[0])
        var = None if var is None else float(var[0])
    return (mean, var) if return_var else mean


def predict_mean(model: GpModel, X, normalized: bool = False):
    return predict(model, X, normalized=normalized, return_var=False)


def precision_matrix(model: GpModel) -> np.ndarray:
    return cho_solve((model.chol, True), np.eye(model.m))


def loocv_errors_fast(model: GpModel, denormalize: bool = False) -> np.ndarray:
    """Closed-form leave-one-out residuals ``(Lambda y)_i / Lambda_ii``.

    Lambda is the inverse of the noisy kernel matrix; ``Lambda y`` is the
    cached weight vector. Normalized units unless ``denormalize``.
    """
    e = model.alpha / np.diag(precision_matrix(model))
    return e * model.norm_stats.y_sigma if denormalize else e


def loocv_errors_bruteforce(X, y_norm, kernel: KernelSpec, noise_variance: float,
                            jitter: float = DEFAULT_JITTER) -> np.ndarray:
    """Leave-one-out residuals by explicit refitting with frozen hyperparameters.

    Returns ``y_i - yhat_{-i}`` where ``y_i`` is the observed (standardized)
    target and ``yhat_{-i}`` the mean of the model conditioned on all other
    points. ``y_norm`` is used as is (no re-standardization per fold).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y_norm, dtype=float).ravel()
    m = y.size
    if m < 3:
        raise ValueError("brute-force LOOCV needs at least three points")
    K = kernel_matrix(kernel, X, X)
    out = np.empty(m)
    for i in range(m):
        keep = np.arange(m) != i
        Li, _ = factorize(K[np.ix_(keep, keep)], noise_variance, jitter)
        out[i] = y[i] - K[i, keep] @ cho_solve((Li, True), y[keep])
    return out


def mean_gradient(model: GpModel, X, normalized: bool = False, rel_step: float = 1e-6) -> np.ndarray:
    """Forward-difference gradient of the posterior mean on the unit box.

    The step is ``rel_step`` times the (unit) box width; coordinates that
    would step past the upper bound use a backward difference instead.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    Xq = np.atleast_2d(X)
    p, n = Xq.shape
    h = rel_step
    f0 = predict_mean(model, Xq, normalized=normalized)
    steps = np.where(Xq + h > 1.0, -h, h)
    shifted = np.repeat(Xq[None, :, :], n, axis=0)
    for d in range(n):
        shifted[d, :, d] += steps[:, d]
    f1 = predict_mean(model, shifted.reshape(n * p, n), normalized=normalized).reshape(n, p)
    grad = ((f1 - f0[None, :]) / steps.T).T
    return grad[0] if single else grad
