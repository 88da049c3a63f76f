"""Covariance functions.

Matérn kernels are restricted to nu in {3/2, 5/2}, where the Bessel form
collapses to a polynomial times an exponential.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

FAMILIES = (
    "matern32",
    "matern52",
    "squared_exponential",
    "absolute_exponential",
    "rational_quadratic",
    "dot_product",
)

_SQRT3 = np.sqrt(3.0)
_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its hyperparameters.

    ``extra`` is the mixture parameter alpha for the rational-quadratic
    family and the offset sigma_0^2 for the dot product; other families
    ignore it.
    """

    family: str = "matern32"
    length_scale: float | tuple = 1.0
    signal_variance: float = 1.0
    extra: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        ls = np.asarray(self.length_scale, dtype=float)
        if np.any(ls <= 0) or not np.all(np.isfinite(ls)):
            raise ValueError("length scale must be positive")
        if ls.ndim == 1:
            object.__setattr__(self, "length_scale", tuple(float(v) for v in ls))
        elif ls.ndim == 0:
            object.__setattr__(self, "length_scale", float(ls))
        else:
            raise ValueError("length scale must be a scalar or a vector")
        if not self.signal_variance > 0:
            raise ValueError("signal variance must be positive")
        if self.family == "rational_quadratic" and not self.extra > 0:
            raise ValueError("rational-quadratic alpha must be positive")
        if self.family == "dot_product" and not self.extra >= 0:
            raise ValueError("dot-product offset must be non-negative")

    @property
    def stationary(self) -> bool:
        return self.family != "dot_product"

    @property
    def has_length_scale(self) -> bool:
        return self.family != "dot_product"

    @property
    def has_extra(self) -> bool:
        return self.family in ("rational_quadratic", "dot_product")

    def with_params(self, **kw) -> "KernelSpec":
        return replace(self, **kw)


def _scaled_distance(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    ls = np.asarray(spec.length_scale, dtype=float)
    return cdist(A / ls, B / ls)


def _check(A, B):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    return A, B


def _profile(family: str, d: np.ndarray, extra: float) -> np.ndarray:
    """Unit-variance correlation as a function of the scaled distance d = r/l."""
    if family == "matern32":
        a = _SQRT3 * d
        return (1.0 + a) * np.exp(-a)
    if family == "matern52":
        a = _SQRT5 * d
        return (1.0 + a + a * a / 3.0) * np.exp(-a)
    if family == "squared_exponential":
        return np.exp(-0.5 * d * d)
    if family == "absolute_exponential":
        return np.exp(-d)
    if family == "rational_quadratic":
        return (1.0 + d * d / (2.0 * extra)) ** (-extra)
    raise ValueError(family)


def kernel_matrix(spec: KernelSpec, A, B) -> np.ndarray:
    """Covariance between every row of ``A`` and every row of ``B``."""
    A, B = _check(A, B)
    if spec.family == "dot_product":
        return spec.extra + A @ B.T
    return spec.signal_variance * _profile(spec.family, _scaled_distance(spec, A, B), spec.extra)


def kernel_eval(spec: KernelSpec, x, x_prime) -> float:
    x = np.asarray(x, dtype=float).ravel()
    x_prime = np.asarray(x_prime, dtype=float).ravel()
    if x.shape != x_prime.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {x_prime.size}")
    return float(kernel_matrix(spec, x[None, :], x_prime[None, :])[0, 0])


def kernel_diag(spec: KernelSpec, A) -> np.ndarray:
    """Prior variances k(a, a) for every row of ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if spec.family == "dot_product":
        return spec.extra + np.einsum("ij,ij->i", A, A)
    return np.full(A.shape[0], spec.signal_variance)


# ---------------------------------------------------------------------------
# hyperparameter vectors

def log_params(spec: KernelSpec) -> np.ndarray:
    """Trainable kernel hyperparameters in log space.

    The signal variance is held fixed; the order is (length scale(s), extra)
    where present.
    """
    out = []
    if spec.has_length_scale:
        out.extend(np.log(np.atleast_1d(spec.length_scale)))
    if spec.has_extra:
        out.append(np.log(spec.extra))
    return np.asarray(out, dtype=float)


def from_log_params(spec: KernelSpec, theta) -> KernelSpec:
    theta = np.asarray(theta, dtype=float)
    kw = {}
    i = 0
    if spec.has_length_scale:
        k = np.atleast_1d(spec.length_scale).size
        ls = np.exp(theta[:k])
        kw["length_scale"] = float(ls[0]) if np.ndim(spec.length_scale) == 0 else tuple(ls)
        i = k
    if spec.has_extra:
        kw["extra"] = float(np.exp(theta[i]))
    return replace(spec, **kw)


def kernel_matrix_grad(spec: KernelSpec, X) -> tuple[np.ndarray, list[np.ndarray]]:
    """Kernel matrix of ``X`` with itself and its derivatives w.r.t. :func:`log_params`."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if spec.family == "dot_product":
        K = spec.extra + X @ X.T
        return K, [np.full_like(K, spec.extra)]

    sf2 = spec.signal_variance
    ls = np.atleast_1d(np.asarray(spec.length_scale, dtype=float))
    d = _scaled_distance(spec, X, X)
    fam = spec.family
    K = sf2 * _profile(fam, d, spec.extra)

    # dK/dd * (1/d); multiplying by the squared scaled component distance gives
    # the derivative w.r.t. log of that component's length scale.
    with np.errstate(divide="ignore", invalid="ignore"):
        if fam == "matern32":
            g = 3.0 * np.exp(-_SQRT3 * d)
        elif fam == "matern52":
            a = _SQRT5 * d
            g = (5.0 / 3.0) * (1.0 + a) * np.exp(-a)
        elif fam == "squared_exponential":
            g = np.exp(-0.5 * d * d)
        elif fam == "absolute_exponential":
            g = np.where(d > 0, np.exp(-d) / d, 0.0)
        else:  # rational quadratic
            alpha = spec.extra
            base = 1.0 + d * d / (2.0 * alpha)
            g = base ** (-alpha - 1.0)
    g = sf2 * g

    grads = []
    if ls.size == 1:
        grads.append(g * d * d)
    else:
        for j in range(ls.size):
            diff = (X[:, j, None] - X[None, :, j]) / ls[j]
            grads.append(g * diff * diff)

    if fam == "rational_quadratic":
        alpha = spec.extra
        b = d * d / (2.0 * alpha)
        grads.append(K * alpha * (-np.log1p(b) + b / (1.0 + b)))
    return K, grads
