"""Analytic test functions standing in for expensive simulations.

Formulas follow the published table verbatim, including its modified
variants (the Hump functions, the negated Rosenbrock, Michalewicz with a
tenth power and the narrow DropWave box). Schwefel is evaluated with
``sin(sqrt(|x_i|))`` because its box contains negative inputs.

All evaluators are vectorized: they take an ``(p, n)`` array and return
``p`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DesignDomain, DomainError

HARTMANN_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
HARTMANN_A = np.array([
    [10, 3, 17, 3.5, 1.7, 8],
    [0.05, 10, 17, 0.1, 8, 14],
    [3, 3.5, 1.7, 10, 17, 7],
    [17, 8, 0.05, 10, 0.01, 14],
])
HARTMANN_P = 1e-4 * np.array([
    [1312, 1696, 5569, 124, 8283, 5886],
    [2329, 4135, 8307, 3736, 1004, 9991],
    [2348, 1451, 3522, 2883, 3047, 6650],
    [4047, 8828, 8732, 5743, 1091, 381],
])


class UnknownBenchmarkError(KeyError):
    pass


@dataclass(frozen=True)
class BenchmarkFunction:
    name: str
    dim: int
    domain: DesignDomain
    evaluator: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return evaluate(self, x)


def evaluate(fn: BenchmarkFunction, x):
    """Evaluate ``fn`` at one point (scalar result) or a batch of points."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != fn.dim:
        raise ValueError(f"{fn.name} expects dimension {fn.dim}, got {X.shape[1]}")
    if not np.all(fn.domain.contains(X)):
        raise DomainError(f"point outside the domain of {fn.name}")
    y = fn.evaluator(X)
    return float(y[0]) if single else y


# ---------------------------------------------------------------------------
# formulas (X has shape (p, n))

def hump_single(X):
    x = X[:, 0]
    return 0.05 / ((x - 4.75) ** 2 + 0.004) - 0.09 / ((x - 4.45) ** 2 + 0.05) - 6 + 3 * x


def hump_two(X):
    x = X[:, 0]
    return 5 * x + 0.05 / ((x - 4.5) ** 2 + 0.002) - 0.5 / ((x - 3.5) ** 2 + 3.5) - 6


def gram_lee(X):
    x = X[:, 0]
    return 60 * np.sin(6 * np.pi * x) / (2 * np.cos(x)) + (x - 1) ** 4


def beker_logan(X):
    return (np.abs(X[:, 0]) - 5) ** 2 + (np.abs(X[:, 1]) - 5) ** 2


def eggholder(X):
    x1, x2 = X[:, 0], X[:, 1]
    return (-(x2 + 47) * np.sin(np.sqrt(np.abs(x2 + 0.5 * x1 + 47)))
            - x1 * np.sin(np.sqrt(np.abs(x1 - (x2 + 47)))))


def himmelblau(X):
    x1, x2 = X[:, 0], X[:, 1]
    return (x1 ** 2 + x2 - 11) ** 2 + (x1 + x2 ** 2 - 7) ** 2


def branin(X):
    x1, x2 = X[:, 0], X[:, 1]
    return ((x2 - 5.1 / (4 * np.pi ** 2) * x1 ** 2 + 5 / np.pi * x1 - 6) ** 2
            + 10 * (1 - 1 / (8 * np.pi)) * np.cos(x1) + 10)


def drop_wave(X):
    r2 = X[:, 0] ** 2 + X[:, 1] ** 2
    return -(1 + np.cos(12 * np.sqrt(r2))) / (0.5 * r2 + 2)


def ishigami(X):
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    return np.sin(x1) + 7 * np.sin(x2) ** 2 + 0.1 * x3 ** 4 * np.sin(x1)


def hartmann(X):
    inner = np.einsum("ij,pij->pi", HARTMANN_A, (X[:, None, :] - HARTMANN_P[None]) ** 2)
    return -np.exp(-inner) @ HARTMANN_ALPHA


def rosenbrock(X):
    return -np.sum(100 * (X[:, 1:] - X[:, :-1] ** 2) ** 2 + (X[:, :-1] - 1) ** 2, axis=1)


def ackley(X):
    n = X.shape[1]
    return (-20 * np.exp(-0.2 * np.sqrt(np.sum(X ** 2, axis=1) / n))
            - np.exp(np.sum(np.cos(2 * np.pi * X), axis=1) / n) + 20 + np.e)


def michalewicz(X):
    i = np.arange(1, X.shape[1] + 1)
    return -np.sum(np.sin(X) * np.sin(i * X ** 2 / np.pi) ** 10, axis=1)


def schwefel(X):
    n = X.shape[1]
    return 418.9829 * n - np.sum(X * np.sin(np.sqrt(np.abs(X))), axis=1)


def styblinski_tang(X):
    return 0.5 * np.sum(X ** 4 - 16 * X ** 2 + 5 * X, axis=1)


# ---------------------------------------------------------------------------
# catalog

def _box(lo, hi, n):
    return DesignDomain(np.full(n, float(lo)), np.full(n, float(hi)))


_FIXED = {
    "humpsingle": (1, (-1.5, 5), hump_single),
    "humptwo": (1, (-0.5, 5), hump_two),
    "gramlee": (1, (-1.5, 1), gram_lee),
    "bekerlogan": (2, (-10, 10), beker_logan),
    "eggholder": (2, (-512, 512), eggholder),
    "himmelblau": (2, (-6, 6), himmelblau),
    "branin": (2, (-5, 10), branin),
    "dropwave": (2, (-0.6, 0.9), drop_wave),
    "ishigami": (3, (-np.pi, np.pi), ishigami),
    "hartmann": (6, (0, 1), hartmann),
}

_PARAMETRIC = {
    "rosenbrock": ((-5, 5), rosenbrock),
    "ackley": ((-5, 5), ackley),
    "michalewicz": ((0, np.pi), michalewicz),
    "schwefel": ((-5, 5), schwefel),
    "styblinskitang": ((-5, 5), styblinski_tang),
}

SUITES = {
    1: ["gramlee", "humpsingle", "humptwo"],
    2: ["bekerlogan", "eggholder", "himmelblau", "branin", "dropwave", "michalewicz-2", "schwefel-2"],
    3: ["ackley-3", "rosenbrock-3", "michalewicz-3", "ishigami"],
    4: ["ackley-4", "rosenbrock-4", "michalewicz-4", "styblinskitang-4"],
    6: ["ackley-6", "rosenbrock-6", "michalewicz-6", "hartmann"],
    8: ["ackley-8", "rosenbrock-8", "michalewicz-8", "styblinskitang-8"],
}


def get_benchmark(name: str, dim: int | None = None) -> BenchmarkFunction:
    """Look up a benchmark by catalog name.

    Parametric families take their dimension from a ``-<n>`` suffix
    (``"rosenbrock-4"``) or from ``dim``.
    """
    key = name.strip().lower().replace("_", "").replace(" ", "")
    if key in _FIXED:
        n, (lo, hi), f = _FIXED[key]
        if dim is not None and dim != n:
            raise UnknownBenchmarkError(f"{key} is only defined for dimension {n}")
        return BenchmarkFunction(key, n, _box(lo, hi, n), f)
    base, _, suffix = key.partition("-")
    if base in _PARAMETRIC:
        if suffix:
            if not suffix.isdigit():
                raise UnknownBenchmarkError(name)
            n = int(suffix)
            if dim is not None and dim != n:
                raise UnknownBenchmarkError(f"{name} conflicts with dim={dim}")
        elif dim is not None:
            n = dim
        else:
            raise UnknownBenchmarkError(f"{base} needs a dimension, e.g. '{base}-4'")
        if n < 2 and base == "rosenbrock":
            raise UnknownBenchmarkError("rosenbrock needs at least two dimensions")
        if n < 1:
            raise UnknownBenchmarkError(name)
        (lo, hi), f = _PARAMETRIC[base]
        return BenchmarkFunction(f"{base}-{n}", n, _box(lo, hi, n), f)
    raise UnknownBenchmarkError(f"unknown benchmark {name!r}")


def list_benchmarks(dim: int | None = None, name: str | None = None) -> list[BenchmarkFunction]:
    """Catalog of the suite functions, optionally filtered by dimension or name."""
    if name is not None:
        return [get_benchmark(name, dim)]
    dims = sorted(SUITES) if dim is None else [dim]
    out = []
    for d in dims:
        if d not in SUITES:
            raise UnknownBenchmarkError(f"no suite for dimension {d}")
        out.extend(get_benchmark(nm) for nm in SUITES[d])
    return out
