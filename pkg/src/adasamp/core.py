"""Shared domain types, scaling helpers and seed plumbing.

Everything downstream works in the unit-scaled box ``[0, 1]^n`` with
normalized responses; the types here carry the information needed to map
back to the user's coordinates and units.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """A point lies outside of its design domain."""


class DuplicatePointError(ValueError):
    """Two rows of a design are identical."""


@dataclass(frozen=True)
class DesignDomain:
    """Axis-aligned box with per-dimension bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if lower.size < 1:
            raise ValueError("domain needs at least one dimension")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def unit(cls, n: int) -> "DesignDomain":
        return cls(np.zeros(n), np.ones(n))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def diagonal(self) -> float:
        """Largest distance between two points of the box."""
        return float(np.linalg.norm(self.width))

    def contains(self, x, atol: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = (x >= self.lower - atol) & (x <= self.upper + atol)
        return np.all(inside, axis=-1)

    def __eq__(self, other):
        if not isinstance(other, DesignDomain):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))


def _check_inside(domain: DesignDomain, x: np.ndarray) -> None:
    if x.shape[-1] != domain.dim:
        raise ValueError(f"expected points of dimension {domain.dim}, got {x.shape[-1]}")
    if not np.all(domain.contains(x)):
        raise DomainError("point(s) outside of the design domain")


def scale_domain_to_unit(domain: DesignDomain, x) -> np.ndarray:
    """Map ``x`` (a point or an array of points) from ``domain`` to the unit box."""
    x = np.asarray(x, dtype=float)
    _check_inside(domain, x)
    return np.clip((x - domain.lower) / domain.width, 0.0, 1.0)


def scale_unit_to_domain(domain: DesignDomain, u) -> np.ndarray:
    """Inverse of :func:`scale_domain_to_unit`."""
    u = np.asarray(u, dtype=float)
    _check_inside(DesignDomain.unit(domain.dim), u)
    return np.clip(domain.lower + u * domain.width, domain.lower, domain.upper)


@dataclass(frozen=True)
class NormalizationStats:
    y_mu: float
    y_sigma: float

    def __post_init__(self):
        if not self.y_sigma > 0:
            raise ValueError("y_sigma must be positive")


def normalize_targets(y) -> tuple[np.ndarray, NormalizationStats]:
    """Standardize responses with the population standard deviation.

    A constant response vector gets ``y_sigma = 1`` so that the transform
    reduces to a shift and stays invertible.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("cannot normalize an empty response vector")
    mu = float(np.mean(y))
    sigma = float(np.std(y))
    if not sigma > 0:
        sigma = 1.0
    return (y - mu) / sigma, NormalizationStats(mu, sigma)


def denormalize_targets(y_norm, stats: NormalizationStats) -> np.ndarray:
    return np.asarray(y_norm, dtype=float) * stats.y_sigma + stats.y_mu


@dataclass(frozen=True)
class Dataset:
    """Evaluated design points, stored in the coordinates of ``domain``."""

    X: np.ndarray
    y: np.ndarray
    domain: DesignDomain = field(compare=False)

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float)).copy()
        y = np.asarray(self.y, dtype=float).ravel().copy()
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        _check_inside(self.domain, X)
        if X.shape[0] > 1:
            U = (X - self.domain.lower) / self.domain.width
            if np.unique(U, axis=0).shape[0] != U.shape[0]:
                raise DuplicatePointError("dataset contains duplicate input rows")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def X_unit(self) -> np.ndarray:
        return scale_domain_to_unit(self.domain, self.X)

    def append(self, x, y) -> "Dataset":
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return Dataset(np.vstack([self.X, x]), np.concatenate([self.y, np.atleast_1d(y)]), self.domain)


# ---------------------------------------------------------------------------
# seeds

_MASK64 = (1 << 64) - 1


def derive_seed(*parts) -> int:
    """Hash an arbitrary tuple of ints/strings into a 64-bit unsigned seed.

    Stable across processes and Python versions (no reliance on ``hash``).
    """
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "little") & _MASK64


def make_rng(seed) -> np.random.Generator:
    """Build a generator from an int seed, a generator (returned as is) or None."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("an explicit seed is required; there is no global RNG")
    return np.random.default_rng(np.random.SeedSequence(int(seed) & _MASK64))
