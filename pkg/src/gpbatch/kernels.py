"""Stationary, unit-variance covariance functions (squared exponential and
half-integer Matérn) and Gram-matrix assembly."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConfigurationError, InputError

SUPPORTED_NU = (0.5, 1.5, 2.5)


class Family(str, enum.Enum):
    SE = "se"
    MATERN = "matern"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus hyperparameters.

    ``nu`` is only consulted for the Matérn family and must be one of
    1/2, 3/2, 5/2.
    """

    family: Family
    lengthscale: float
    dim: int = 1
    nu: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.lengthscale > 0:
            raise ConfigurationError(f"lengthscale must be positive, got {self.lengthscale}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ConfigurationError(f"dim must be a positive integer, got {self.dim}")
        if self.family is Family.MATERN:
            if self.nu is None or not any(np.isclose(self.nu, v) for v in SUPPORTED_NU):
                raise ConfigurationError(
                    f"Matern nu must be one of {SUPPORTED_NU}, got {self.nu}")
            object.__setattr__(self, "nu", min(SUPPORTED_NU, key=lambda v: abs(v - self.nu)))
        elif self.nu is not None:
            raise ConfigurationError("nu is only meaningful for the Matern family")

    @classmethod
    def se(cls, lengthscale: float, dim: int = 1) -> "KernelSpec":
        return cls(Family.SE, lengthscale, dim)

    @classmethod
    def matern(cls, nu: float, lengthscale: float, dim: int = 1) -> "KernelSpec":
        return cls(Family.MATERN, lengthscale, dim, nu)

    def profile(self, r: np.ndarray) -> np.ndarray:
        """Kernel value as a function of Euclidean distance ``r``."""
        r = np.asarray(r, dtype=np.float64)
        if self.family is Family.SE:
            return np.exp(-0.5 * (r / self.lengthscale) ** 2)
        s = np.sqrt(2.0 * self.nu) * r / self.lengthscale
        if self.nu == 0.5:
            return np.exp(-s)
        if self.nu == 1.5:
            return (1.0 + s) * np.exp(-s)
        return (1.0 + s + s * s / 3.0) * np.exp(-s)


def as_points(points, dim: int | None = None) -> np.ndarray:
    """Coerce a point or list of points to a float64 array of shape (n, d)."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InputError(f"points must be at most 2-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise InputError(f"expected points of dimension {dim}, got {arr.shape[1]}")
    return arr


def _as_point(x, dim: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.shape != (dim,):
        raise InputError(f"expected a point of dimension {dim}, got shape {arr.shape}")
    return arr


def eval(spec: KernelSpec, x, x2) -> float:  # noqa: A001
    """k(x, x2) for two single points."""
    a = _as_point(x, spec.dim)
    b = _as_point(x2, spec.dim)
    return float(spec.profile(np.linalg.norm(a - b)))


def cross(spec: KernelSpec, a, b) -> np.ndarray:
    """Cross-covariance matrix [k(a_i, b_j)]."""
    a = as_points(a, spec.dim)
    b = as_points(b, spec.dim)
    return spec.profile(cdist(a, b))


def gram(spec: KernelSpec, points) -> np.ndarray:
    """Symmetric Gram matrix with unit diagonal."""
    pts = as_points(points, spec.dim)
    if pts.shape[0] == 0:
        raise InputError("gram requires at least one point")
    K = cross(spec, pts, pts)
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return K
