"""Exact GP posterior with a regularised Gram factorisation.

Two views of the same computation live here. :class:`GPModel` is the
general one: arbitrary design points, queried anywhere. It is cheap to
grow one point at a time (``extend``), which is what maximum-variance
sampling needs. :class:`CandidatePosterior` fixes a finite candidate set up
front and keeps the posterior variance (and, once observations arrive, the
mean) of every candidate current after each addition, which is what the
bandit policies iterate on.

Both maintain the lower Cholesky factor ``L`` of ``K + lam * I`` over the
design and never look at data outside their own design.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from . import kernels
from .errors import ConfigurationError, InputError, NumericalError, StateError
from .kernels import KernelSpec

JITTER = 1e-10


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not lam > 0:
        raise ConfigurationError(f"regulariser lambda must be positive, got {lam}")
    return lam


def _cholesky(A: np.ndarray, lam: float) -> np.ndarray:
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(A + JITTER * (1.0 + lam) * np.eye(A.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError("Cholesky factorisation failed after jitter") from exc


def _new_pivot(sq: float, lam: float) -> float:
    """Square root of the Schur complement for an appended row, with one jitter retry."""
    if sq <= 0.0:
        sq += JITTER * (1.0 + lam)
        if sq <= 0.0:
            raise NumericalError(f"non-positive pivot {sq:.3e} while extending factor")
    return float(np.sqrt(sq))


class GPModel:
    """Zero-mean GP posterior given design points and (optionally) observations.

    Instances are treated as immutable: :meth:`extend` and
    :meth:`attach_observations` return new models.
    """

    def __init__(self, spec: KernelSpec, lam: float, design: np.ndarray,
                 factor: np.ndarray, y: np.ndarray | None = None):
        self.spec = spec
        self.lam = _check_lambda(lam)
        self.design = design
        self.factor = factor
        self.y = y
        self._w = None if y is None else solve_triangular(factor, y, lower=True)
        if factor.shape != (len(design), len(design)):
            raise InputError("factor dimension does not match design length")

    @classmethod
    def fit(cls, spec: KernelSpec, lam: float, design=()) -> "GPModel":
        """Factor ``K + lam*I`` over ``design``; no observations attached."""
        lam = _check_lambda(lam)
        pts = kernels.as_points(design, spec.dim) if len(design) else np.empty((0, spec.dim))
        if len(pts) == 0:
            return cls(spec, lam, pts, np.empty((0, 0)))
        A = kernels.gram(spec, pts) + lam * np.eye(len(pts))
        return cls(spec, lam, pts, _cholesky(A, lam))

    @property
    def size(self) -> int:
        return len(self.design)

    @property
    def has_observations(self) -> bool:
        return self.y is not None

    def attach_observations(self, y) -> "GPModel":
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if len(y) != self.size:
            raise InputError(f"got {len(y)} observations for a design of size {self.size}")
        return GPModel(self.spec, self.lam, self.design, self.factor, y)

    def extend(self, x_new) -> "GPModel":
        """Same posterior as refitting on ``design + [x_new]``; O(n^2) per call."""
        x = kernels.as_points(x_new, self.spec.dim)
        if len(x) != 1:
            raise InputError("extend takes exactly one point")
        n = self.size
        L = np.zeros((n + 1, n + 1))
        L[:n, :n] = self.factor
        if n:
            k = kernels.cross(self.spec, self.design, x)[:, 0]
            l = solve_triangular(self.factor, k, lower=True)
            L[n, :n] = l
            sq = 1.0 + self.lam - l @ l
        else:
            sq = 1.0 + self.lam
        L[n, n] = _new_pivot(sq, self.lam)
        return GPModel(self.spec, self.lam, np.vstack([self.design, x]), L)

    def _query(self, x):
        dim = self.spec.dim
        single = np.ndim(x) <= 1 and np.size(x) == dim
        pts = kernels.as_points(np.reshape(x, (1, dim)) if single else x, dim)
        return pts, single

    def _solved(self, pts: np.ndarray) -> np.ndarray:
        if self.size == 0:
            return np.zeros((0, len(pts)))
        return solve_triangular(self.factor, kernels.cross(self.spec, self.design, pts), lower=True)

    def predict(self, x):
        """Posterior mean and variance at ``x`` (mean is None without observations)."""
        pts, single = self._query(x)
        V = self._solved(pts)
        var = np.clip(1.0 - (V * V).sum(0), 0.0, 1.0)
        mu = None if self._w is None else V.T @ self._w
        if single:
            return (None if mu is None else float(mu[0])), float(var[0])
        return mu, var

    def mean(self, x):
        if self._w is None:
            raise StateError("mean queried on a model without observations")
        return self.predict(x)[0]

    def variance(self, x):
        return self.predict(x)[1]


class CandidatePosterior:
    """Posterior over a fixed finite candidate set, grown one design point at a time.

    Design points are given as candidate indices. After each :meth:`add`
    the posterior variance of every candidate is available in
    :attr:`var`; observations may be supplied with each addition
    (sequential use) or all at once via :meth:`observe_all` (batch use).
    """

    def __init__(self, spec: KernelSpec, lam: float, candidates, capacity: int = 64):
        self.spec = spec
        self.lam = _check_lambda(lam)
        self.X = kernels.as_points(candidates, spec.dim)
        m = len(self.X)
        self.var = np.ones(m)
        self.indices: list[int] = []
        self.pre_variances: list[float] = []  # variance of each design point when it was added
        self._L = np.zeros((capacity, capacity))
        self._V = np.zeros((capacity, m))  # L^{-1} K[design, candidates]
        self._w = np.zeros(capacity)        # L^{-1} y
        self._y: list[float | None] = []

    @property
    def size(self) -> int:
        return len(self.indices)

    def _grow(self):
        cap = 2 * len(self._L)
        L = np.zeros((cap, cap))
        L[: len(self._L), : len(self._L)] = self._L
        V = np.zeros((cap, self._V.shape[1]))
        V[: len(self._V)] = self._V
        w = np.zeros(cap)
        w[: len(self._w)] = self._w
        self._L, self._V, self._w = L, V, w

    def add(self, index: int, y: float | None = None) -> float:
        """Append candidate ``index`` to the design; returns its pre-update variance."""
        n = self.size
        if n == len(self._L):
            self._grow()
        index = int(index)
        l = self._V[:n, index]
        prior_var = 1.0 - l @ l
        pivot = _new_pivot(prior_var + self.lam, self.lam)
        col = kernels.cross(self.spec, self.X, self.X[index:index + 1])[:, 0]
        v = (col - self._V[:n].T @ l) / pivot
        self._L[n, :n] = l
        self._L[n, n] = pivot
        self._V[n] = v
        self.var -= v * v
        np.maximum(self.var, 0.0, out=self.var)
        self.indices.append(index)
        self.pre_variances.append(max(prior_var, 0.0))
        self._y.append(None if y is None else float(y))
        if y is not None and all(o is not None for o in self._y[:n]):
            self._w[n] = (float(y) - self._L[n, :n] @ self._w[:n]) / pivot
        return max(prior_var, 0.0)

    def observe_all(self, y) -> None:
        """Attach observations for every design point (in order of addition)."""
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        n = self.size
        if len(y) != n:
            raise InputError(f"got {len(y)} observations for a design of size {n}")
        self._y = [float(v) for v in y]
        if n:
            self._w[:n] = solve_triangular(self._L[:n, :n], y, lower=True)

    @property
    def has_observations(self) -> bool:
        return all(o is not None for o in self._y)

    @property
    def mean(self) -> np.ndarray:
        if not self.has_observations:
            raise StateError("mean requested before all design points were observed")
        n = self.size
        return self._V[:n].T @ self._w[:n]

    @property
    def factor(self) -> np.ndarray:
        n = self.size
        return self._L[:n, :n].copy()

    def to_model(self) -> GPModel:
        """Equivalent :class:`GPModel` (same design order and factor)."""
        y = np.array(self._y) if self.size and self.has_observations else None
        model = GPModel(self.spec, self.lam, self.X[self.indices], self.factor)
        return model if y is None else model.attach_observations(y)
