"""Information-gain and elimination-gap diagnostics."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputError, NumericalError
from .gp import CandidatePosterior
from .kernels import Family, KernelSpec

EXHAUSTIVE_MAX_DOMAIN = 12
EXHAUSTIVE_MAX_T = 4


def gain_of_set(spec: KernelSpec, lam: float, points) -> float:
    """0.5 * log det(I + K / lam), via the Cholesky factor of lam*I + K."""
    pts = kernels.as_points(points, spec.dim)
    if len(pts) == 0:
        raise InputError("gain_of_set needs at least one point")
    if not lam > 0:
        raise ConfigurationError("lambda must be positive")
    A = np.eye(len(pts)) + kernels.gram(spec, pts) / lam
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("factorisation of I + K/lam failed") from exc
    return float(np.log(np.diag(L)).sum())


def _gain_from_variances(variances, lam: float) -> float:
    # chain rule: each added point contributes 0.5 * log(1 + sigma^2 / lam)
    return float(0.5 * np.log1p(np.asarray(variances) / lam).sum())


@dataclass
class InfoGainReport:
    t: int
    greedy_gain: float
    greedy_indices: list[int]
    exhaustive_gain: float | None
    bound_se: float
    bound_matern: float | None

    def row(self) -> str:
        ex = "-" if self.exhaustive_gain is None else f"{self.exhaustive_gain:.6f}"
        bm = "-" if self.bound_matern is None else f"{self.bound_matern:.6f}"
        return f"{self.t:>6d}  {self.greedy_gain:>12.6f}  {ex:>12}  {self.bound_se:>12.6f}  {bm:>14}"


TABLE_HEADER = f"{'t':>6}  {'greedy':>12}  {'exhaustive':>12}  {'(ln t)^d':>12}  {'t^(d/(2nu+d))':>14}"


def greedy_sequence(spec: KernelSpec, lam: float, domain, t: int) -> tuple[list[int], list[float]]:
    """Maximum-variance sequence of length t; returns (indices, variance at selection)."""
    X = kernels.as_points(domain, spec.dim)
    post = CandidatePosterior(spec, lam, X, capacity=max(t, 1))
    for _ in range(t):
        post.add(int(np.argmax(post.var)))
    return list(post.indices), list(post.pre_variances)


def exhaustive_max_gain(spec: KernelSpec, lam: float, domain, t: int) -> float:
    X = kernels.as_points(domain, spec.dim)
    # repeats allowed: the maximum is over sequences x_1..x_t, not just distinct subsets
    return max(gain_of_set(spec, lam, X[list(c)])
               for c in itertools.combinations_with_replacement(range(len(X)), t))


def greedy_max_gain(spec: KernelSpec, lam: float, domain, t: int) -> InfoGainReport:
    """Greedy (max-variance) lower bound on gamma_t, plus the exact maximum on tiny inputs.

    Greedy selection may revisit a point, so the exhaustive search ranges
    over multisets of size t.
    """
    X = kernels.as_points(domain, spec.dim)
    if not 1 <= t <= len(X):
        raise InputError(f"need 1 <= t <= |domain| = {len(X)}, got {t}")
    idx, variances = greedy_sequence(spec, lam, X, t)
    exhaustive = None
    if len(X) <= EXHAUSTIVE_MAX_DOMAIN and t <= EXHAUSTIVE_MAX_T:
        exhaustive = exhaustive_max_gain(spec, lam, X, t)
    bound_matern = None
    if spec.family is Family.MATERN:
        bound_matern = t ** (spec.dim / (2 * spec.nu + spec.dim))
    return InfoGainReport(t, _gain_from_variances(variances, lam), idx, exhaustive,
                          math.log(max(t, 2)) ** spec.dim, bound_matern)


def greedy_gain_curve(spec: KernelSpec, lam: float, domain, t_max: int) -> np.ndarray:
    """Greedy gain after each of 1..t_max selections."""
    _, variances = greedy_sequence(spec, lam, domain, t_max)
    return np.cumsum(0.5 * np.log1p(np.asarray(variances) / lam))


def loglog_slope(ts, gains) -> float:
    """Least-squares slope of log(gain) against log(t)."""
    return float(np.polyfit(np.log(ts), np.log(gains), 1)[0])


def c1(lam: float) -> float:
    """8 / (lam * ln(1 + 1/lam))."""
    if not lam > 0:
        raise ConfigurationError("lambda must be positive")
    return 8.0 / (lam * math.log1p(1.0 / lam))


def lemma3_bound(gain: float, beta: float, tau: int, lam: float) -> float:
    """Gap bound 2 sqrt(C1 * gain * beta / tau) for survivors after tau max-variance steps."""
    if gain < 0 or beta < 0 or tau < 1:
        raise InputError("gain and beta must be nonnegative and tau >= 1")
    return 2.0 * math.sqrt(c1(lam) * gain * beta / tau)


def format_report(reports: list[InfoGainReport]) -> str:
    return "\n".join([TABLE_HEADER, *(r.row() for r in reports)])
