"""Benchmark environments: finite domains, synthetic objectives, noise and regret."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputError, ResourceError
from .kernels import KernelSpec

MAX_DISCRETIZATION_POINTS = 10**6


class PeakStyle(str, enum.Enum):
    SINGLE = "single_peak"
    MULTI = "multi_peak"


@dataclass(frozen=True, eq=False)
class Environment:
    """Ground truth on a finite domain.

    ``f_values[i]`` is the noiseless objective at ``domain[i]``. The optimum
    index is the lowest index attaining the maximum.
    """

    domain: np.ndarray
    f_values: np.ndarray
    noise_sigma: float = 0.02
    rkhs_norm: float | None = None
    per_axis: int | None = None
    optimum_index: int = field(init=False)

    def __post_init__(self):
        domain = np.array(self.domain, dtype=np.float64, ndmin=2)
        if domain.shape[0] == 1 and np.ndim(self.domain) == 1:
            domain = domain.T
        f = np.array(self.f_values, dtype=np.float64).reshape(-1)
        if len(f) != len(domain) or len(f) == 0:
            raise InputError(f"{len(f)} function values for {len(domain)} domain points")
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be nonnegative")
        domain.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "f_values", f)
        object.__setattr__(self, "optimum_index", int(np.argmax(f)))

    @property
    def size(self) -> int:
        return len(self.f_values)

    @property
    def dim(self) -> int:
        return self.domain.shape[1]

    @property
    def f_max(self) -> float:
        return float(self.f_values[self.optimum_index])

    def with_noise(self, noise_sigma: float) -> "Environment":
        return Environment(self.domain, self.f_values, noise_sigma, self.rkhs_norm, self.per_axis)


def build_grid(d: int, per_axis: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """per_axis**d evenly spaced lattice points over [lo, hi]^d, row-major
    (the last coordinate varies fastest)."""
    if per_axis < 2:
        raise ConfigurationError(f"per_axis must be at least 2, got {per_axis}")
    if d < 1:
        raise ConfigurationError(f"dimension must be positive, got {d}")
    axis = np.linspace(lo, hi, per_axis)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def discretize_for_horizon(d: int, T: int, cap: int = MAX_DISCRETIZATION_POINTS) -> np.ndarray:
    """Closed grid on [0, 1]^d with spacing 1/ceil(sqrt(T)) per axis."""
    if T < 4:
        raise ConfigurationError(f"horizon must be at least 4, got {T}")
    per_axis = math.isqrt(T - 1) + 2  # ceil(sqrt(T)) + 1
    if per_axis ** d > cap:
        raise ResourceError(f"discretisation would need {per_axis ** d} points (cap {cap})")
    return build_grid(d, per_axis, 0.0, 1.0)


def _infer_per_axis(domain: np.ndarray) -> int | None:
    m, d = domain.shape
    p = round(m ** (1.0 / d))
    return p if p ** d == m else None


def sample_rkhs_function(spec: KernelSpec, domain, psi: float, num_centers: int,
                         rng_seed: int, noise_sigma: float = 0.02) -> Environment:
    """Random kernel mixture f = sum_j alpha_j k(., c_j) with RKHS norm exactly ``psi``.

    Centres are distinct domain points drawn uniformly; alpha is standard
    normal, rescaled so that sqrt(alpha^T K_c alpha) == psi.
    """
    if num_centers < 1:
        raise ConfigurationError("num_centers must be >= 1")
    if not psi > 0:
        raise ConfigurationError("psi must be positive")
    X = kernels.as_points(domain, spec.dim)
    rng = np.random.default_rng(rng_seed)
    for _ in range(10):
        idx = rng.choice(len(X), size=num_centers, replace=num_centers > len(X))
        C = X[idx]
        if len(np.unique(C, axis=0)) == num_centers:
            break
    else:
        raise ConfigurationError("could not draw distinct kernel centres in 10 attempts")
    alpha = rng.standard_normal(num_centers)
    Kc = kernels.gram(spec, C)
    alpha *= psi / math.sqrt(alpha @ Kc @ alpha)
    f = kernels.cross(spec, X, C) @ alpha
    return Environment(X, f, noise_sigma, rkhs_norm=float(math.sqrt(alpha @ Kc @ alpha)),
                       per_axis=_infer_per_axis(X))


def grid_local_maxima(values: np.ndarray, per_axis: int) -> np.ndarray:
    """Flat indices of strict local maxima of a row-major 2-D grid (8-neighbourhood)."""
    Z = np.asarray(values, dtype=np.float64).reshape(per_axis, per_axis)
    P = np.pad(Z, 1, constant_values=-np.inf)
    is_max = np.ones_like(Z, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_max &= Z > P[1 + di:1 + di + per_axis, 1 + dj:1 + dj + per_axis]
    return np.flatnonzero(is_max.reshape(-1))


def _interior_indices(X: np.ndarray, margin: float) -> np.ndarray:
    lo, hi = X.min(0), X.max(0)
    pad = margin * (hi - lo)
    return np.flatnonzero(np.all((X >= lo + pad) & (X <= hi - pad), axis=1))


def make_peaked_function(domain, style: PeakStyle | str, rng_seed: int,
                         spec: KernelSpec | None = None, noise_sigma: float = 0.02,
                         max_attempts: int = 200) -> Environment:
    """Kernel-mixture test surface on a square 2-D grid, scaled so max f = 1.

    ``single_peak`` is one dominant bump, possibly with small satellite bumps
    that do not create a second local maximum. ``multi_peak`` has 3-5 bumps of
    nearly equal height, at least three of whose grid maxima lie within 5 % of
    the global maximum. Weights are nonnegative, so all values lie in [0, 1].
    """
    style = PeakStyle(style)
    X = np.asarray(domain, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise InputError("make_peaked_function needs a 2-D domain")
    per_axis = _infer_per_axis(X)
    if per_axis is None:
        raise InputError("domain must be a square grid")
    spec = spec or KernelSpec.se(0.5, dim=2)
    rng = np.random.default_rng(rng_seed)
    inner = _interior_indices(X, 0.1)
    width = float(np.ptp(X[:, 0]))

    for _ in range(max_attempts):
        if style is PeakStyle.SINGLE:
            main = X[rng.choice(inner)]
            n_sat = int(rng.integers(0, 3))
            offsets = rng.normal(scale=0.5 * spec.lengthscale, size=(n_sat, 2))
            centres = np.vstack([main, main + offsets])
            weights = np.concatenate([[1.0], rng.uniform(0.2, 0.5, n_sat)])
        else:
            n = int(rng.integers(3, 6))
            centres = _separated_points(X[inner], n, 3.0 * spec.lengthscale, rng)
            if centres is None:
                continue
            weights = rng.uniform(0.97, 1.0, n)
        f = kernels.cross(spec, X, centres) @ weights
        scale = f.max()
        maxima = grid_local_maxima(f, per_axis)
        if style is PeakStyle.SINGLE:
            ok = len(maxima) == 1
        else:
            ok = np.sum(f[maxima] >= 0.95 * scale) >= 3  # f >= 0 so range == max
        if ok:
            Kc = kernels.gram(spec, centres)
            w = weights / scale
            return Environment(X, f / scale, noise_sigma,
                               rkhs_norm=float(math.sqrt(w @ Kc @ w)), per_axis=per_axis)
    raise ConfigurationError(
        f"could not build a {style.value} surface on a domain of width {width:g} "
        f"with lengthscale {spec.lengthscale:g}; enlarge the domain")


def _separated_points(candidates: np.ndarray, n: int, min_dist: float, rng,
                      tries: int = 50) -> np.ndarray | None:
    for _ in range(tries):
        order = rng.permutation(len(candidates))
        chosen: list[np.ndarray] = []
        for i in order:
            p = candidates[i]
            if all(np.linalg.norm(p - q) >= min_dist for q in chosen):
                chosen.append(p)
                if len(chosen) == n:
                    return np.array(chosen)
    return None


def constant_function(domain, value: float = 0.0, noise_sigma: float = 0.0) -> Environment:
    X = np.asarray(domain, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return Environment(X, np.full(len(X), float(value)), noise_sigma)


def observe(env: Environment, index: int, t: int, rng_seed: int) -> float:
    """Noisy observation at ``domain[index]`` for time step ``t``.

    The noise is drawn from a generator keyed by (rng_seed, t), so it depends
    only on the seed and the time step, not on call order.
    """
    value = float(env.f_values[index])
    if env.noise_sigma == 0:
        return value
    noise = np.random.default_rng((int(rng_seed), int(t))).standard_normal()
    return value + env.noise_sigma * float(noise)


def regret(env: Environment, index: int) -> float:
    """f(x*) - f(x), from the noiseless ground truth."""
    return env.f_max - float(env.f_values[index])


def to_text(env: Environment) -> str:
    """Header ``d=.. per_axis=.. noise_sigma=.. rkhs_norm=..`` then ``coords... f`` lines."""
    header = (f"d={env.dim} per_axis={env.per_axis if env.per_axis else 'none'} "
              f"noise_sigma={env.noise_sigma!r} "
              f"rkhs_norm={'none' if env.rkhs_norm is None else repr(env.rkhs_norm)}")
    lines = [header]
    for x, fx in zip(env.domain, env.f_values):
        lines.append(" ".join(repr(float(v)) for v in (*x, fx)))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Environment:
    rows = [ln for ln in text.splitlines() if ln.strip()]
    if not rows:
        raise InputError("empty environment file")
    try:
        meta = dict(tok.split("=", 1) for tok in rows[0].split())
        d = int(meta["d"])
        per_axis = None if meta["per_axis"] == "none" else int(meta["per_axis"])
        noise = float(meta["noise_sigma"])
        norm = None if meta["rkhs_norm"] == "none" else float(meta["rkhs_norm"])
        data = np.array([[float(v) for v in ln.split()] for ln in rows[1:]])
    except (KeyError, ValueError) as exc:
        raise InputError(f"malformed environment text: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != d + 1:
        raise InputError(f"expected {d + 1} columns per point line")
    return Environment(data[:, :d], data[:, d], noise, norm, per_axis)
