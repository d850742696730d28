"""Pre-specified batch-length sequences.

Every schedule is a list of positive integers summing exactly to the
horizon, fixed before any observation is made.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .kernels import Family, KernelSpec


class Kind(str, enum.Enum):
    ORIG_BPE = "orig"
    CONSTANT_SE = "const-se"
    CONSTANT_MATERN = "const-matern"
    FIXED_EQUAL = "fixed"


@dataclass(frozen=True)
class BatchSchedule:
    lengths: tuple[int, ...]
    horizon: int
    kind: Kind

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(int(n) for n in self.lengths))
        if sum(self.lengths) != self.horizon:
            raise ConfigurationError(
                f"batch lengths sum to {sum(self.lengths)}, horizon is {self.horizon}")
        if any(n < 1 for n in self.lengths):
            raise ConfigurationError(f"all batch lengths must be >= 1: {self.lengths}")

    @property
    def num_batches(self) -> int:
        return len(self.lengths)

    @property
    def boundaries(self) -> list[int]:
        """End time t_i of each batch (1-based, inclusive)."""
        return list(np.cumsum(self.lengths).tolist())

    def __str__(self) -> str:
        return ",".join(str(n) for n in self.lengths)


def ceil_sqrt(n: int) -> int:
    """Exact ceil(sqrt(n)) for a nonnegative integer."""
    return 0 if n <= 0 else math.isqrt(n - 1) + 1


def orig_bpe_lengths(T: int) -> list[int]:
    lengths: list[int] = []
    prev, used = 1, 0
    while used < T:
        n = ceil_sqrt(T * prev)
        n = min(n, T - used)
        lengths.append(n)
        used += n
        prev = n
    return lengths


def orig_bpe_schedule(T: int) -> BatchSchedule:
    """N_i = ceil(sqrt(T * N_{i-1})) with N_0 = 1; the last batch is clipped to the budget."""
    if T < 2:
        raise ConfigurationError(f"horizon must be at least 2, got {T}")
    return BatchSchedule(tuple(orig_bpe_lengths(int(T))), int(T), Kind.ORIG_BPE)


def orig_bpe_batch_counts(T: np.ndarray) -> np.ndarray:
    """Number of batches of :func:`orig_bpe_schedule` for many horizons at once.

    Vectorised over int64 horizons (T * N stays below 2**63 for T up to ~3e9).
    """
    T = np.asarray(T, dtype=np.int64)
    prev = np.ones_like(T)
    used = np.zeros_like(T)
    count = np.zeros_like(T)
    live = used < T
    while live.any():
        prod = T[live] * prev[live]
        n = _ceil_sqrt_array(prod)
        prev[live] = n
        used[live] += n
        count[live] += 1
        live = used < T
    return count


def _ceil_sqrt_array(n: np.ndarray) -> np.ndarray:
    r = np.sqrt(n.astype(np.float64)).astype(np.int64)
    # float sqrt can be off by one in either direction for large n
    r -= (r * r > n)
    r += ((r + 1) * (r + 1) <= n)
    return r + (r * r < n)


def prop1_batch_bound(T: int) -> int:
    """ceil(log2 log2 T) + 1."""
    return math.ceil(math.log2(math.log2(T))) + 1


def schedule_exponent(family: Family | str, nu: float | None = None, d: int = 1) -> float:
    """Kernel-dependent eta: 1/2 for SE, nu / (2 nu + d) for Matérn."""
    family = Family(family)
    if family is Family.SE:
        return 0.5
    if nu is None or nu <= 0:
        raise ConfigurationError("Matern schedule needs a positive nu")
    return nu / (2.0 * nu + d)


def constant_b_schedule(T: int, B: int, kernel: KernelSpec | Family | str,
                        normalize: bool = False, *, nu: float | None = None,
                        d: int | None = None) -> BatchSchedule:
    """Batch lengths for a constant number of batches B.

    Raw lengths are ``ceil(T ** ((1 - eta**i) / (1 - eta**B)))`` for Matérn and
    ``ceil((T / L) ** ((1 - eta**i) / (1 - eta**B)) * L)`` with ``L = (ln T)**d``
    for SE, for i < B, with the last batch taking the remainder.

    With ``normalize`` the SE log factor is dropped, all B lengths are formed
    from the power law (the last one equals T) and rescaled by T / sum, rounded
    to nearest, the last batch absorbing the rounding residue.

    ``kernel`` may be a :class:`KernelSpec` or a family name; ``nu`` and ``d``
    override the spec (the schedule is pure arithmetic, so any nu > 0 is fine).
    """
    if isinstance(kernel, KernelSpec):
        family = kernel.family
        nu = kernel.nu if nu is None else nu
        d = kernel.dim if d is None else d
    else:
        family = Family(kernel)
    d = 1 if d is None else int(d)
    T, B = int(T), int(B)
    if B < 2:
        raise ConfigurationError(f"constant-B schedules need B >= 2, got {B}")
    if T < B:
        raise ConfigurationError(f"horizon {T} is shorter than the number of batches {B}")
    eta = schedule_exponent(family, nu, d)
    kind = Kind.CONSTANT_SE if family is Family.SE else Kind.CONSTANT_MATERN
    frac = [(1.0 - eta ** i) / (1.0 - eta ** B) for i in range(1, B + 1)]

    if normalize:
        raw = np.array([math.ceil(T ** f) for f in frac], dtype=np.float64)
        return BatchSchedule(tuple(_normalize(raw, T)), T, kind)

    if family is Family.SE:
        logf = math.log(T) ** d
        lengths = [math.ceil((T / logf) ** f * logf) for f in frac[:-1]]
    else:
        lengths = [math.ceil(T ** f) for f in frac[:-1]]
    lengths.append(T - sum(lengths))
    if min(lengths) < 1:
        raise ConfigurationError(
            f"constant-B schedule infeasible for T={T}, B={B}: {lengths}; "
            "enable normalization or increase T")
    return BatchSchedule(tuple(lengths), T, kind)


def _normalize(raw: np.ndarray, T: int) -> list[int]:
    scaled = np.rint(raw * (T / raw.sum())).astype(np.int64)
    scaled[-1] += T - scaled.sum()
    # raise any sub-unit batch to 1, taking the deficit from the largest one
    for i in range(len(scaled)):
        if scaled[i] < 1:
            deficit = 1 - scaled[i]
            scaled[i] = 1
            scaled[int(np.argmax(scaled))] -= deficit
    return scaled.tolist()


def fixed_equal_schedule(T: int, B: int) -> BatchSchedule:
    T, B = int(T), int(B)
    if B < 1 or B > T:
        raise ConfigurationError(f"need 1 <= B <= T, got B={B}, T={T}")
    q, r = divmod(T, B)
    return BatchSchedule(tuple(q + (1 if i < r else 0) for i in range(B)), T, Kind.FIXED_EQUAL)


def make_schedule(kind: Kind | str, T: int, B: int | None = None, *,
                  family: str = "se", nu: float | None = None, d: int = 1,
                  normalize: bool = False) -> BatchSchedule:
    """Dispatch on schedule kind (used by the CLI and config loader)."""
    kind = Kind(kind)
    if kind is Kind.ORIG_BPE:
        return orig_bpe_schedule(T)
    if B is None:
        raise ConfigurationError(f"schedule kind '{kind.value}' requires B")
    if kind is Kind.FIXED_EQUAL:
        return fixed_equal_schedule(T, B)
    fam = Family.SE if kind is Kind.CONSTANT_SE else Family.MATERN
    return constant_b_schedule(T, B, fam, normalize, nu=nu, d=d)
