"""Batched pure exploration with elimination, plus a sequential GP-UCB baseline.

Within a batch, BPE picks points one at a time by maximum posterior
variance over the surviving set; variances do not depend on observed
values, so a whole batch can be designed before anything is observed.
At the batch boundary the batch is observed, confidence bounds are formed
and every survivor whose UCB falls below the best LCB is dropped.

The batch-local variant builds each batch's posterior from that batch's
points only. The full-posterior variant keeps every point and observation.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field

import numpy as np

from . import conf
from .conf import ConfidenceConfig, Theoretical
from .env import Environment, observe
from .errors import ConfigurationError, InputError
from .gp import CandidatePosterior
from .kernels import KernelSpec
from .schedule import BatchSchedule


class Variant(str, enum.Enum):
    BPE_BATCH_LOCAL = "bpe"
    BPE_FULL_POSTERIOR = "bpe-full"
    GPUCB = "gp-ucb"
    BPE_FIXED_BATCHES = "bpe-fixed"

    @property
    def is_batched(self) -> bool:
        return self is not Variant.GPUCB


@dataclass(frozen=True)
class PolicyConfig:
    name: str
    variant: Variant
    kernel: KernelSpec
    confidence: ConfidenceConfig
    schedule: BatchSchedule | None = None

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.variant.is_batched and self.schedule is None:
            raise ConfigurationError(f"policy '{self.name}' needs a batch schedule")


@dataclass(frozen=True, eq=False)
class ActiveDomain:
    """The finite domain together with the mask of surviving candidates."""

    all_points: np.ndarray
    active: np.ndarray
    generation: int = 1

    @classmethod
    def full(cls, points) -> "ActiveDomain":
        pts = np.asarray(points, dtype=np.float64)
        return cls(pts, np.ones(len(pts), dtype=bool), 1)

    def __post_init__(self):
        if not self.active.any():
            raise InputError("active set must contain at least one point")

    @property
    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.active)


@dataclass
class BatchTrace:
    number: int
    indices: list[int]
    selected_variances: list[float]
    active_before: np.ndarray
    design_indices: list[int]       # exactly what the eliminating posterior was built on
    max_active_variance_after: float
    beta: float | None = None
    active_after: np.ndarray | None = None


@dataclass
class RunRecord:
    policy: str
    T: int
    indices: np.ndarray
    y: np.ndarray
    regret: np.ndarray
    batch: np.ndarray               # 1-based batch number of each step
    batches: list[BatchTrace] = field(default_factory=list)

    @property
    def cum_regret(self) -> np.ndarray:
        return np.cumsum(self.regret)

    @property
    def batch_ends(self) -> list[int]:
        """t_i: time index (1-based) at which each batch ends."""
        ends = np.flatnonzero(np.diff(self.batch)) + 1
        return [*ends.tolist(), len(self.batch)]

    def batch_regrets(self) -> np.ndarray:
        """Per-batch cumulative regret R^i."""
        return np.bincount(self.batch - 1, weights=self.regret)


def select_batch(domain: ActiveDomain, posterior: CandidatePosterior, batch_length: int,
                 remaining_budget: int) -> list[int]:
    """Grow ``posterior`` by maximum variance over active points.

    ``posterior`` must be defined on ``domain.all_points``; pass a fresh one
    for a batch-local design. Ties go to the lowest index. At most
    ``remaining_budget`` points are chosen.
    """
    if batch_length < 1:
        raise InputError("batch_length must be >= 1")
    if len(posterior.X) != len(domain.all_points):
        raise InputError("posterior candidates do not match the domain")
    blocked = ~domain.active
    picks = []
    for _ in range(min(batch_length, remaining_budget)):
        score = np.where(blocked, -np.inf, posterior.var)
        j = int(np.argmax(score))
        posterior.add(j)
        picks.append(j)
    return picks


def elimination_mask(active: np.ndarray, ucb: np.ndarray, lcb: np.ndarray) -> np.ndarray:
    """Keep active x with ucb(x) >= max over active of lcb."""
    active = np.asarray(active, dtype=bool)
    best_lcb = np.max(np.where(active, lcb, -np.inf))
    return active & (np.asarray(ucb) >= best_lcb)


def eliminate(domain: ActiveDomain, posterior: CandidatePosterior, beta: float) -> ActiveDomain:
    mean = posterior.mean
    var = posterior.var
    mask = elimination_mask(domain.active, conf.upper_bound(mean, var, beta),
                            conf.lower_bound(mean, var, beta))
    return ActiveDomain(domain.all_points, mask, domain.generation + 1)


def _resolve_confidence(policy: PolicyConfig, env: Environment) -> ConfidenceConfig:
    c = policy.confidence
    if isinstance(c.mode, Theoretical):
        B = policy.schedule.num_batches if policy.schedule is not None else 1
        c = dataclasses.replace(c, domain_size=env.size, num_batches=B)
    return c


def run(policy: PolicyConfig, env: Environment, T: int, rng_seed: int) -> RunRecord:
    if T < 1:
        raise ConfigurationError("horizon must be >= 1")
    if policy.kernel.dim != env.dim:
        raise ConfigurationError(
            f"kernel dimension {policy.kernel.dim} does not match domain dimension {env.dim}")
    if policy.variant.is_batched:
        if policy.schedule.horizon != T:
            raise ConfigurationError(
                f"schedule horizon {policy.schedule.horizon} does not match T={T}")
        return _run_bpe(policy, env, T, rng_seed)
    return _run_gpucb(policy, env, T, rng_seed)


def _run_bpe(policy: PolicyConfig, env: Environment, T: int, seed: int) -> RunRecord:
    cfg = _resolve_confidence(policy, env)
    lam = cfg.regulariser
    full = policy.variant is Variant.BPE_FULL_POSTERIOR
    lengths = policy.schedule.lengths
    domain = ActiveDomain.full(env.domain)

    indices: list[int] = []
    ys: list[float] = []
    batch_no: list[int] = []
    traces: list[BatchTrace] = []
    posterior = CandidatePosterior(policy.kernel, lam, env.domain, capacity=T) if full else None

    for i, n_i in enumerate(lengths, start=1):
        if not full:
            posterior = CandidatePosterior(policy.kernel, lam, env.domain, capacity=n_i)
        start = posterior.size
        picks = select_batch(domain, posterior, n_i, T - len(indices))
        for j in picks:
            ys.append(observe(env, j, len(indices) + 1, seed))
            indices.append(j)
            batch_no.append(i)
        posterior.observe_all(ys[-posterior.size:] if not full else ys)
        trace = BatchTrace(
            number=i, indices=picks,
            selected_variances=posterior.pre_variances[start:],
            active_before=domain.active.copy(),
            design_indices=list(posterior.indices),
            max_active_variance_after=float(posterior.var[domain.active].max()))
        if i < len(lengths) and len(indices) < T:
            b = conf.beta(cfg, i)
            domain = eliminate(domain, posterior, b)
            trace.beta = b
            trace.active_after = domain.active.copy()
        traces.append(trace)
        if len(indices) >= T:
            break
    return _record(policy.name, env, T, indices, ys, batch_no, traces)


def _run_gpucb(policy: PolicyConfig, env: Environment, T: int, seed: int) -> RunRecord:
    cfg = _resolve_confidence(policy, env)
    posterior = CandidatePosterior(policy.kernel, cfg.regulariser, env.domain, capacity=T)
    indices: list[int] = []
    ys: list[float] = []
    for t in range(1, T + 1):
        b = conf.beta(cfg, t)
        score = conf.upper_bound(posterior.mean, posterior.var, b)
        j = int(np.argmax(score))
        y = observe(env, j, t, seed)
        posterior.add(j, y)
        indices.append(j)
        ys.append(y)
    return _record(policy.name, env, T, indices, ys, list(range(1, T + 1)), [])


def _record(name, env, T, indices, ys, batch_no, traces) -> RunRecord:
    idx = np.asarray(indices, dtype=np.int64)
    return RunRecord(
        policy=name, T=T, indices=idx, y=np.asarray(ys, dtype=np.float64),
        regret=env.f_max - env.f_values[idx], batch=np.asarray(batch_no, dtype=np.int64),
        batches=traces)
