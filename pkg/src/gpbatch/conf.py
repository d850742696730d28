"""Confidence-width parameter beta and the UCB/LCB scores built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Theoretical:
    """Union-bounded offline width: (psi + R/sqrt(lam) * sqrt(2 ln(|X| B / delta)))^2."""


@dataclass(frozen=True)
class FixedBeta:
    value: float


@dataclass(frozen=True)
class GrowingLog:
    """beta_i = multiplier * ln(offset * i)."""

    multiplier: float = 3.0
    offset: float = 2.0


@dataclass(frozen=True)
class ConfidenceConfig:
    psi: float = 1.0
    noise_r: float = 0.02
    lam: float | None = None  # None means lam = noise_r ** 2
    delta: float = 0.1
    domain_size: int = 1
    num_batches: int = 1
    mode: Theoretical | FixedBeta | GrowingLog = Theoretical()

    def __post_init__(self):
        if self.psi < 0 or self.noise_r < 0:
            raise ConfigurationError("psi and noise_r must be nonnegative")
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if self.domain_size < 1 or self.num_batches < 1:
            raise ConfigurationError("domain_size and num_batches must be positive")
        if not self.regulariser > 0:
            raise ConfigurationError(
                "lambda must be positive; set it explicitly when noise_r is 0")
        if isinstance(self.mode, FixedBeta) and self.mode.value < 0:
            raise ConfigurationError("fixed beta must be nonnegative")

    @property
    def regulariser(self) -> float:
        return self.noise_r ** 2 if self.lam is None else float(self.lam)


def beta_delta(psi: float, noise_r: float, lam: float, delta: float) -> float:
    """Pointwise width for a single query point at confidence 1 - delta."""
    if not 0.0 < delta < 1.0:
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta}")
    return (psi + noise_r / math.sqrt(lam) * math.sqrt(2.0 * math.log(1.0 / delta))) ** 2


def beta(config: ConfidenceConfig, batch_index: int = 1) -> float:
    if batch_index < 1:
        raise ConfigurationError(f"batch index must be >= 1, got {batch_index}")
    mode = config.mode
    if isinstance(mode, FixedBeta):
        return float(mode.value)
    if isinstance(mode, GrowingLog):
        return mode.multiplier * math.log(mode.offset * batch_index)
    delta = config.delta / (config.domain_size * config.num_batches)
    return beta_delta(config.psi, config.noise_r, config.regulariser, delta)


def upper_bound(mean, var, beta_value: float):
    return np.asarray(mean) + math.sqrt(beta_value) * np.sqrt(var)


def lower_bound(mean, var, beta_value: float):
    return np.asarray(mean) - math.sqrt(beta_value) * np.sqrt(var)


def _moments(model, x):
    mu, var = model.predict(x)
    if mu is None:
        if model.size:
            mu = model.mean(x)  # raises StateError
        else:
            # no history at all: prior mean 0, prior variance k(x, x) = 1
            mu = 0.0 if np.ndim(var) == 0 else np.zeros_like(var)
    return mu, var


def ucb(model, beta_value: float, x):
    """mu(x) + sqrt(beta) * sigma(x) for a :class:`~gpbatch.gp.GPModel`."""
    mu, var = _moments(model, x)
    return upper_bound(mu, var, beta_value)


def lcb(model, beta_value: float, x):
    mu, var = _moments(model, x)
    return lower_bound(mu, var, beta_value)
