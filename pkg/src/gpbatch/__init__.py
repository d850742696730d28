"""Gaussian-process bandit optimisation with few batches."""

from .conf import ConfidenceConfig, FixedBeta, GrowingLog, Theoretical
from .env import Environment
from .errors import (ConfigurationError, GPBatchError, InputError, NumericalError,
                     ResourceError, StateError)
from .gp import CandidatePosterior, GPModel
from .kernels import Family, KernelSpec
from .policy import PolicyConfig, RunRecord, Variant, run
from .schedule import BatchSchedule

__version__ = "0.1.0"
