"""Flat ``key = value`` experiment configuration.

Keys carry a section prefix: ``run.``, ``env.`` or ``policy.<n>.``.
Blank lines and ``#`` comments are ignored; unknown keys are errors.

Example::

    run.T = 1000
    run.trials = 10
    env.function = single_peak
    policy.1.variant = bpe
    policy.1.schedule = const-se
    policy.1.B = 3
    policy.2.variant = gp-ucb
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .. import env as envmod
from ..conf import ConfidenceConfig, FixedBeta, GrowingLog, Theoretical
from ..errors import ConfigurationError
from ..kernels import KernelSpec
from ..policy import PolicyConfig, Variant
from ..schedule import Kind, make_schedule

ENV_FUNCTIONS = ("single_peak", "multi_peak", "rkhs", "constant")


@dataclass(frozen=True)
class EnvSpec:
    function: str = "single_peak"
    d: int = 2
    per_axis: int = 50
    lo: float = 0.0
    hi: float = 4.0
    noise_sigma: float = 0.02
    kernel: str = "se"
    lengthscale: float = 0.5
    nu: float | None = None
    psi: float = 1.0
    num_centers: int = 20
    value: float = 0.0

    @property
    def kernel_spec(self) -> KernelSpec:
        return KernelSpec(self.kernel, self.lengthscale, self.d, self.nu)

    def build(self, seed: int) -> envmod.Environment:
        X = envmod.build_grid(self.d, self.per_axis, self.lo, self.hi)
        if self.function == "constant":
            return envmod.Environment(X, [self.value] * len(X), self.noise_sigma,
                                      per_axis=self.per_axis)
        if self.function == "rkhs":
            return envmod.sample_rkhs_function(self.kernel_spec, X, self.psi, self.num_centers,
                                               seed, self.noise_sigma)
        return envmod.make_peaked_function(X, self.function, seed, self.kernel_spec,
                                           self.noise_sigma)


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvSpec
    policies: tuple[PolicyConfig, ...]
    T: int = 1000
    trials: int = 10
    base_seed: int = 0
    output_dir: Path = Path("results")
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("run.trials must be >= 1")
        if self.T < 1:
            raise ConfigurationError("run.T must be >= 1")
        if not self.policies:
            raise ConfigurationError("at least one policy is required")
        names = [p.name for p in self.policies]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"policy names must be unique: {names}")
        if self.base_seed < 0:
            raise ConfigurationError("run.base_seed must be nonnegative")


_RUN_KEYS = {"T": int, "trials": int, "base_seed": int, "output_dir": Path, "jobs": int}
_ENV_KEYS = {"function": str, "d": int, "per_axis": int, "lo": float, "hi": float,
             "noise_sigma": float, "kernel": str, "lengthscale": float, "nu": float,
             "psi": float, "num_centers": int, "value": float}
_POLICY_KEYS = {"name", "variant", "schedule", "B", "normalize", "beta", "psi",
                "noise_r", "lambda", "delta"}
_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _convert(key: str, raw: str, kind):
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigurationError(f"bad value for {key}: {raw!r}") from exc


def parse_beta(text: str):
    """``theoretical``, a bare number, ``fixed:<v>`` or ``log:<multiplier>,<offset>``."""
    t = text.strip().lower()
    if t == "theoretical":
        return Theoretical()
    if t.startswith("log"):
        m = re.fullmatch(r"log(?::\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+))?", t)
        if not m:
            raise ConfigurationError(f"bad beta spec {text!r}; expected log:<m>,<c>")
        return GrowingLog(float(m[1]), float(m[2])) if m[1] else GrowingLog()
    t = t.removeprefix("fixed:")
    try:
        return FixedBeta(float(t))
    except ValueError as exc:
        raise ConfigurationError(f"bad beta spec {text!r}") from exc


def _default_beta(function: str):
    return {"single_peak": FixedBeta(2.0), "multi_peak": FixedBeta(6.0)}.get(function, Theoretical())


def _build_policy(num: str, raw: dict[str, str], env: EnvSpec, T: int) -> PolicyConfig:
    variant = Variant(_convert(f"policy.{num}.variant", raw.get("variant", "bpe"), str))
    name = raw.get("name", f"policy{num}")
    schedule = None
    if variant.is_batched:
        default_kind = "fixed" if variant is Variant.BPE_FIXED_BATCHES else "orig"
        kind = Kind(_convert(f"policy.{num}.schedule", raw.get("schedule", default_kind), str))
        if variant is Variant.BPE_FIXED_BATCHES and kind is not Kind.FIXED_EQUAL:
            raise ConfigurationError(f"policy.{num}: bpe-fixed requires schedule = fixed")
        B = int(raw["B"]) if "B" in raw else None
        normalize = _BOOL.get(raw.get("normalize", "true").lower())
        if normalize is None:
            raise ConfigurationError(f"policy.{num}.normalize must be true/false")
        schedule = make_schedule(kind, T, B, nu=env.nu, d=env.d, normalize=normalize)
    elif "schedule" in raw or "B" in raw:
        raise ConfigurationError(f"policy.{num}: gp-ucb takes no schedule")
    noise_r = float(raw.get("noise_r", env.noise_sigma))
    lam = float(raw["lambda"]) if "lambda" in raw else None
    mode = parse_beta(raw["beta"]) if "beta" in raw else _default_beta(env.function)
    confidence = ConfidenceConfig(
        psi=float(raw.get("psi", env.psi)), noise_r=noise_r, lam=lam,
        delta=float(raw.get("delta", 0.1)), mode=mode)
    return PolicyConfig(name, variant, env.kernel_spec, confidence, schedule)


def parse_config(text: str) -> ExperimentConfig:
    run_kw: dict = {}
    env_kw: dict = {}
    policies: dict[str, dict[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        section, _, rest = key.partition(".")
        if section == "run" and rest in _RUN_KEYS:
            run_kw[rest] = _convert(key, value, _RUN_KEYS[rest])
        elif section == "env" and rest in _ENV_KEYS:
            env_kw[rest] = _convert(key, value, _ENV_KEYS[rest])
        elif section == "policy" and re.fullmatch(r"\d+\.\w+", rest) \
                and rest.split(".")[1] in _POLICY_KEYS:
            num, sub = rest.split(".")
            policies.setdefault(num, {})[sub] = value
        else:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
    try:
        env = EnvSpec(**env_kw)
        if env.function not in ENV_FUNCTIONS:
            raise ConfigurationError(f"env.function must be one of {ENV_FUNCTIONS}")
        env.kernel_spec  # validates kernel settings
        T = run_kw.get("T", ExperimentConfig.T)
        built = tuple(_build_policy(n, policies[n], env, T)
                      for n in sorted(policies, key=int))
        return ExperimentConfig(env=env, policies=built, **run_kw)
    except ValueError as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc.strerror}") from exc
    return parse_config(text)
