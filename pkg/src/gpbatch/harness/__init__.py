from .config import EnvSpec, ExperimentConfig, load_config, parse_config
from .runner import AggregateResult, aggregate, emit_csv, run_experiment

__all__ = ["EnvSpec", "ExperimentConfig", "load_config", "parse_config",
           "AggregateResult", "aggregate", "emit_csv", "run_experiment"]
