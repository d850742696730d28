"""Multi-trial execution, aggregation and CSV output."""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import policy as pol
from .config import ExperimentConfig

log = logging.getLogger(__name__)

RAW_HEADER = ["trial", "policy", "t", "batch", "point_index", "y", "regret", "cum_regret"]
SUMMARY_HEADER = ["policy", "t", "mean_cum_regret", "half_std"]


@dataclass
class AggregateResult:
    T: int
    policies: list[str]
    mean_cum_regret: dict[str, np.ndarray]
    half_std: dict[str, np.ndarray]
    batch_lengths: dict[str, list[int]]

    def final(self, name: str) -> float:
        return float(self.mean_cum_regret[name][-1])


def _run_one(args):
    config, trial, p = args
    seed = config.base_seed + trial
    environment = config.env.build(seed)
    return pol.run(p, environment, config.T, seed)


def run_trials(config: ExperimentConfig) -> list[list[pol.RunRecord]]:
    """records[trial][policy]; every policy in a trial faces the same f and noise stream."""
    jobs = [(config, k, p) for k in range(config.trials) for p in config.policies]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as ex:
            flat = list(ex.map(_run_one, jobs))
    else:
        flat = []
        for job in jobs:
            flat.append(_run_one(job))
            log.info("trial %d policy %s: R_T=%.4f", job[1], job[2].name,
                     flat[-1].cum_regret[-1])
    n = len(config.policies)
    return [flat[k * n:(k + 1) * n] for k in range(config.trials)]


def aggregate(config: ExperimentConfig, records: list[list[pol.RunRecord]]) -> AggregateResult:
    names = [p.name for p in config.policies]
    mean, half = {}, {}
    lengths = {}
    for j, name in enumerate(names):
        curves = np.stack([records[k][j].cum_regret for k in range(len(records))])
        mean[name] = curves.mean(axis=0)
        half[name] = 0.5 * curves.std(axis=0)
        r0 = records[0][j]
        lengths[name] = np.diff([0, *r0.batch_ends]).tolist()
    return AggregateResult(config.T, names, mean, half, lengths)


def run_experiment(config: ExperimentConfig, write: bool = True):
    """Run every (trial, policy) pair, aggregate, and optionally write CSVs.

    Returns ``(AggregateResult, records)``.
    """
    records = run_trials(config)
    result = aggregate(config, records)
    if write:
        emit_csv(result, records, config.output_dir)
    return result, records


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(result: AggregateResult, records: list[list[pol.RunRecord]], output_dir) -> list[Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    raw_path, summary_path, sched_path = out / "raw.csv", out / "summary.csv", out / "schedule.txt"

    with raw_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_HEADER)
        for k, trial in enumerate(records):
            for rec in trial:
                cum = rec.cum_regret
                for t in range(rec.T):
                    w.writerow([k, rec.policy, t + 1, int(rec.batch[t]), int(rec.indices[t]),
                                _fmt(rec.y[t]), _fmt(rec.regret[t]), _fmt(cum[t])])

    with summary_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for name in result.policies:
            for t in range(result.T):
                w.writerow([name, t + 1, _fmt(result.mean_cum_regret[name][t]),
                            _fmt(result.half_std[name][t])])

    with sched_path.open("w") as fh:
        for name in result.policies:
            fh.write(f"{name}: {','.join(map(str, result.batch_lengths[name]))}\n")
    return [raw_path, summary_path, sched_path]
