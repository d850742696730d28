"""Reduced-scale versions of the library's property checks, for ``gpbatch selftest``."""

from __future__ import annotations

import numpy as np

from . import conf, diag, env, policy, schedule
from .gp import GPModel
from .kernels import KernelSpec


def check_batch_count():
    T = np.arange(4, 20001)
    counts = schedule.orig_bpe_batch_counts(T)
    bound = np.array([schedule.prop1_batch_bound(int(t)) for t in T])
    assert np.all(counts <= bound), "batch count exceeds ceil(log2 log2 T) + 1"
    assert str(schedule.orig_bpe_schedule(1000)) == "32,179,424,365"


def check_posterior_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(1, 15))
        spec = KernelSpec.se(rng.uniform(0.2, 1.0), 2)
        lam = 10 ** rng.uniform(-4, 0)
        X, Q, y = rng.uniform(size=(n, 2)), rng.uniform(size=(10, 2)), rng.normal(size=n)
        m = GPModel.fit(spec, lam)
        for x in X:
            m = m.extend(x)
        m = m.attach_observations(y)
        K = spec.profile(np.linalg.norm(X[:, None] - X[None], axis=-1)) + lam * np.eye(n)
        k = spec.profile(np.linalg.norm(X[:, None] - Q[None], axis=-1))
        mu, var = m.predict(Q)
        assert np.allclose(mu, k.T @ np.linalg.solve(K, y), atol=1e-8, rtol=0)
        exact = np.clip(1 - np.einsum("ij,ij->j", k, np.linalg.solve(K, k)), 0, 1)
        assert np.allclose(var, exact, atol=1e-8, rtol=0)


def check_elimination_safety():
    spec = KernelSpec.se(0.2, 1)
    X = env.build_grid(1, 60)
    for seed in range(10):
        e = env.sample_rkhs_function(spec, X, 2.0, 8, seed, noise_sigma=0.0)
        c = conf.ConfidenceConfig(psi=e.rkhs_norm, noise_r=0.0, lam=0.05)
        p = policy.PolicyConfig("bpe", "bpe", spec, c, schedule.orig_bpe_schedule(100))
        rec = policy.run(p, e, 100, seed)
        for b in rec.batches:
            assert b.active_before[e.optimum_index], f"optimum eliminated (seed {seed})"


def check_greedy_vs_exhaustive():
    rng = np.random.default_rng(1)
    spec = KernelSpec.se(0.3, 1)
    for _ in range(5):
        X = rng.uniform(size=(8, 1))
        r = diag.greedy_max_gain(spec, 0.5, X, 2)
        assert r.greedy_gain <= r.exhaustive_gain + 1e-12


CHECKS = [check_batch_count, check_posterior_oracle, check_elimination_safety,
          check_greedy_vs_exhaustive]


def run_all(verbose: bool = False) -> bool:
    ok = True
    for check in CHECKS:
        name = check.__name__.removeprefix("check_")
        try:
            check()
        except AssertionError as exc:
            ok = False
            print(f"FAIL {name}: {exc}")
        else:
            if verbose:
                print(f"PASS {name}")
    return ok
