import csv
import io
import math
from pathlib import Path

import numpy as np
import pytest

from gpbatch import cli, env
from gpbatch.conf import FixedBeta, GrowingLog, Theoretical
from gpbatch.errors import ConfigurationError
from gpbatch.harness import config as hconf
from gpbatch.harness import load_config, parse_config, run_experiment
from gpbatch.harness.runner import RAW_HEADER, SUMMARY_HEADER
from gpbatch.schedule import Kind

SMALL = """
# small two-policy run
run.T = 40
run.trials = 2
run.base_seed = 3
env.function = single_peak
env.per_axis = 12
policy.1.name = bpe-orig
policy.1.variant = bpe
policy.2.name = ucb
policy.2.variant = gp-ucb
"""


def _config(text=SMALL, out=None):
    c = parse_config(text)
    if out is not None:
        from dataclasses import replace
        c = replace(c, output_dir=out)
    return c


class TestParse:
    def test_defaults(self):
        c = _config()
        assert c.T == 40 and c.trials == 2 and c.base_seed == 3
        assert c.env.function == "single_peak" and c.env.hi == 4.0
        p1, p2 = c.policies
        assert p1.schedule.lengths == (7, 17, 16) and p1.schedule.kind is Kind.ORIG_BPE
        assert p1.confidence.mode == FixedBeta(2.0) and p2.confidence.mode == FixedBeta(2.0)
        assert p1.confidence.regulariser == pytest.approx(0.02 ** 2)

    @pytest.mark.parametrize("text, mode", [
        ("theoretical", Theoretical()),
        ("2.5", FixedBeta(2.5)),
        ("fixed:6", FixedBeta(6.0)),
        ("log", GrowingLog()),
        ("log:1.5, 4", GrowingLog(1.5, 4.0)),
    ])
    def test_parse_beta(self, text, mode):
        assert hconf.parse_beta(text) == mode

    @pytest.mark.parametrize("text", ["log:1", "high", "fixed:"])
    def test_bad_beta(self, text):
        with pytest.raises(ConfigurationError):
            hconf.parse_beta(text)

    def test_multi_peak_default_beta(self):
        c = _config(SMALL.replace("single_peak", "multi_peak"))
        assert c.policies[0].confidence.mode == FixedBeta(6.0)

    def test_constant_b_schedule(self):
        c = _config("run.T = 1000\npolicy.1.schedule = const-se\npolicy.1.B = 4\n")
        assert c.policies[0].schedule.lengths == (21, 131, 328, 520)
        c = _config("run.T = 1000\npolicy.1.schedule = const-se\npolicy.1.B = 3\n"
                    "policy.1.normalize = false\n")
        assert c.policies[0].schedule.lengths == (272, 648, 80)

    def test_fixed(self):
        c = _config("run.T = 10\npolicy.1.variant = bpe-fixed\npolicy.1.B = 3\n")
        assert c.policies[0].schedule.lengths == (4, 3, 3)

    @pytest.mark.parametrize("text, fragment", [
        ("run.horizon = 3", "unknown key"),
        ("policy.1.colour = red", "unknown key"),
        ("env.function = wiggly\npolicy.1.variant = bpe", "env.function"),
        ("run.T = many", "run.T"),
        ("just words", "key = value"),
        ("policy.1.variant = gp-ucb\npolicy.1.B = 3", "gp-ucb"),
        ("policy.1.variant = bpe-fixed\npolicy.1.schedule = orig", "fixed"),
        ("policy.1.normalize = maybe\npolicy.1.schedule = const-se\npolicy.1.B = 3",
         "normalize"),
        ("run.trials = 0\npolicy.1.variant = bpe", "trials"),
        ("policy.1.name = a\npolicy.2.name = a", "unique"),
        ("env.kernel = matern\npolicy.1.variant = bpe", "nu"),
        ("", "policy"),
    ])
    def test_errors(self, text, fragment):
        with pytest.raises(ConfigurationError, match=fragment):
            parse_config(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="nope.cfg"):
            load_config(tmp_path / "nope.cfg")


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestRunner:
    def test_outputs(self, tmp_path):
        c = _config(out=tmp_path)
        result, records = run_experiment(c)
        raw = _read(tmp_path / "raw.csv")
        assert raw[0] == RAW_HEADER
        assert (tmp_path / "raw.csv").read_text().splitlines()[0] == \
            "trial,policy,t,batch,point_index,y,regret,cum_regret"
        assert len(raw) == c.trials * len(c.policies) * c.T + 1
        summary = _read(tmp_path / "summary.csv")
        assert summary[0] == SUMMARY_HEADER and len(summary) == len(c.policies) * c.T + 1
        sched = (tmp_path / "schedule.txt").read_text().splitlines()
        assert sched == ["bpe-orig: 7,17,16", "ucb: " + ",".join(["1"] * 40)]

    def test_summary_recomputable_from_raw(self, tmp_path):
        c = _config(out=tmp_path)
        run_experiment(c)
        raw = _read(tmp_path / "raw.csv")[1:]
        for row in _read(tmp_path / "summary.csv")[1:]:
            name, t = row[0], int(row[1])
            vals = np.array([float(r[7]) for r in raw if r[1] == name and int(r[2]) == t])
            assert len(vals) == c.trials
            assert float(row[2]) == pytest.approx(vals.mean(), abs=1e-12)
            assert float(row[3]) == pytest.approx(0.5 * vals.std(), abs=1e-12)

    def test_raw_rows_consistent(self, tmp_path):
        c = _config(out=tmp_path)
        _, records = run_experiment(c)
        e = c.env.build(c.base_seed)
        rows = [r for r in _read(tmp_path / "raw.csv")[1:] if r[0] == "0" and r[1] == "bpe-orig"]
        cum = 0.0
        for r in rows:
            i = int(r[4])
            assert float(r[6]) == e.f_max - e.f_values[i]
            cum += float(r[6])
            assert float(r[7]) == pytest.approx(cum, abs=1e-12)
        assert [int(r[3]) for r in rows] == [1] * 7 + [2] * 17 + [3] * 16

    def test_byte_identical(self, tmp_path):
        run_experiment(_config(out=tmp_path / "a"))
        run_experiment(_config(out=tmp_path / "b"))
        for name in ("raw.csv", "summary.csv", "schedule.txt"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_parallel_matches_serial(self, tmp_path):
        run_experiment(_config(out=tmp_path / "a"))
        run_experiment(_config(SMALL + "run.jobs = 2\n", out=tmp_path / "b"))
        assert (tmp_path / "a/raw.csv").read_bytes() == (tmp_path / "b/raw.csv").read_bytes()

    def test_single_trial_single_step(self, tmp_path):
        c = _config("run.T = 1\nrun.trials = 1\nenv.per_axis = 10\n"
                    "policy.1.variant = bpe-fixed\npolicy.1.B = 1\n"
                    "policy.2.variant = gp-ucb\n", out=tmp_path)
        result, _ = run_experiment(c)
        assert len(_read(tmp_path / "raw.csv")) == 3
        for name in result.policies:
            assert result.half_std[name][-1] == 0.0

    def test_constant_function(self, tmp_path):
        c = _config("run.T = 30\nrun.trials = 3\nenv.function = constant\nenv.value = 0.4\n"
                    "env.per_axis = 8\npolicy.1.variant = bpe\npolicy.1.beta = 2\n"
                    "policy.2.variant = gp-ucb\npolicy.2.beta = 2\n", out=tmp_path)
        result, _ = run_experiment(c)
        for name in result.policies:
            assert np.all(result.mean_cum_regret[name] == 0.0)
            assert np.all(result.half_std[name] == 0.0)

    def test_rkhs_env(self):
        c = _config("run.T = 30\nenv.function = rkhs\nenv.d = 1\nenv.per_axis = 40\n"
                    "env.lengthscale = 0.2\nenv.hi = 1\npolicy.1.variant = bpe\n")
        e = c.env.build(5)
        assert e.rkhs_norm == pytest.approx(1.0)
        assert isinstance(c.policies[0].confidence.mode, Theoretical)


class TestEnvText:
    def test_round_trip(self):
        e = env.make_peaked_function(env.build_grid(2, 10, 0, 4), "multi_peak", 2)
        back = env.from_text(env.to_text(e))
        assert np.array_equal(back.domain, e.domain) and np.array_equal(back.f_values, e.f_values)
        assert back.rkhs_norm == e.rkhs_norm and back.per_axis == 10
        assert back.optimum_index == e.optimum_index

    def test_round_trip_without_metadata(self):
        e = env.constant_function(env.build_grid(1, 4), 1.5)
        assert env.to_text(env.from_text(env.to_text(e))) == env.to_text(e)


class TestCLI:
    def test_schedule(self, capsys):
        assert cli.main(["schedule", "--T", "1000", "--kind", "orig"]) == 0
        assert capsys.readouterr().out.strip() == "32,179,424,365"
        assert cli.main(["schedule", "--T", "1000", "--kind", "fixed", "--B", "4"]) == 0
        assert capsys.readouterr().out.strip() == "250,250,250,250"
        assert cli.main(["schedule", "--T", "1000", "--kind", "const-matern", "--nu", "1",
                         "--d", "2", "--B", "3"]) == 0
        assert capsys.readouterr().out.strip() == "194,720,86"

    def test_schedule_errors(self, capsys):
        assert cli.main(["schedule", "--T", "1000", "--kind", "const-matern", "--B", "3"]) == 2
        assert cli.main(["schedule", "--T", "1000", "--kind", "fixed"]) == 2
        assert cli.main(["schedule", "--kind", "orig"]) == 1
        assert cli.main(["schedule", "--T", "1000", "--kind", "weird"]) == 1
        assert cli.main([]) == 1

    def test_run(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(SMALL)
        assert cli.main(["run", "--config", str(cfg), "--output-dir", str(tmp_path / "o")]) == 0
        out = capsys.readouterr().out
        assert "bpe-orig" in out and "ucb" in out
        assert (tmp_path / "o" / "raw.csv").exists()

    def test_run_missing_config(self, tmp_path, capsys):
        assert cli.main(["run", "--config", str(tmp_path / "absent.cfg")]) == 2
        assert "absent.cfg" in capsys.readouterr().err

    def test_run_bad_config(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("run.speed = fast\n")
        assert cli.main(["run", "--config", str(cfg)]) == 2
        assert "run.speed" in capsys.readouterr().err

    def test_diag(self, capsys):
        assert cli.main(["diag", "--gamma", "--t", "1,2", "--per-axis", "6", "--lam", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split()[:3] == ["t", "greedy", "exhaustive"]
        assert float(lines[1].split()[1]) == pytest.approx(0.5 * math.log(2), abs=1e-6)
        assert lines[-1] == f"C1(lambda=1) = {8 / math.log(2):.6f}"

    def test_selftest(self, capsys):
        assert cli.main(["selftest"]) == 0
        assert "FAIL" not in capsys.readouterr().out
