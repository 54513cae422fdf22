import json

import numpy as np
import pytest
from click.testing import CliRunner

from perifront.cli import main
from perifront.config import (load_scenario, save_scenario, scenario_from_dict)


@pytest.fixture
def runner():
    return CliRunner()


def _scenario_dict(**over):
    data = {
        "name": "case",
        "problem": "coupled",
        "t_end": 12.0,
        "field_a": {"type": "constant", "value": 1.0, "period": 1.0},
        "field_b": {"type": "constant", "value": 1.0, "period": 1.0},
        "params": {"d1": 1.0, "d2": 1.0, "k": 0.5, "h": 0.5, "mu": 1.0,
                   "rho": 1.0, "s0": 4.0, "bc1": "dirichlet",
                   "bc2": "dirichlet"},
        "init": {"shape": "bump", "height": 0.5},
        "resolution": {"nx": 64, "nt": 64, "snapshot_every": 0},
    }
    data.update(over)
    return data


def _write_config(tmp_path, name="case.toml", **over):
    sc = scenario_from_dict(_scenario_dict(**over))
    path = tmp_path / name
    save_scenario(sc, path)
    return path


class TestEigen:
    def test_prints_unit_eigenvalue(self, runner, tmp_path):
        res = runner.invoke(main, ["--out", str(tmp_path), "eigen",
                                   "--ell", str(np.pi), "--nx", "64",
                                   "--nt", "64"])
        assert res.exit_code == 0, res.output
        lam = float(res.output.split("=")[1])
        assert abs(lam - 1.0) < 1e-2
        payload = json.loads((tmp_path / "eigen.json").read_text())
        assert abs(payload["lambda1"] - lam) < 1e-7  # echo is %.8g


class TestSimulate:
    def test_front_csv_strictly_increasing(self, runner, tmp_path):
        cfg = _write_config(tmp_path)
        res = runner.invoke(main, ["--out", str(tmp_path / "out"),
                                   "simulate", "--config", str(cfg)])
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "out" / "case.csv").read_text().splitlines()
        assert lines[0] == "t,s,sprime,sup_u,sup_v"
        s = [float(ln.split(",")[1]) for ln in lines[1:]]
        assert all(b > a for a, b in zip(s, s[1:]))

    def test_deterministic_output(self, runner, tmp_path):
        cfg = _write_config(tmp_path)
        for sub in ("o1", "o2"):
            res = runner.invoke(main, ["--out", str(tmp_path / sub),
                                       "simulate", "--config", str(cfg)])
            assert res.exit_code == 0, res.output
        b1 = (tmp_path / "o1" / "case.csv").read_bytes()
        b2 = (tmp_path / "o2" / "case.csv").read_bytes()
        assert b1 == b2

    def test_domain_error_reports_json(self, runner, tmp_path):
        cfg = _write_config(tmp_path, params={
            "d1": 1.0, "d2": 1.0, "k": 0.5, "h": 0.5, "mu": 1.0,
            "rho": 1.0, "s0": 4.0, "bc1": "neumann", "bc2": "neumann"})
        # bump initial data is incompatible with Neumann operators
        res = runner.invoke(main, ["--out", str(tmp_path / "out"),
                                   "simulate", "--config", str(cfg)])
        assert res.exit_code == 1
        err = res.output.strip().splitlines()[-1]
        payload = json.loads(err)
        assert payload["type"] == "ConfigError"


class TestClassify:
    def test_spreading_verdict(self, runner, tmp_path):
        cfg = _write_config(tmp_path)
        res = runner.invoke(main, ["--out", str(tmp_path / "out"),
                                   "classify", "--config", str(cfg)])
        assert res.exit_code == 0, res.output
        assert "verdict = spreading" in res.output
        payload = json.loads(
            (tmp_path / "out" / "case_classify.json").read_text())
        assert payload["report"]["verdict"] == "spreading"

    def test_sweep_single_cell_matches_classify(self, runner, tmp_path):
        cfg = _write_config(tmp_path)
        text = cfg.read_text() + "\n[sweep]\nmu = [1.0]\ns0 = [4.0]\n"
        sweep_cfg = tmp_path / "sweep.toml"
        sweep_cfg.write_text(text)
        res = runner.invoke(main, ["--out", str(tmp_path / "out"),
                                   "--workers", "1",
                                   "sweep", "--config", str(sweep_cfg)])
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "out" / "case_sweep.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[1].split(",")[2] == "spreading"


class TestConfigRoundTrip:
    @pytest.mark.parametrize("ext", ["toml", "json"])
    def test_save_load_identity(self, tmp_path, ext):
        sc = scenario_from_dict(_scenario_dict())
        path = tmp_path / f"case.{ext}"
        save_scenario(sc, path)
        again = load_scenario(path)
        assert again.to_dict() == sc.to_dict()

    def test_single_problem_requires_length(self):
        from perifront.errors import ConfigError
        with pytest.raises(ConfigError):
            scenario_from_dict(_scenario_dict(problem="single"))


class TestUsageErrors:
    def test_unknown_subcommand_exits_2(self, runner):
        res = runner.invoke(main, ["no-such-command"])
        assert res.exit_code == 2

    def test_missing_config_rejected(self, runner, tmp_path):
        res = runner.invoke(main, ["--out", str(tmp_path), "simulate",
                                   "--config", str(tmp_path / "nope.toml")])
        assert res.exit_code == 2
