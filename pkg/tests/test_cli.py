import csv
import json
import math
import subprocess
import sys

import pytest

from securetas.cli import main, parse_configs, parse_grid
from securetas.channel import AntennaConfig


def run_json(capsys, *argv):
    assert main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def test_parse_grid():
    assert parse_grid("1,2.5") == [1.0, 2.5]
    assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]


def test_parse_configs():
    assert parse_configs("4x1x2, 1X1X1") == [AntennaConfig(4, 1, 2), AntennaConfig(1, 1, 1)]


class TestMetrics:
    def test_single_antenna(self, capsys):
        out = run_json(capsys, "metrics", "--snr-b-db", "10", "--rb", "2", "--rs", "1", "--mu", "3")
        row = out["results"][0]
        assert row["p_suc"] == pytest.approx(math.exp(-0.3), abs=1e-12)
        assert row["t_s"] == pytest.approx(math.exp(-0.3), abs=1e-12)
        assert out["inputs"]["rb"] == 2.0 and out["inputs"]["snr_b_db"] == 10.0
        assert out["units"]["rates"] == "bits/s/Hz"

    def test_threshold_below_minimum(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["metrics", "--rb", "2", "--rs", "1", "--mu", "2"])
        assert exc.value.code != 0
        assert "mu must be >= 2**r_b - 1" in capsys.readouterr().err

    def test_missing_rates(self, capsys):
        with pytest.raises(SystemExit):
            main(["metrics"])


@pytest.mark.parametrize("command", ["validate", "reconstruct"])
def test_stochastic_needs_seed(command, capsys):
    with pytest.raises(SystemExit) as exc:
        main([command])
    assert exc.value.code == 2
    assert "--seed is required" in capsys.readouterr().err


def test_optimize_reports_both_ceilings(capsys):
    out = run_json(capsys, "optimize", "--na", "4", "--nb", "2", "--ne", "2", "--sigma", "0.9", "--epsilon", "0.1")
    row = out["results"][0]
    assert row["feasible"] and row["binding"] in {"interior", "qos-ceiling"}
    assert row["r_b_max_exact"] <= row["r_b_max_closed_form"]
    assert row["feedback_bits"] == 2


def test_optimize_infeasible_row(capsys):
    out = run_json(capsys, "optimize", "--ne", "4", "--snr-b-db", "0", "--sigma", "0.99", "--epsilon", "0.01")
    row = out["results"][0]
    assert row["binding"] == "infeasible" and row["t_s_star"] == 0.0
    assert row["residual"] is None


def test_tradeoff_corners(capsys):
    out = run_json(capsys, "tradeoff", "--na", "4", "--ne", "2", "--rho-db-grid", "0,5", "--epsilon-grid", "0.2")
    rows = {(r["rho_db"], r["epsilon"]): r for r in out["results"]}
    assert rows[(5.0, 0.2)]["sigma_bound"] == pytest.approx(0.860, abs=0.01)


def test_tradeoff_default_surface(capsys):
    out = run_json(capsys, "tradeoff")
    assert len(out["results"]) == 31 * 30


def test_sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    code = main(["sweep", "--na", "4", "--nb", "2", "--ne", "2", "--axis", "epsilon",
                 "--grid", "0.05:0.3:6", "--format", "csv", "--output", str(path)])
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "# command=sweep"
    assert any(line == "# axis=epsilon" for line in lines)
    rows = list(csv.DictReader(line for line in lines if not line.startswith("#")))
    assert len(rows) == 6
    t = [float(r["t_s_star"]) for r in rows]
    assert t == sorted(t)


def test_sweep_configs(capsys):
    out = run_json(capsys, "sweep", "--axis", "config", "--grid", "4x1x2,4x2x2", "--epsilon", "0.1")
    assert [r["value"] for r in out["results"]] == ["4x1x2", "4x2x2"]


def test_refuses_to_overwrite(tmp_path, capsys):
    path = tmp_path / "existing.json"
    path.write_text("keep me")
    assert main(["tradeoff", "--output", str(path)]) == 1
    assert path.read_text() == "keep me"


def test_validate_small(capsys):
    out = run_json(capsys, "validate", "--na", "4", "--nb", "2", "--ne", "2", "--seed", "5",
                   "--samples", "200000", "--sigma", "0.9", "--epsilon", "0.2")
    by_metric = {r["metric"]: r for r in out["results"]}
    assert by_metric["legit_cdf_max_deviation"]["abs_diff"] < 0.01
    assert by_metric["p_so"]["closed_form"] == pytest.approx(0.2, abs=1e-9)
    assert out["inputs"]["policy_source"] == "optimize"


def test_reconstruct_from_csv(tmp_path, capsys):
    data = tmp_path / "house.csv"
    data.write_text("".join(f"{i},{100 + 50 * (i % 7)}\n" for i in range(96)))
    per_trial = tmp_path / "trials.csv"
    out = run_json(capsys, "reconstruct", "--na", "4", "--nb", "2", "--ne", "2", "--seed", "1",
                   "--trials", "50", "--input", str(data), "--per-trial", str(per_trial),
                   "--epsilon", "0.2")
    roles = [r["role"] for r in out["results"]]
    assert roles == ["bob", "eve"]
    assert out["results"][0]["profile"] == "house"
    assert len(per_trial.read_text().splitlines()) == 101


def test_reconstruct_bad_csv(tmp_path, capsys):
    data = tmp_path / "bad.csv"
    data.write_text("0,1\n0,2\n")
    assert main(["reconstruct", "--seed", "1", "--input", str(data)]) == 1
    assert "increase" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "securetas.cli", "tradeoff", "--rho-db-grid", "5", "--epsilon-grid", "0.2"],
        capture_output=True, text=True, check=True,
    )
    row = json.loads(proc.stdout)["results"][0]
    assert row["sigma_bound"] == pytest.approx(0.2 ** (1 / 10**0.5), abs=1e-12)
