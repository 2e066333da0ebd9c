import json
import math

from jrr.cli import main
from jrr.datasets import synthesize


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestSearchParams:
    def test_json_payload(self, capsys):
        code, out = run(
            ["search-params", "--epsilon", "0.5", "--n", "1000", "--m-max", "3", "--n1", "100"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["found"] is True
        assert 0.5 < payload["p"] < math.exp(0.5) / (1 + math.exp(0.5))
        assert set(payload["effective_epsilon"]) == {"0", "1", "2", "3"}
        assert payload["var_closed"] > 0

    def test_not_found_exit_code(self, capsys):
        code, out = run(["search-params", "--epsilon", "0.00001", "--n", "100"], capsys)
        assert code == 1
        assert json.loads(out) == {"found": False}


class TestPerturbAndEstimate:
    def test_round_trip(self, tmp_path, capsys):
        data = tmp_path / "cohort.bits"
        data.write_text("".join(f"{v}\n" for v in synthesize(600, 90, seed=1)))
        reports = tmp_path / "reports.bits"
        code = main([
            "perturb", "--mechanism", "jrr", "--dataset", str(data),
            "--epsilon", "0.8", "--m-max", "2", "--seed", "5", "--out", str(reports),
        ])
        assert code == 0
        lines = reports.read_text().splitlines()
        assert len(lines) == 600
        assert set(lines) <= {"0", "1"}

        code, out = run(
            ["estimate", "--reports", str(reports), "--p", "0.6"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["n"] == 600
        assert payload["counts"]["0"] + payload["counts"]["1"] == 600
        assert payload["estimates"]["0"] + payload["estimates"]["1"] == pytest_approx(600)

    def test_rr_mechanism(self, capsys):
        code, out = run(
            ["perturb", "--mechanism", "rr", "--n", "50", "--n1", "10",
             "--epsilon", "1.0", "--seed", "3"],
            capsys,
        )
        assert code == 0
        assert len(out.splitlines()) == 50


class TestSimulate:
    def test_csv_schema_and_determinism(self, tmp_path):
        args = [
            "simulate", "--mechanism", "both", "--n", "300", "--ratio", "0.2",
            "--trials", "25", "--seed", "11", "--epsilon", "0.9", "--m-max", "2",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        header = a.read_text().splitlines()[0]
        assert header == (
            "mechanism,n,n1,epsilon,m_max,p,rho,trials,seed,"
            "mse,are,var_closed,are_p10,are_p50,are_p90,ri"
        )
        assert (tmp_path / "a.csv.json").exists()

    def test_sweep_ratio_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "simulate", "--mechanism", "rr", "--n", "200", "--trials", "5",
            "--seed", "0", "--epsilon", "1.0", "--sweep-ratio", "0:1:0.25",
            "--out", str(out),
        ])
        assert code == 0
        rows = out.read_text().splitlines()[1:]
        assert len(rows) == 5  # ratios 0, 0.25, 0.5, 0.75, 1


class TestOracle:
    def test_moment_dump(self, capsys):
        code, out = run(
            ["oracle", "--n", "4", "--n1", "2", "--p", "0.7", "--rho", "-0.3"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["estimator_moments"]["mean"] == pytest_approx(2.0)
        assert payload["estimator_moments"]["variance"] == pytest_approx(
            payload["closed_form"]["variance"]
        )
        assert payload["num_pairings"] == 3
        assert len(payload["support"]) == 16

    def test_explicit_values_single_pairing(self, capsys):
        code, out = run(
            ["oracle", "--values", "1,1", "--p", "0.8", "--rho", "-0.1875",
             "--pairing", "adjacent"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        support = {tuple(o): pr for o, pr in payload["support"]}
        assert support[(1, 1)] == pytest_approx(0.61)


class TestDatasets:
    def test_summarize(self, tmp_path, capsys):
        f = tmp_path / "d.bits"
        f.write_text("1\n1\n0\n1\n")
        code, out = run(["datasets", "summarize", "--dataset", str(f)], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["n"] == 4 and payload["n1"] == 3
        assert payload["ratio"] == pytest_approx(0.75)

    def test_error_exit_code(self, tmp_path, capsys):
        code = main(["datasets", "summarize", "--dataset", str(tmp_path / "missing.bits")])
        assert code == 2


def pytest_approx(x, tol=1e-9):
    import pytest

    return pytest.approx(x, abs=tol)
