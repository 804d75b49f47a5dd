import json

import numpy as np
import pytest

from sworlab.cli import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    load_config_file,
    run,
)


def read_report(out_dir):
    return json.loads((out_dir / "report.json").read_text())


class TestConfigFile:
    def test_parsing(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text(
            "# a comment\n"
            "n = 40\n"
            "sigma2=0.1  # trailing comment\n"
            "t-grid = 1,2\n"
            "full-grid = true\n"
        )
        cfg = load_config_file(path)
        assert cfg == {"n": 40, "sigma2": 0.1, "t_grid": "1,2", "full_grid": True}

    def test_bad_line(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("just some words\n")
        with pytest.raises(ValueError):
            load_config_file(path)

    def test_unknown_key_exits_2(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("bogus-key = 7\n")
        code = run(
            ["compare-exponents", "--config", str(path), "--out", str(tmp_path / "o")]
        )
        assert code == EXIT_CONFIG_ERROR

    def test_missing_file_exits_2(self, tmp_path):
        code = run(
            [
                "compare-exponents",
                "--config",
                str(tmp_path / "nope"),
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == EXIT_CONFIG_ERROR

    def test_flag_overrides_file(self, tmp_path):
        path = tmp_path / "cfg"
        path.write_text("n = 40\nm = 20\n")
        out = tmp_path / "o"
        code = run(
            [
                "compare-exponents",
                "--config",
                str(path),
                "--m",
                "10",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        report = read_report(out)
        assert report["config"]["n"] == 40
        assert report["config"]["m"] == 10


class TestCompareExponents:
    def test_default_run(self, tmp_path):
        out = tmp_path / "o"
        assert run(["compare-exponents", "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report["experiment"] == "compare-exponents"
        assert "exponents" in report["results"]
        assert report["passed"] is True

    def test_invalid_geometry_exits_2(self, tmp_path):
        code = run(
            ["compare-exponents", "--n", "10", "--m", "20", "--out", str(tmp_path / "o")]
        )
        assert code == EXIT_CONFIG_ERROR


class TestOracleCheck:
    def test_passes_and_reports(self, tmp_path):
        out = tmp_path / "o"
        code = run(
            ["oracle-check", "--n-max", "5", "--classes", "5", "--out", str(out)]
        )
        assert code == EXIT_OK
        results = read_report(out)["results"]
        assert results["n_cases"] > 0
        assert all(case["ok"] for case in results["cases"])


class TestVerifyBounds:
    def test_small_run_writes_curves(self, tmp_path):
        out = tmp_path / "o"
        code = run(
            [
                "verify-bounds",
                "--n",
                "20",
                "--m",
                "10",
                "--sigma2",
                "0.25",
                "--trials",
                "4000",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        assert (out / "curves.csv").exists()
        lines = (out / "curves.csv").read_text().strip().splitlines()
        assert lines[0] == "config_index,center,eps,estimate,upper_ci,lower_ci"
        assert len(lines) > 1

    def test_corrupt_thm1_fails(self, tmp_path):
        out = tmp_path / "o"
        code = run(
            [
                "verify-bounds",
                "--n",
                "20",
                "--m",
                "10",
                "--sigma2",
                "0.25",
                "--trials",
                "20000",
                "--corrupt-thm1",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_CHECK_FAILED
        assert read_report(out)["passed"] is False


class TestTransductiveErm:
    def test_small_run(self, tmp_path):
        out = tmp_path / "o"
        code = run(
            [
                "transductive-erm",
                "--n",
                "10",
                "--m",
                "5",
                "--hypotheses",
                "3",
                "--splits",
                "500",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        report = read_report(out)
        assert report["results"]["provenance"]["sup_expectation"] == "exact"

    def test_loss_csv_input(self, tmp_path):
        table = np.random.default_rng(0).uniform(size=(3, 8))
        csv = tmp_path / "loss.csv"
        np.savetxt(csv, table, delimiter=",")
        out = tmp_path / "o"
        code = run(
            [
                "transductive-erm",
                "--loss-csv",
                str(csv),
                "--m",
                "4",
                "--splits",
                "300",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK


class TestLocalize:
    def test_small_run(self, tmp_path):
        out = tmp_path / "o"
        code = run(
            [
                "localize",
                "--n",
                "10",
                "--m",
                "5",
                "--hypotheses",
                "3",
                "--splits",
                "400",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        results = read_report(out)["results"]
        assert results["B"] >= 0
        assert "bounds" in results


class TestKernelBound:
    def test_default_run(self, tmp_path):
        out = tmp_path / "o"
        code = run(["kernel-bound", "--n", "12", "--k", "6", "--out", str(out)])
        assert code == EXIT_OK
        results = read_report(out)["results"]
        assert results["tailsum_bound"] > 0
        assert len(results["eigenvalues"]) == 12

    def test_gram_csv_export(self, tmp_path):
        out = tmp_path / "o"
        gram_path = tmp_path / "gram.csv"
        code = run(
            [
                "kernel-bound",
                "--n",
                "6",
                "--kernel",
                "delta",
                "--gram-csv",
                str(gram_path),
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        gram = np.loadtxt(gram_path, delimiter=",")
        assert np.allclose(gram, np.eye(6) / 6)

    def test_bad_kernel_exits_2(self, tmp_path):
        code = run(
            ["kernel-bound", "--kernel", "bogus", "--out", str(tmp_path / "o")]
        )
        assert code == EXIT_CONFIG_ERROR


class TestDeterminism:
    def test_same_seed_byte_identical_results(self, tmp_path):
        payloads = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = run(
                [
                    "verify-bounds",
                    "--n",
                    "20",
                    "--m",
                    "10",
                    "--trials",
                    "3000",
                    "--seed",
                    "7",
                    "--out",
                    str(out),
                ]
            )
            assert code == EXIT_OK
            report = json.loads((out / "report.json").read_text())
            payloads.append(json.dumps(report["results"], sort_keys=True))
        assert payloads[0] == payloads[1]

    def test_different_seed_changes_results(self, tmp_path):
        payloads = []
        for seed in ("3", "4"):
            out = tmp_path / seed
            run(
                [
                    "transductive-erm",
                    "--n",
                    "10",
                    "--m",
                    "5",
                    "--splits",
                    "200",
                    "--seed",
                    seed,
                    "--out",
                    str(out),
                ]
            )
            report = json.loads((out / "report.json").read_text())
            payloads.append(json.dumps(report["results"], sort_keys=True))
        assert payloads[0] != payloads[1]
