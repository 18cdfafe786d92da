import json
import subprocess
import sys

import pytest

from selberg_delange.cli import main

SAMPLE_ARGS = ["sample", "--spec", "unit", "--x", "10", "--seed", "7", "--count", "5", "--no-cache"]
SAMPLE_GOLDEN = "9\n3\n5\n5\n1\n"


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# golden outputs (byte-exact, 15 significant digits)


def test_lambda0_golden(capsys):
    code, out, _ = run_cli(capsys, ["lambda0", "--spec", "theta_omega:2", "--no-cache"])
    assert code == 0
    assert out == (
        "lambda0 = 0.607927143040184\n"
        "tail_estimate = 1.15811861840867e-06\n"
        "prime_cutoff = 1000000\n"
        "k_cutoff = 48\n"
    )


def test_psi_golden(capsys):
    code, out, _ = run_cli(capsys, ["psi", "--spec", "unit", "--z", "0", "--no-cache"])
    assert code == 0
    assert out == "psi = 1\n"


def test_mgf_golden(capsys):
    code, out, _ = run_cli(
        capsys, ["mgf", "--spec", "unit", "--g", "omega", "--x", "10", "--y", "2", "--no-cache"]
    )
    assert code == 0
    assert out == "mgf = 2.3\n"


def test_pmf_golden_csv(capsys):
    code, out, _ = run_cli(capsys, ["pmf", "--spec", "unit", "--g", "omega", "--x", "10", "--no-cache"])
    assert code == 0
    assert out == "value,probability\n0,0.1\n1,0.7\n2,0.2\n"


def test_sample_golden(capsys):
    code, out, _ = run_cli(capsys, SAMPLE_ARGS)
    assert code == 0
    assert out == SAMPLE_GOLDEN


def test_sum_golden_single_and_grid(capsys):
    code, out, _ = run_cli(capsys, ["sum", "--spec", "theta_omega:2", "--x", "10", "--no-cache"])
    assert code == 0
    assert out == "sum = 23\n"
    code, out, _ = run_cli(capsys, ["sum", "--spec", "unit", "--x-grid", "10,100", "--no-cache"])
    assert code == 0
    assert out == "x,sum_re,sum_im\n10,10,0\n100,100,0\n"


def test_check_golden(capsys):
    code, out, _ = run_cli(capsys, ["check", "--spec", "geometric_B:1.9,c0=0.1", "--no-cache"])
    assert code == 0
    assert out == (
        "verdict = inconsistent\n"
        "c0 = 0.1\n"
        "witness = 2\n"
        "abscissa_estimate = 1.8\n"
        "increment_exponent = none\n"
    )


def test_repeat_runs_are_byte_identical(capsys):
    argv = ["psi", "--spec", "theta_omega:2", "--z", "0.5", "--cutoff", "2000", "--no-cache"]
    _, first, _ = run_cli(capsys, argv)
    _, second, _ = run_cli(capsys, argv)
    assert first == second
    assert first.startswith("psi = ")


# ---------------------------------------------------------------------------
# exit codes


def test_exit_code_bad_spec(capsys):
    code, out, err = run_cli(capsys, ["lambda0", "--spec", "nope", "--no-cache"])
    assert code == 2
    assert out == ""
    assert "unknown spec name" in err


def test_exit_code_numeric_failure(capsys):
    code, _, err = run_cli(capsys, ["lambda0", "--spec", "tabulated:2^1=1,C=1,r=2", "--no-cache"])
    assert code == 3
    assert "diverges" in err


def test_exit_code_strip_violation(capsys):
    code, _, err = run_cli(
        capsys,
        ["ldp", "--spec", "unit", "--g", "big_omega", "--x", "1000", "--s", "1.5", "--no-cache"],
    )
    assert code == 2
    assert "need 0 < s < 1.41421" in err


def test_exit_code_missing_x(capsys):
    code, _, err = run_cli(capsys, ["mgf", "--spec", "unit", "--g", "omega", "--y", "2", "--no-cache"])
    assert code == 2
    assert "--x" in err


def test_exit_code_report_rejects_csv(capsys):
    code, _, err = run_cli(capsys, ["report", "--spec", "unit", "--format", "csv", "--no-cache"])
    assert code == 2
    assert "json" in err


def test_unknown_command_exits_two(capsys):
    with pytest.raises(SystemExit) as exc_info:
        main(["frobnicate"])
    assert exc_info.value.code == 2


# ---------------------------------------------------------------------------
# output routing and formats


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    argv = [
        "pmf", "--spec", "unit", "--g", "omega", "--x", "10",
        "--output", str(target), "--no-cache",
    ]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    assert out == ""
    assert target.read_text() == "value,probability\n0,0.1\n1,0.7\n2,0.2\n"


def test_output_file_bad_path(capsys):
    argv = [
        "pmf", "--spec", "unit", "--g", "omega", "--x", "10",
        "--output", "/nonexistent-dir/out.csv", "--no-cache",
    ]
    code, _, err = run_cli(capsys, argv)
    assert code == 2
    assert err != ""


def test_pmf_json_format(capsys):
    code, out, _ = run_cli(
        capsys,
        ["pmf", "--spec", "unit", "--g", "omega", "--x", "10", "--format", "json", "--no-cache"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["x"] == 10
    assert doc["pmf"] == {"0": 0.1, "1": 0.7, "2": 0.2}
    assert doc["mean"] == pytest.approx(1.1)


def test_report_schema(capsys):
    argv = [
        "report", "--spec", "unit", "--g", "omega",
        "--x-grid", "1000,10000", "--z-grid", "circle:4",
        "--cutoff", "2000", "--y-grid", "0,1", "--s", "2", "--no-cache",
    ]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    doc = json.loads(out)
    assert sorted(doc) == ["clt", "config", "lambda0", "ldp", "psi_grid", "residual_table"]
    assert doc["config"]["spec"] == "unit"
    assert doc["config"]["x_grid"] == [1000, 10000]
    assert len(doc["config"]["z_grid"]) == 4
    assert len(doc["psi_grid"]) == 4
    assert set(doc["psi_grid"][0]) == {"z_re", "z_im", "psi_re", "psi_im"}
    assert [row["x"] for row in doc["residual_table"]] == [1000, 10000]
    assert all(row["max_abs_residual"] > 0 for row in doc["residual_table"])
    assert [row["x"] for row in doc["clt"]] == [1000, 10000]
    assert set(doc["ldp"][0]) == {"s", "h", "rate", "predicted_tail", "exact_tail", "ratio", "x"}
    assert doc["lambda0"]["value_re"] == pytest.approx(1.0, abs=1e-3)
    assert doc["lambda0"]["value_im"] == 0.0
    assert doc["lambda0"]["prime_cutoff"] == 2000


# ---------------------------------------------------------------------------
# sieve cache control


def test_cache_dir_env(tmp_path, monkeypatch, capsys):
    cache = tmp_path / "sieves"
    monkeypatch.setenv("SD_CACHE_DIR", str(cache))
    code, _, _ = run_cli(capsys, ["sum", "--spec", "unit", "--x", "1000"])
    assert code == 0
    assert (cache / "spf_1000.sdsieve").exists()


def test_no_cache_flag(tmp_path, monkeypatch, capsys):
    cache = tmp_path / "sieves"
    monkeypatch.setenv("SD_CACHE_DIR", str(cache))
    code, _, _ = run_cli(capsys, ["sum", "--spec", "unit", "--x", "1000", "--no-cache"])
    assert code == 0
    assert not cache.exists()


def test_cache_dir_flag_overrides_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SD_CACHE_DIR", str(tmp_path / "ignored"))
    chosen = tmp_path / "chosen"
    code, _, _ = run_cli(
        capsys, ["sum", "--spec", "unit", "--x", "1000", "--cache-dir", str(chosen)]
    )
    assert code == 0
    assert (chosen / "spf_1000.sdsieve").exists()
    assert not (tmp_path / "ignored").exists()


# ---------------------------------------------------------------------------
# module entry point


def test_module_invocation_subprocess():
    result = subprocess.run(
        [sys.executable, "-m", "selberg_delange.cli"] + SAMPLE_ARGS,
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert result.returncode == 0
    assert result.stdout == SAMPLE_GOLDEN
