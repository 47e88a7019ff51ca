"""The command-line surface: subcommands, exit codes, file formats, determinism."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from minmodlab.cli import (
    EXIT_BUDGET,
    EXIT_CHECK_FAILED,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    build_operator,
    main,
    read_dense_operator,
    write_dense_operator,
)
from minmodlab.constructions import deflation_operator
from minmodlab.linops import materialize


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- paper-check -------------------------------------------------------------


def test_paper_check_passes_and_reports_every_section(capsys):
    code, out, err = run_cli(capsys, "paper-check")
    assert code == EXIT_OK
    assert "# result=pass" in out
    assert "min-modulus-closed-form[10],pass,512/1023,512/1023" in out
    assert "weak-null-basis-family,pass" in out
    assert err == ""


def test_paper_check_fault_injection_fails_loudly(capsys):
    code, out, err = run_cli(capsys, "paper-check", "--inject-fault", "corrupt-f")
    assert code == EXIT_CHECK_FAILED
    assert "# result=fail" in out
    assert "functional-dual-norm[2],fail" in out
    assert "check(s) failed" in err
    assert "functional-dual-norm[2]" in err


def test_paper_check_rejects_unknown_faults(capsys):
    code, _, err = run_cli(capsys, "paper-check", "--inject-fault", "corrupt-everything")
    assert code == EXIT_USAGE
    assert "unknown fault" in err


def test_paper_check_needs_a_real_range(capsys):
    code, _, _ = run_cli(capsys, "paper-check", "--n-max", "1")
    assert code == EXIT_USAGE


# --- minmod ------------------------------------------------------------------


def test_minmod_on_the_deflation(capsys):
    code, out, _ = run_cli(capsys, "minmod", "paper-t", "2")
    assert code == EXIT_OK
    assert "# value=2/3" in out
    assert "# witness=1 2/3" in out
    assert "# facet=1" in out
    lines = out.strip().splitlines()
    assert lines[-2:] == ["1,2/3", "2,1"]


def test_minmod_on_the_identity(capsys):
    code, out, _ = run_cli(capsys, "minmod", "identity", "7")
    assert code == EXIT_OK
    assert "# value=1" in out


def test_minmod_mirror_check_agrees(capsys):
    code_plain, out_plain, _ = run_cli(capsys, "minmod", "paper-t", "3")
    code_checked, out_checked, _ = run_cli(capsys, "minmod", "paper-t", "3", "--mirror-check")
    assert code_plain == code_checked == EXIT_OK
    # the extra verification changes nothing about the report
    assert out_plain == out_checked


def test_minmod_diagonal_spec(capsys):
    code, out, _ = run_cli(capsys, "minmod", "diagonal:2,3", "2")
    assert code == EXIT_OK
    assert "# value=2" in out
    assert out.strip().splitlines()[-2:] == ["1,2", "2,3"]


def test_minmod_is_byte_identical_across_runs(capsys):
    _, first, _ = run_cli(capsys, "minmod", "paper-t", "4")
    _, second, _ = run_cli(capsys, "minmod", "paper-t", "4")
    assert first == second


def test_unknown_spec_is_a_usage_error(capsys):
    code, _, err = run_cli(capsys, "minmod", "paper-q", "3")
    assert code == EXIT_USAGE
    assert "unknown operator spec" in err


def test_diagonal_spec_validation(capsys):
    code, _, err = run_cli(capsys, "minmod", "diagonal:1,2,3", "2")
    assert code == EXIT_USAGE
    assert "expected 2" in err
    code, _, err = run_cli(capsys, "minmod", "diagonal:1,oops", "2")
    assert code == EXIT_USAGE


# --- matrix files --------------------------------------------------------------


def test_matrix_file_round_trip(tmp_path, capsys):
    path = tmp_path / "t3.mat"
    write_dense_operator(deflation_operator(3), path)
    assert read_dense_operator(path).entries == materialize(deflation_operator(3)).entries

    code, out, _ = run_cli(capsys, "minmod", str(path), "3")
    assert code == EXIT_OK
    assert "# value=4/7" in out


def test_matrix_file_dimension_mismatch(tmp_path, capsys):
    path = tmp_path / "t3.mat"
    write_dense_operator(deflation_operator(3), path)
    code, _, err = run_cli(capsys, "minmod", str(path), "4")
    assert code == EXIT_USAGE
    assert "3-dimensional" in err


def test_malformed_matrix_file(tmp_path, capsys):
    path = tmp_path / "bad.mat"
    path.write_text("2\n1 0\n0.5 1\n", encoding="utf-8")
    code, _, err = run_cli(capsys, "minmod", str(path), "2")
    assert code == EXIT_IO
    assert "row 2" in err

    path.write_text("2\n1 0\n", encoding="utf-8")
    code, _, _ = run_cli(capsys, "minmod", str(path), "2")
    assert code == EXIT_IO


def test_missing_matrix_file(capsys):
    code, _, err = run_cli(capsys, "minmod", "no/such/file.mat", "2")
    assert code == EXIT_IO
    assert "error" in err


def test_build_operator_direct(tmp_path):
    assert materialize(build_operator("direct-sum", 4)).entries == (
        materialize(build_operator("paper-t", 4)).entries
    )
    assert build_operator("identity", 2).dim == 2


# --- converge ------------------------------------------------------------------


def test_converge_reports_the_frozen_values(capsys):
    code, out, err = run_cli(capsys, "converge", "2", "5")
    assert code == EXIT_OK
    assert err == ""
    assert "5,16/31,16/31," in out
    assert "# partial=false" in out


def test_converge_budget_exit(capsys):
    code, out, err = run_cli(capsys, "converge", "2", "9", "--lp-budget", "4")
    assert code == EXIT_BUDGET
    assert "# partial=true" in out
    assert "4,8/15" in out
    assert "budget" in err


def test_converge_bad_range(capsys):
    code, _, _ = run_cli(capsys, "converge", "1", "5")
    assert code == EXIT_USAGE
    code, _, _ = run_cli(capsys, "converge", "5", "2")
    assert code == EXIT_USAGE


# --- oracle --------------------------------------------------------------------


def test_oracle_on_the_identity(capsys):
    code, out, _ = run_cli(capsys, "oracle", "identity", "3", "1/4")
    assert code == EXIT_OK
    assert "# upper=1" in out
    assert "# lower=1" in out
    assert out.strip().splitlines()[-2:] == ["upper,1", "lower,1"]


def test_oracle_budget_exit(capsys):
    code, _, err = run_cli(capsys, "oracle", "paper-t", "4", "1/200", "--point-budget", "10")
    assert code == EXIT_BUDGET
    assert "budget" in err


def test_oracle_rejects_non_rational_resolution(capsys):
    code, _, err = run_cli(capsys, "oracle", "identity", "2", "0.005")
    assert code == EXIT_USAGE
    assert "exact rational" in err
    code, _, _ = run_cli(capsys, "oracle", "identity", "2", "0")
    assert code == EXIT_USAGE


# --- perturb -------------------------------------------------------------------


def test_perturb_reports_the_gain(capsys):
    code, out, _ = run_cli(capsys, "perturb", "6")
    assert code == EXIT_OK
    assert "# m_T=32/63" in out
    assert "# m_TK=1" in out
    assert "# gain=31/63" in out


def test_perturb_needs_a_tail(capsys):
    code, _, _ = run_cli(capsys, "perturb", "1")
    assert code == EXIT_USAGE


# --- search --------------------------------------------------------------------


def test_search_is_deterministic_end_to_end(capsys):
    args = ("search", "2", "--seed", "3", "--iterations", "8")
    code, first, _ = run_cli(capsys, *args)
    assert code == EXIT_OK
    assert "# config.seed=3" in first
    assert "# base_value=2/3" in first
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_search_requires_a_seed(capsys):
    code, _, _ = run_cli(capsys, "search", "2")
    assert code == EXIT_USAGE


# --- shared emission options -----------------------------------------------------


def test_out_writes_the_report_to_a_file(tmp_path, capsys):
    out_path = tmp_path / "report.csv"
    code, out, _ = run_cli(capsys, "minmod", "paper-t", "2", "--out", str(out_path))
    assert code == EXIT_OK
    assert out == ""
    text = out_path.read_text(encoding="utf-8")
    assert "# value=2/3" in text


def test_out_to_an_unwritable_path_is_an_io_error(tmp_path, capsys):
    code, _, err = run_cli(capsys, "minmod", "paper-t", "2", "--out", str(tmp_path))
    assert code == EXIT_IO
    assert "error" in err


def test_json_format(capsys):
    code, out, _ = run_cli(capsys, "minmod", "paper-t", "2", "--format", "json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["schema_version"] == 1
    assert payload["kind"] == "minmod"
    assert payload["header"]["value"] == "2/3"
    assert payload["rows"][0] == [1, "2/3"]


def test_approx_columns(capsys):
    code, out, _ = run_cli(capsys, "minmod", "paper-t", "2", "--approx")
    assert code == EXIT_OK
    assert "facet_value_approx12" in out
    assert "0.666666666667" in out


def test_timestamp_is_opt_in(capsys):
    _, plain, _ = run_cli(capsys, "minmod", "paper-t", "2")
    assert "generated_at" not in plain
    _, stamped, _ = run_cli(capsys, "minmod", "paper-t", "2", "--timestamp")
    assert "generated_at" in stamped


def test_argparse_usage_errors(capsys):
    assert run_cli(capsys, )[0] == EXIT_USAGE
    assert run_cli(capsys, "no-such-command")[0] == EXIT_USAGE
    assert run_cli(capsys, "minmod", "paper-t", "two")[0] == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    assert run_cli(capsys, "--help")[0] == EXIT_OK


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "minmodlab", "minmod", "paper-t", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK
    assert "# value=2/3" in proc.stdout
