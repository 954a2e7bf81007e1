import csv
import io
import json
import subprocess
import sys

import pytest

from bicardlab.cli import EXIT_FALSIFIED, EXIT_INPUT, EXIT_OK, main, resolve_jobs, InputError


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def json_lines(text):
    return [json.loads(l) for l in text.splitlines()]


def test_classify_lcp(capsys):
    code, out, _ = run_cli(capsys, "classify", "--catalog", "LCP", "--n", "4")
    assert code == EXIT_OK
    rows = json_lines(out)
    assert rows[-1]["summary"]["exit"] == 0
    labels = [p["profile"] for p in rows[0]["profiles"]]
    assert labels[2] == "ProperComplementation"


def test_sat_examples(capsys):
    code, out, _ = run_cli(capsys, "sat", "--catalog", "LCP", "--n", "2")
    assert code == EXIT_OK and json_lines(out)[0]["satisfiable"] is True
    code, out, _ = run_cli(capsys, "sat", "--catalog", "HP", "--n", "3")
    assert code == EXIT_OK and json_lines(out)[0]["satisfiable"] is False
    code, out, _ = run_cli(capsys, "sat", "--catalog", "BLV", "--n", "4", "--slice", "2", "--mode", "eq")
    assert code == EXIT_OK and json_lines(out)[0]["satisfiable"] is False


def test_relcat_cp(capsys):
    code, out, _ = run_cli(capsys, "relcat", "--catalog", "CP", "--n", "4")
    row = json_lines(out)[0]
    assert code == EXIT_OK and row["rc"] is False and row["ccoa"] is False and "witness" in row


def test_laws_ok_and_broken(capsys):
    code, out, _ = run_cli(capsys, "laws", "--samples", "500")
    assert code == EXIT_OK
    assert json_lines(out)[-1]["summary"]["laws_passed"] == 15
    code, out, _ = run_cli(capsys, "laws", "--samples", "500", "--broken")
    assert code == EXIT_FALSIFIED


def test_dsl_input(capsys):
    code, out, _ = run_cli(capsys, "classify", "--dsl", "sd = 0 or csd = 0", "--n", "4")
    assert code == EXIT_OK


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["classify", "--dsl", "a ++ b", "--n", "3"], "line 1, column 4"),
        (["classify", "--dsl", "b = 0", "--n", "3"], "not symmetric"),
        (["classify", "--dsl", "sd <= 1", "--n", "3"], "not transitive"),
        (["classify", "--catalog", "XYZ", "--n", "3"], "unknown catalog"),
        (["classify", "--catalog", "BLV"], "--n is required"),
        (["classify", "--catalog", "BLV", "--n", "40"], "--n must be"),
        (["survey", "--n", "7", "--exhaustive"], "--exhaustive"),
        (["classify", "--rel", "/nonexistent.rel", "--n", "3"], "no such file"),
        (["survey", "--n", "3", "--jobs", "zero"], "--jobs"),
    ],
)
def test_input_errors_exit_2(capsys, argv, needle):
    code, _, err = run_cli(capsys, *argv)
    assert code == EXIT_INPUT
    assert needle in err


def test_unknown_subcommand_exit_2(capsys):
    code, _, _ = run_cli(capsys, "frobnicate")
    assert code == EXIT_INPUT


def test_rel_file_quadruples(tmp_path, capsys):
    good = tmp_path / "lcp.rel"
    good.write_text("# complement pairing at n=3\n3 0 0 0\n2 0 0 1\n1 0 0 2\n0 0 0 3\n0 1 2 0\n0 2 1 0\n0 3 0 0\n0 0 3 0\n")
    code, out, _ = run_cli(capsys, "classify", "--rel", str(good), "--n", "3")
    assert code == EXIT_OK
    bad = tmp_path / "bad.rel"
    bad.write_text("4 0 0 0\n3 0 0 1\n2 0 0 2\n1 0 0 3\n0 0 0 4\n1 1 1 1\n")
    code, _, err = run_cli(capsys, "classify", "--rel", str(bad), "--n", "4")
    assert code == EXIT_INPUT and "not transitive" in err and "{0,1}" in err


def test_rel_file_dsl(tmp_path, capsys):
    f = tmp_path / "hp.rel"
    f.write_text("# name: hp\nx = y\n")
    code, out, _ = run_cli(capsys, "sat", "--rel", str(f), "--n", "3")
    assert code == EXIT_OK and json_lines(out)[0]["class_count"] == 4


def test_validate_dsl(capsys):
    code, out, _ = run_cli(capsys, "validate-dsl", "--dsl", "(b = c)", "--n", "4")
    assert code == EXIT_OK and json_lines(out)[0]["canonical"] == "b = c"


def test_csv_and_text_formats(capsys):
    code, out, _ = run_cli(capsys, "survey", "--n", "3", "--exhaustive", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 29
    code, out, _ = run_cli(capsys, "survey", "--n", "3", "--exhaustive", "--format", "text")
    assert out.splitlines()[-1].startswith("summary: command=survey")


def test_out_file(tmp_path, capsys):
    target = tmp_path / "r.jsonl"
    code, out, _ = run_cli(capsys, "sat", "--catalog", "NP", "--n", "5", "--out", str(target))
    assert code == EXIT_OK and out == ""
    assert json_lines(target.read_text())[0]["satisfiable"] is True


@pytest.mark.parametrize(
    "args",
    [["--n", "4", "--exhaustive"], ["--n", "5", "--sample", "300", "--seed", "3"], ["--n", "6", "--sample", "60"]],
)
def test_survey_identical_across_jobs(capsys, args):
    outputs = []
    for jobs in ("1", "4", "max"):
        code, out, _ = run_cli(capsys, "survey", *args, "--jobs", jobs)
        assert code == EXIT_OK
        outputs.append(out.encode())
    assert outputs[0] == outputs[1] == outputs[2]


def test_survey_counts(capsys):
    code, out, _ = run_cli(capsys, "survey", "--n", "4", "--exhaustive")
    summary = json_lines(out)[-1]["summary"]
    assert summary["relations"] == 150 and summary["violations"] == 0


def test_jobs_env(monkeypatch):
    monkeypatch.setenv("BICARDLAB_JOBS", "3")
    assert resolve_jobs(None) == 3
    assert resolve_jobs("2") == 2
    with pytest.raises(InputError):
        resolve_jobs("-1")


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "bicardlab", "sat", "--catalog", "TOTAL", "--n", "3"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout.splitlines()[0])["class_count"] == 1
