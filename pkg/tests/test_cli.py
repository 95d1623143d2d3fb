import json
import subprocess
import sys

import pytest

from berkline.cli import main

P = "5"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.mark.parametrize(
    "poly, p, segments, ord0",
    [
        ("T^2 - 3*T", "3", [["1/1", 1]], 1),
        ("T^2 - 5", "5", [["1/2", 2]], 0),
        ("(T-1)*(T-5)*(T-25)", "5", [["2/1", 1], ["1/1", 1], ["0/1", 1]], 0),
    ],
)
def test_newton(capsys, poly, p, segments, ord0):
    code, rep, _ = run(capsys, "newton", "--poly", poly, "--p", p)
    assert code == 0
    assert rep["segments"] == segments and rep["ord0"] == ord0


def test_newton_accepts_coefficient_list(capsys):
    code, rep, _ = run(capsys, "newton", "--poly", '["0", "-5", "1"]')
    assert code == 0 and rep["poly"] == ["0/1", "-5/1", "1/1"]


@pytest.mark.parametrize(
    "poly, at, profile",
    [
        ("T^2 - 5*T", "0", [["inf", 1, "1/1"], ["1/1", 2, "0/1"]]),
        ("T^2", "0", [["inf", 2, "0/1"]]),
        ("T^2", "1", [["inf", 1, "0/1"], ["0/1", 2, "0/1"]]),
    ],
)
def test_profile(capsys, poly, at, profile):
    code, rep, _ = run(capsys, "profile", "--poly", poly, "--at", at, "--eval", "2", "--eval", "1/2")
    assert code == 0 and rep["profile"] == profile


def test_profile_with_divisor_and_normalize(capsys):
    code, rep, _ = run(capsys, "profile", "--poly", "T^2 - 5*T", "--at", "10", "--divisor", "0,-25/4,inf")
    assert code == 0
    assert rep["retraction_radius"] == "1/1"
    assert rep["normalized"] == [["inf", 1, "0/1"]]
    code, rep, _ = run(capsys, "profile", "--poly", "T^2 - 5*T", "--at", "0", "--normalize", "1/2")
    assert rep["normalized"] == [["inf", 1, "1/2"], ["1/2", 2, "0/1"]]
    assert "values" not in rep


def test_skeleton_worked_example(capsys, tmp_path):
    dot = tmp_path / "sk.dot"
    code, rep, _ = run(capsys, "skeleton", "--poly", "T^2 - 5*T", "--seed-divisor", "0", "--dot", str(dot))
    assert code == 0
    assert sorted(rep["edge_slopes"]) == [1, 1, 2, 2]
    assert rep["divisor"] == ["inf", ["-25/4", "inf"], ["0/1", "inf"]]
    text = dot.read_text()
    assert text.count("graph ") == 2 and "slope 2" in text


@pytest.mark.parametrize("poly, divisor, slopes", [("T", "0,1,inf", [1, 1, 1]), ("T^2", "0,inf", [2])])
def test_skeleton_trivial_examples(capsys, poly, divisor, slopes):
    code, rep, _ = run(capsys, "skeleton", "--poly", poly, "--divisor", divisor)
    assert code == 0 and rep["edge_slopes"] == slopes


def test_verify_single_map_exit_codes(capsys):
    code, rep, _ = run(capsys, "verify", "--poly", "T^2 - 5*T", "--seed-divisor", "0", "--trials", "200")
    assert code == 0 and rep["status"] == "pass"
    code, rep, _ = run(capsys, "verify", "--poly", "T^2 - 5*T", "--divisor", "0,inf", "--trials", "200",
                       "--allow-inadmissible")
    assert code == 1 and rep["status"] == "fail"
    assert rep["items"][0]["radiality"]["fail"] > 0
    code, rep, err = run(capsys, "verify", "--poly", "T^2 - 5*T", "--divisor", "0,inf")
    assert code == 2 and rep is None and "InadmissibleDivisor" in err


def test_verify_corpus_with_negative_controls(capsys, tmp_path):
    out = tmp_path / "v.json"
    code, _, _ = run(capsys, "verify", "--corpus-size", "3", "--trials", "100", "--negative-controls",
                     "--json", str(out))
    rep = json.loads(out.read_text())
    assert code == 0 and rep["status"] == "pass" and len(rep["items"]) == 3
    neg = rep["canonical_negative_control"]
    assert neg["fired"]
    assert neg["pair"]["T_x"] == [["inf", 2, "0/1"]]
    assert neg["pair"]["T_y"] == [["inf", 1, "1/1"], ["1/1", 2, "0/1"]]


def test_family_command(capsys, tmp_path):
    spec = {"schema": 1, "p": 5, "coefficients": [["0"], ["0", "-1"], ["1"]],
            "samples": ["5", "10", "15", "25", "50"], "divisor": "auto", "seed_divisor": ["0"]}
    path = tmp_path / "fam.json"
    path.write_text(json.dumps(spec))
    code, rep, _ = run(capsys, "family", "--spec", str(path))
    assert code == 0
    assert [c["samples"] for c in rep["classes"]] == [["5/1", "10/1", "15/1"], ["25/1", "50/1"]]
    spec["samples"] = ["7"]
    path.write_text(json.dumps(spec))
    _, rep, _ = run(capsys, "family", "--spec", str(path))
    assert len(rep["classes"]) == 1


def test_family_degenerate_is_a_warning(capsys, tmp_path):
    spec = {"schema": 1, "p": 5, "coefficients": [["0"], ["1"], ["0", "1"]], "samples": ["0", "1", "5"],
            "seed_divisor": ["0"]}
    path = tmp_path / "deg.json"
    path.write_text(json.dumps(spec))
    code, rep, _ = run(capsys, "family", "--spec", str(path))
    assert code == 0
    assert rep["errors"] == [{"sample": "0/1", "error": "DegenerateAt", "severity": "warning",
                              "message": "degenerate at s=0: deg f_s = 1 instead of 2"}]


def test_job_files(capsys, tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"schema": 1, "command": "profile", "p": 5, "poly": "T^2 - 5*T", "at": "5/2"}))
    code, rep, _ = run(capsys, "profile", "--job", str(job))
    assert code == 0 and rep["profile"] == [["inf", 2, "0/1"]]
    code, rep, _ = run(capsys, "profile", "--job", str(job), "--at", "0")
    assert rep["profile"] == [["inf", 1, "1/1"], ["1/1", 2, "0/1"]]  # explicit flags win
    job.write_text(json.dumps({"schema": 1, "poly": "T", "unknown": True}))
    code, _, err = run(capsys, "newton", "--job", str(job))
    assert code == 2 and "unknown" in err
    job.write_text(json.dumps({"schema": 2, "poly": "T"}))
    code, _, _ = run(capsys, "newton", "--job", str(job))
    assert code == 2
    job.write_text(json.dumps({"poly": "T"}))
    code, _, err = run(capsys, "newton", "--job", str(job))
    assert code == 2 and "schema" in err


def test_input_errors(capsys):
    assert run(capsys, "newton", "--poly", "x + y")[0] == 2
    assert run(capsys, "newton", "--poly", "3")[0] == 2
    assert run(capsys, "newton", "--poly", "T", "--p", "6")[0] == 2
    assert run(capsys, "profile", "--poly", "T")[0] == 2


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        main(["verify", "--corpus-size", "2", "--trials", "50", "--seed", "7", "--json", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "berkline", "newton", "--poly", "T^2 - 5*T"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["root_valuations"] == ["inf", "1/1"]
