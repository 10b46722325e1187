import json

import pytest

from curvecurrents.cli import main
from curvecurrents.config import load_config, parse_curve_arg


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    records = [json.loads(line) for line in out.splitlines() if line]
    return code, records


def test_curve_arg_parsing():
    spec = parse_curve_arg("cusp:2,3")
    assert spec.r == 2 and spec.s == 3
    spec = parse_curve_arg("map:t^3,t^7+t^8")
    assert spec.kind == "map"
    assert parse_curve_arg("disc:0.5").ball_radius == 0.5
    with pytest.raises(ValueError):
        parse_curve_arg("torus:1")


def test_residue_command(capsys):
    code, recs = run_cli(capsys, "residue", "--m", "1", "--psi", "1")
    assert code == 0
    rec = recs[0]
    assert rec["command"] == "residue"
    assert rec["value_im"] == pytest.approx(6.283185307, abs=1e-6)
    assert rec["value_re"] == pytest.approx(0.0, abs=1e-8)
    assert len(rec["trace"]) == 8


def test_residue_conj_expression(capsys):
    code, recs = run_cli(capsys, "residue", "--m", "2", "--psi", "conj(t)")
    assert code == 0
    assert abs(complex(recs[0]["value_re"], recs[0]["value_im"])) < 1e-8


def test_kernel_eval(capsys):
    code, recs = run_cli(capsys, "kernel", "eval", "--curve", "cusp:2,3",
                         "--tau", "2", "--t", "1")
    assert code == 0
    assert recs[0]["value_re"] == pytest.approx(0.75)
    assert recs[0]["conditioning"]["closed_form"][0] == pytest.approx(0.75)


def test_koppelman_command(capsys, tmp_path):
    out = tmp_path / "resid.csv"
    code, recs = run_cli(capsys, "koppelman", "--curve", "cusp:2,3",
                         "--targets", "6", "--out", str(out),
                         "--format", "csv")
    assert code == 0
    assert all(r["verdict"] == "pass" for r in recs)
    header = out.read_text().splitlines()[0]
    assert header == "t_re,t_im,value_re,value_im,error"
    assert len(out.read_text().splitlines()) == 1 + 2 * 6


def test_obstruction_command(capsys):
    code, recs = run_cli(
        capsys, "obstruction", "--curve", "map:t^3,t^7+t^8",
        "--mu", "3*(conj(t)^9+conj(t)^10)", "--order", "12")
    assert code == 0
    assert recs[0]["verdict"] == "infeasible"
    assert recs[0]["result"]["smooth_solvability"] == "impossible"
    assert recs[0]["result"]["certificate"]


def test_obstruction_positive_control(capsys):
    code, recs = run_cli(capsys, "obstruction", "--curve", "map:t^2,t^3",
                         "--mu", "2*conj(t)", "--order", "4")
    assert code == 0
    assert recs[0]["verdict"] == "feasible"
    assert "('mono', 0, 1, 0, 0)" in recs[0]["result"]["witness"]


def test_membership_command(capsys):
    code, recs = run_cli(capsys, "membership", "--curve", "cusp:2,3",
                         "--u", "conj(t)^3")
    assert code == 0
    assert recs[0]["verdict"] == "pass"
    code, recs = run_cli(capsys, "membership", "--curve", "cusp:2,3",
                         "--u", "1", "--pole", "2")
    assert code == 0
    assert recs[0]["verdict"] == "fail"


def test_solve_dbar_command(capsys):
    code, recs = run_cli(capsys, "solve-dbar", "--curve", "cusp:2,3",
                         "--mu", "3*conj(t)^2")
    assert code == 0
    rec = recs[0]
    assert rec["verdict"] == "pass"
    assert rec["params"]["membership_after"]


def test_validation_exit_code(capsys):
    code = main(["koppelman", "--curve", "cusp:2,4"])
    assert code == 1
    err = capsys.readouterr().err
    assert "gcd" in err


def test_config_file_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[curve]\nkind = cusp\nr = 2\ns = 3\nball_radius = 1.0\n"
        "[regularization]\ndelta_max = 0.1\nratio = 0.5\ncount = 6\n"
        "extrapolation_order = 2\n"
        "[quadrature]\nradial_points = 12\nangular_points = 64\ntol = 1e-7\n"
        "[output]\nformat = json\n"
    )
    loaded = load_config(str(cfg))
    assert loaded.curve.r == 2 and loaded.count == 6
    code, recs = run_cli(capsys, "residue", "--config", str(cfg),
                         "--m", "1", "--psi", "1", "--count", "7")
    assert code == 0
    assert len(recs[0]["trace"]) == 7


def test_reproduce_command(capsys):
    code, recs = run_cli(capsys, "reproduce", "--curve", "cusp:2,3",
                         "--targets", "4")
    assert code == 0
    assert all(r["verdict"] == "pass" for r in recs)
    routes = {r["params"]["route"] for r in recs}
    assert routes == {"projection", "boundary"}


def test_rerun_byte_identical(capsys):
    code1 = main(["residue", "--m", "3", "--psi", "t^2"])
    out1 = capsys.readouterr().out
    code2 = main(["residue", "--m", "3", "--psi", "t^2"])
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1 == out2
