"""Command-line interface: output formats, exit codes, determinism.

Runs the installed module in a subprocess so argument parsing, environment
handling, and file writing are all exercised the way a user sees them.
"""

import csv
import json
import math
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "multiport_lab"]


def run(*args, env_extra=None, cwd=None):
    import os

    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CMD + list(args), capture_output=True, text=True, env=env, cwd=cwd
    )


def test_no_arguments_is_an_error():
    res = run()
    assert res.returncode == 1


def test_smatrix_unit_transmission_point():
    res = run("smatrix", "--device", "grover-michelson", "--phi1", "pi", "--phi2", "pi")
    assert res.returncode == 0
    lines = res.stdout.splitlines()
    assert lines[0].startswith("ports:")
    assert "unitarity deviation:" in res.stdout
    # |t| = 1 at (pi, pi): off-diagonal entry has real part 1
    row = lines[1].split()
    assert float(row[0]) == pytest.approx(0.0, abs=1e-12)
    assert float(row[2]) == pytest.approx(1.0, abs=1e-12)


def test_smatrix_seal_at_pi_prints_grover3(tmp_path):
    net = {
        "devices": [{"id": "g", "kind": "grover(4)"}],
        "seals": [{"device": "g", "port": "p4", "phase": "pi"}],
    }
    path = tmp_path / "seal.json"
    path.write_text(json.dumps(net))
    res = run("smatrix", "--device", str(path))
    assert res.returncode == 0
    values = [float(v) for v in res.stdout.splitlines()[1].split()]
    # first row of the 3-port coin: -1/3 then 2/3, imaginary parts zero
    assert values[0] == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert values[2] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert values[1] == pytest.approx(0.0, abs=1e-12)


def test_sweep_csv_shape_and_endpoint(tmp_path):
    out = tmp_path / "sweep.csv"
    res = run(
        "sweep",
        "--device", "grover-michelson",
        "--phi2", "pi/2",
        "--phi1-grid", "0:2*pi:33",
        "--out", str(out),
    )
    assert res.returncode == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["phi1", "R", "T", "dT_dphi1"]
    assert len(rows) == 34
    first = [float(v) for v in rows[1]]
    assert first[0] == 0.0
    assert first[2] == pytest.approx(0.0, abs=1e-15)  # T(0) = 0
    for row in rows[1:]:
        r, t = float(row[1]), float(row[2])
        assert r + t == pytest.approx(1.0, abs=1e-10)


def test_sweep_and_sensitivity_are_deterministic(tmp_path):
    args = [
        "sweep",
        "--device", "grover-michelson",
        "--phi2", "pi/8",
        "--phi1-grid", "0:2*pi:65",
    ]
    a = run(*args, "--out", str(tmp_path / "a.csv"))
    b = run(*args, "--out", str(tmp_path / "b.csv"))
    assert a.returncode == b.returncode == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    sens_args = ["sensitivity", "--phi2-grid", "1e-4:2*pi-1e-4:8"]
    c = run(*sens_args, "--out", str(tmp_path / "c.csv"))
    d = run(*sens_args, "--out", str(tmp_path / "d.csv"))
    assert c.returncode == d.returncode == 0
    assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "d.csv").read_bytes()


def test_sweep_to_stdout():
    res = run(
        "sweep", "--device", "michelson", "--phi2", "0", "--phi1-grid", "0:pi:3"
    )
    assert res.returncode == 0
    lines = res.stdout.strip().splitlines()
    assert lines[0] == "phi1,R,T,dT_dphi1"
    assert len(lines) == 4


def test_sweep_svg_written(tmp_path):
    svg = tmp_path / "curve.svg"
    res = run(
        "sweep",
        "--device", "michelson",
        "--phi2", "0",
        "--phi1-grid", "0:2*pi:17",
        "--svg", str(svg),
    )
    assert res.returncode == 0
    body = svg.read_text()
    assert body.startswith("<svg")
    assert "polyline" in body


def test_sensitivity_csv_dominance(tmp_path):
    out = tmp_path / "sens.csv"
    res = run("sensitivity", "--phi2-grid", "1e-4:2*pi-1e-4:12", "--out", str(out))
    assert res.returncode == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["phi2", "max_slope_gm", "max_slope_michelson", "argmax_phi1"]
    assert len(rows) == 13
    for row in rows[1:]:
        gm, mich = float(row[1]), float(row[2])
        assert gm > mich
        assert mich == pytest.approx(0.5, abs=1e-9)


def test_sensitivity_linear_spacing(tmp_path):
    out = tmp_path / "lin.csv"
    res = run(
        "sensitivity",
        "--phi2-grid", "1:4:4",
        "--spacing", "linear",
        "--out", str(out),
    )
    assert res.returncode == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    phi2 = [float(r[0]) for r in rows[1:]]
    assert phi2 == pytest.approx([1.0, 2.0, 3.0, 4.0])


def test_bias_report_and_perturbations():
    res = run(
        "bias",
        "--device", "grover-michelson",
        "--phi2", "pi/8",
        "--target", "0.5",
        "--delta", "0.01,1.5",
    )
    assert res.returncode == 0
    out = res.stdout
    assert "phi1 = " in out and "slope = " in out
    table = out[out.index("delta,dT,saturated"):].strip().splitlines()
    assert len(table) == 3
    first = table[1].split(",")
    assert first[2] == "false"
    assert table[2].split(",")[2] == "true"


def test_degrees_flag_converts_inputs():
    res = run(
        "sweep",
        "--device", "michelson",
        "--phi2", "90",
        "--degrees",
        "--phi1-grid", "0:180:3",
    )
    assert res.returncode == 0
    rows = list(csv.reader(res.stdout.strip().splitlines()))
    # grid values come back in radians
    assert float(rows[2][0]) == pytest.approx(math.pi / 2)
    assert float(rows[2][2]) == pytest.approx(0.0, abs=1e-12)  # T(pi/2, pi/2) = 0


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"devices": [')
    res = run("smatrix", "--device", str(bad))
    assert res.returncode == 1
    assert "error:" in res.stderr
    assert "line" in res.stderr


def test_validation_error_exit_code(tmp_path):
    bad = tmp_path / "twice.json"
    bad.write_text(
        json.dumps(
            {
                "devices": [{"id": "g", "kind": "grover(4)"}],
                "seals": [
                    {"device": "g", "port": "p3", "phase": 0},
                    {"device": "g", "port": "p3", "phase": 1},
                ],
            }
        )
    )
    res = run("smatrix", "--device", str(bad))
    assert res.returncode == 1


def test_singular_closure_exit_code(tmp_path):
    trapped = tmp_path / "trapped.json"
    trapped.write_text(
        json.dumps(
            {
                "devices": [{"id": "g", "kind": "grover(4)"}],
                "seals": [
                    {"device": "g", "port": "p1", "phase": 0},
                    {"device": "g", "port": "p2", "phase": 0},
                    {"device": "g", "port": "p3", "phase": 0},
                ],
            }
        )
    )
    res = run("smatrix", "--device", str(trapped))
    assert res.returncode == 2
    assert "singular" in res.stderr.lower()


def test_unreachable_target_exit_code():
    res = run("bias", "--device", "michelson", "--phi2", "0", "--target", "2.0")
    assert res.returncode == 3


def test_bad_angle_expression_exit_code():
    res = run("smatrix", "--device", "michelson", "--phi1", "pi/")
    assert res.returncode == 1


def test_tolerance_env_override(tmp_path):
    # a matrix this far from unitary passes only when the tolerance is loose
    net = {
        "devices": [{"id": "m", "kind": "matrix", "matrix": [[0.999999]]}],
    }
    path = tmp_path / "near.json"
    path.write_text(json.dumps(net))
    strict = run("smatrix", "--device", str(path))
    assert strict.returncode == 1
    loose = run("smatrix", "--device", str(path), env_extra={"MULTIPORT_LAB_TOL": "1e-2"})
    assert loose.returncode == 0


def test_fusion_builtin_prints_coin(tmp_path):
    res = run("smatrix", "--device", "fusion")
    assert res.returncode == 0
    values = [float(v) for v in res.stdout.splitlines()[1].split()]
    assert values[0] == pytest.approx(-0.5, abs=1e-12)
    assert values[2] == pytest.approx(0.5, abs=1e-12)
