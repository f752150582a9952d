import json

import numpy as np
import pytest

import specparity as sp
from specparity.cli import main


def run_cli(args):
    return main([str(a) for a in args])


def test_solve_harmonic_prints_ground_energy(tmp_path, capsys):
    code = run_cli(
        ["solve", "--potential", "harmonic", "--xmin", -8, "--xmax", 8, "--n", 799, "--out", tmp_path]
    )
    assert code == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("E[")]
    assert len(lines) == 10
    e0 = float(lines[0].split("=")[1])
    assert abs(e0 - 1.0) <= 1e-3
    body = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert body[0] == "n,E"
    assert len(body) == 800
    k, e = body[1].split(",")
    assert k == "0" and float(e) == pytest.approx(e0, abs=1e-9)


def test_solve_polynomial_prints_ascending_energies(tmp_path, capsys):
    code = run_cli(
        ["solve", "--poly", "0,0,0,1,1", "--xmin", -10, "--xmax", 10, "--n", 299, "--out", tmp_path]
    )
    assert code == 0
    values = [
        float(l.split("=")[1]) for l in capsys.readouterr().out.splitlines() if l.startswith("E[")
    ]
    assert len(values) == 10
    assert all(a < b for a, b in zip(values, values[1:]))


def test_solve_save_modes(tmp_path):
    code = run_cli(
        ["solve", "--potential", "harmonic", "--xmin", -6, "--xmax", 6, "--n", 49,
         "--out", tmp_path, "--save-modes"]
    )
    assert code == 0
    lines = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert lines[0].startswith("n,E,phi_0")
    assert len(lines[1].split(",")) == 51


def test_solve_rejects_tiny_grid(tmp_path, capsys):
    code = run_cli(
        ["solve", "--potential", "harmonic", "--xmin", -8, "--xmax", 8, "--n", 1, "--out", tmp_path]
    )
    assert code == 2


def test_usage_error_exits_2(tmp_path):
    assert run_cli(["solve", "--no-such-flag"]) == 2
    assert run_cli(["frobnicate"]) == 2
    assert run_cli(["solve", "--xmin", -8, "--xmax", 8, "--n", 99, "--out", tmp_path]) == 2
    base = ["solve", "--potential", "harmonic", "--xmin", -8, "--xmax", 8, "--n", 49, "--out", tmp_path]
    assert run_cli(base + ["--jobs", 0]) == 2
    assert run_cli(base + ["--truncate", "0"]) == 2
    assert run_cli(base + ["--truncate", "some"]) == 2
    assert run_cli(base + ["--poly", "0,0,1"]) == 2  # both potential flags


def test_truncate_full_keyword(tmp_path):
    code = run_cli(
        ["export-kernel", "--potential", "harmonic", "--xmin", -8, "--xmax", 8,
         "--n", 49, "--truncate", "full", "--out", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "kernel_P.csv").read_text().splitlines()
    kernel = np.array([[float(tok) for tok in line.split(",")] for line in lines[1:]])
    sv = np.linalg.svd(kernel, compute_uv=False)
    assert sv[-1] > 1e-8 * sv[0]  # full-rank kernel


def test_console_script_is_installed():
    import shutil
    import subprocess

    exe = shutil.which("specparity")
    assert exe, "console script not on PATH (install the package first)"
    out = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "solve" in out.stdout and "export-kernel" in out.stdout


def test_verify_quartic_cubic_writes_passing_report(tmp_path, capsys):
    code = run_cli(
        ["verify", "--potential", "quartic_cubic", "--xmin", -10, "--xmax", 10, "--n", 199, "--out", tmp_path]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "overall: PASS" in out
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["pass"] is True
    assert doc["potential"] == {"named": "quartic_cubic"}
    assert all(entry["pass"] for entry in doc["checks"])


def test_verify_harmonic_reports_reflection_pass(tmp_path):
    code = run_cli(
        ["verify", "--potential", "harmonic", "--xmin", -8, "--xmax", 8, "--n", 199, "--out", tmp_path]
    )
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    refl = next(e for e in doc["checks"] if e["name"] == "reflection_reduction")
    assert refl["applicable"] is True
    assert refl["pass"] is True
    assert refl["residual"] <= 1e-6


def test_verify_unreachable_tolerance_exits_1(tmp_path, capsys):
    code = run_cli(
        ["verify", "--potential", "harmonic", "--xmin", -8, "--xmax", 8, "--n", 99,
         "--out", tmp_path, "--tol", "parity_involution=1e-20"]
    )
    assert code == 1
    assert "FAIL" in capsys.readouterr().out
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["pass"] is False


def test_verify_rejects_unknown_tolerance(tmp_path):
    code = run_cli(
        ["verify", "--potential", "harmonic", "--xmin", -8, "--xmax", 8, "--n", 99,
         "--out", tmp_path, "--tol", "bogus=1e-3"]
    )
    assert code == 2


def test_verify_reports_are_reproducible(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        assert run_cli(
            ["verify", "--potential", "quartic_cubic", "--xmin", -10, "--xmax", 10,
             "--n", 199, "--out", out]
        ) == 0

    def stable(path):
        doc = json.loads(path.read_text())
        for entry in doc["checks"]:
            entry.pop("seconds")  # documented-unstable field
        return json.dumps(doc, sort_keys=True)

    assert stable(out_a / "report.json") == stable(out_b / "report.json")


def test_verify_omega_branch_flag(tmp_path):
    code = run_cli(
        ["verify", "--potential", "quartic_cubic", "--xmin", -10, "--xmax", 10,
         "--n", 199, "--out", tmp_path, "--omega-branch", "-"]
    )
    assert code == 0


def test_config_file_with_flag_override(tmp_path):
    cfg = {
        "potential": {"poly": [0, 0, 0, 1, 1]},
        "grid": {"x_min": -10, "x_max": 10, "n": 199},
        "suite": {"omega_branch": "+", "tolerances": {"reflection_reduction": 1e-5}},
        "out": str(tmp_path / "from_file"),
    }
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg))
    assert run_cli(["verify", "--config", cfg_path]) == 0
    doc = json.loads((tmp_path / "from_file" / "report.json").read_text())
    assert doc["grid"]["n"] == 199
    # flag overrides the file's n
    assert run_cli(["verify", "--config", cfg_path, "--n", 299, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["grid"]["n"] == 299
    assert doc["potential"] == {"poly": [0.0, 0.0, 0.0, 1.0, 1.0]}


def test_config_file_must_be_valid(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(["verify", "--config", bad]) == 2
    missing = tmp_path / "missing.json"
    assert run_cli(["verify", "--config", missing]) == 2


def test_sweep_harmonic_observed_order(tmp_path, capsys):
    code = run_cli(
        ["sweep", "--potential", "harmonic", "--xmin", -8, "--xmax", 8,
         "--sweep-n", "199,399,799", "--out", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    assert [r["n"] for r in rows] == ["199", "399", "799"]
    for row in rows[1:]:
        assert 1.8 <= float(row["order0"]) <= 2.2
    assert rows[0]["order0"] == ""
    # reflection residual is recorded for the even potential
    for row in rows:
        assert float(row["reflection_residual"]) <= 1e-6


def test_sweep_quartic_cubic_order_via_h_values(tmp_path):
    code = run_cli(
        ["sweep", "--potential", "quartic_cubic", "--xmin", -10, "--xmax", 10,
         "--sweep-h", "0.1,0.05,0.025", "--out", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    assert [r["n"] for r in rows] == ["199", "399", "799"]
    for row in rows[1:]:
        assert 1.8 <= float(row["order0"]) <= 2.2
    assert rows[0]["reflection_residual"] == ""


def test_sweep_records_truncated_kernel_residual(tmp_path):
    code = run_cli(
        ["sweep", "--potential", "harmonic", "--xmin", -8, "--xmax", 8,
         "--sweep-n", "99,199,399", "--truncate", "40", "--out", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    for row in rows:
        assert row["trunc_m"] == "40"
        assert float(row["trunc_residual"]) > 1e-3  # 40-mode kernel is far from J


def test_sweep_without_a_2to1_pair_falls_back_to_finest(tmp_path, capsys):
    code = run_cli(
        ["sweep", "--potential", "harmonic", "--xmin", -8, "--xmax", 8,
         "--sweep-n", "149,249,349", "--out", tmp_path]
    )
    assert code == 0
    assert "finest-grid reference" in capsys.readouterr().out
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    assert float(rows[-1]["err0"]) == 0.0  # finest grid is its own reference
    assert rows[-1]["order0"] == ""


def test_sweep_requires_three_points(tmp_path):
    code = run_cli(
        ["sweep", "--potential", "harmonic", "--xmin", -8, "--xmax", 8,
         "--sweep-n", "199,399", "--out", tmp_path]
    )
    assert code == 2


def test_sweep_parallel_output_matches_serial(tmp_path):
    for label, jobs in (("serial", 1), ("parallel", 3)):
        assert run_cli(
            ["sweep", "--potential", "quartic_cubic", "--xmin", -10, "--xmax", 10,
             "--sweep-n", "99,199,399", "--jobs", jobs, "--out", tmp_path / label]
        ) == 0
    assert (tmp_path / "serial" / "sweep.csv").read_bytes() == (
        tmp_path / "parallel" / "sweep.csv"
    ).read_bytes()


def test_export_kernel_harmonic_matches_reflection(tmp_path):
    code = run_cli(
        ["export-kernel", "--potential", "harmonic", "--xmin", -8, "--xmax", 8,
         "--n", 199, "--out", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "kernel_P.csv").read_text().splitlines()
    grid = sp.make_grid(-8, 8, 199)
    header = np.array([float(tok) for tok in lines[0].split(",")])
    np.testing.assert_array_equal(header, grid.points)
    kernel = np.array([[float(tok) for tok in line.split(",")] for line in lines[1:]])
    action = kernel * grid.h
    assert np.abs(action - np.eye(199)[::-1]).max() <= 1e-6


def test_export_kernel_is_symmetric_for_quartic_cubic(tmp_path):
    code = run_cli(
        ["export-kernel", "--potential", "quartic_cubic", "--xmin", -10, "--xmax", 10,
         "--n", 199, "--out", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "kernel_P.csv").read_text().splitlines()
    kernel = np.array([[float(tok) for tok in line.split(",")] for line in lines[1:]])
    assert np.abs(kernel - kernel.T).max() <= 1e-11 / sp.make_grid(-10, 10, 199).h


def test_export_truncated_kernel_has_numerical_rank_m(tmp_path):
    code = run_cli(
        ["export-kernel", "--potential", "harmonic", "--xmin", -8, "--xmax", 8,
         "--n", 199, "--truncate", 50, "--out", tmp_path]
    )
    assert code == 0
    lines = (tmp_path / "kernel_P.csv").read_text().splitlines()
    kernel = np.array([[float(tok) for tok in line.split(",")] for line in lines[1:]])
    sv = np.linalg.svd(kernel, compute_uv=False)
    assert sv[50] <= 1e-8 * sv[0]


def test_export_both_kernels_txt_matches_csv(tmp_path):
    code = run_cli(
        ["export-kernel", "--potential", "quartic_cubic", "--xmin", -10, "--xmax", 10,
         "--n", 49, "--kernels", "P,Q", "--out", tmp_path]
    )
    assert code == 0
    q_lines = (tmp_path / "kernel_Q.csv").read_text().splitlines()
    q_csv = np.array([[complex(tok) for tok in line.split(",")] for line in q_lines[1:]])
    q_txt = np.array(
        [
            [complex(tok) for tok in line.split()]
            for line in (tmp_path / "kernel_Q.txt").read_text().splitlines()
        ]
    )
    np.testing.assert_array_equal(q_csv, q_txt)
    cube = np.linalg.matrix_power(q_csv * sp.make_grid(-10, 10, 49).h, 3)
    assert np.abs(cube - np.eye(49)).max() <= 1e-10
