import csv

import pytest

from thermoplate.app import build_parser, main
from thermoplate.utils.config import OUTPUT_ENV


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_roots_command(tmp_path, capsys):
    assert main(["--output", str(tmp_path), "roots"]) == 0
    rows = _rows(tmp_path / "roots.csv")
    assert len(rows) == 1
    assert float(rows[0]["a2"]) == pytest.approx(1.3071, abs=1e-4)
    out = capsys.readouterr().out
    assert out.startswith("a0,a1,a2,alpha_plus,alpha_minus\n")
    assert str(tmp_path / "roots.csv") in out


def test_kernels_output_is_deterministic(tmp_path):
    args = ["kernels", "--t", "0,1.5,40", "--r", "0.01", "0.3,2"]
    assert main(["--output", str(tmp_path / "a")] + args) == 0
    assert main(["--output", str(tmp_path / "b")] + args) == 0
    first = (tmp_path / "a" / "kernels.csv").read_bytes()
    assert first == (tmp_path / "b" / "kernels.csv").read_bytes()
    assert len(first.decode().splitlines()) == 1 + 3 * 3


def test_kernels_at_origin(tmp_path):
    assert main(["--output", str(tmp_path), "kernels", "--t", "2", "--r", "0"]) == 0
    (row,) = _rows(tmp_path / "kernels.csv")
    assert (float(row["K0"]), float(row["K1"]), float(row["K2"])) == pytest.approx((1.0, 2.0, 2.0))
    assert [float(row[f"dtK{j}"]) for j in range(3)] == pytest.approx([0.0, 1.0, 2.0])
    assert [float(row[f"dt2K{j}"]) for j in range(3)] == pytest.approx([0.0, 0.0, 1.0])
    assert [float(row[f"u_mult{j}"]) for j in range(3)] == pytest.approx([1.0, 2.0, 0.0])
    assert [float(row[f"theta_mult{j}"]) for j in range(3)] == pytest.approx([0.0, 0.0, 1.0])


def test_profiles_command(tmp_path):
    assert main(["--output", str(tmp_path), "profiles", "--t", "0,1", "--r", "0.5"]) == 0
    rows = _rows(tmp_path / "profiles.csv")
    assert [float(rows[0][f"J{j}"]) for j in range(2)] == [0.0, 0.0]
    assert float(rows[1]["J1"]) != 0.0
    damped = ["u0_mult0", "u0_mult1", "dt_u0_mult0", "dt_u0_mult1", "uI1_mult0", "uI1_mult1"]
    assert [float(rows[0][key]) for key in damped] == pytest.approx([1.0, 0.0, 0.0, 1.0, 0.0, 0.0])
    assert float(rows[1]["uI1_mult0"]) != 0.0


def test_unknown_subcommand_exits_with_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum"])
    assert exc.value.code == 2
    assert "invalid choice" in capsys.readouterr().err


def test_missing_command(capsys):
    assert main([]) == 2
    assert "COMMAND or --config" in capsys.readouterr().err


def test_empty_time_grid_is_a_usage_error(tmp_path, capsys):
    code = main(["--output", str(tmp_path), "rates", "--n", "2", "--t-min", "1", "--t-max", "2", "--t-count", "0"])
    assert code == 2
    assert "t-grid" in capsys.readouterr().err
    assert not (tmp_path / "rates.csv").exists()


def test_bad_preset_is_a_usage_error(tmp_path, capsys):
    assert main(["--output", str(tmp_path), "rates", "--preset", "gausian"]) == 2
    assert "did you mean gaussian" in capsys.readouterr().err


def test_config_file_run(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"experiment = kernels\nt_values = 1\nr_values = 1\nmode = lagrange-sum\noutput_dir = {tmp_path}\n")
    assert main(["--config", str(cfg)]) == 0
    (row,) = _rows(tmp_path / "kernels.csv")
    assert row["mode"] == "lagrange-sum"


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("experiment = kernels\nmode = lagrange-sum\n")
    assert main(["--config", str(cfg), "--output", str(tmp_path), "kernels", "--mode", "stabilized"]) == 0
    rows = _rows(tmp_path / "kernels.csv")
    assert {row["mode"] for row in rows} == {"stabilized"}


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert main(["roots"]) == 0
    assert (tmp_path / "env" / "roots.csv").is_file()


def test_list_flags_accept_commas_and_spaces():
    args = build_parser().parse_args(["singular-limit", "--eps", "0.1,0.01", "0.001", "--n", "2,3"])
    assert args.eps_values == ["0.1,0.01", "0.001"]
    assert args.dimensions == ["2,3"]


def test_short_time_flag_is_not_a_global_prefix():
    args = build_parser().parse_args(["--tol", "1e-6", "kernels", "--t", "0,1", "--r", "0.5"])
    assert args.tol == 1e-6
    assert args.t_values == ["0,1"]
    args = build_parser().parse_args(["thermo1d", "--t", "2", "--r", "1"])
    assert args.t_values == ["2"]
    assert args.tol is None


def test_global_flags_need_full_names(capsys):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["--thr", "2", "roots"])
    assert exc.value.code == 2


def test_thermo1d_matches_coupled_system(tmp_path):
    assert main(["--output", str(tmp_path), "thermo1d", "--r", "0.5,1", "--t", "0,1,5"]) == 0
    rows = _rows(tmp_path / "thermo1d.csv")
    assert len(rows) == 6
    assert max(float(row["rel_err"]) for row in rows) <= 1e-7


def test_thermo1d_rejects_bad_coupling(tmp_path):
    assert main(["--output", str(tmp_path), "thermo1d", "--g1", "1", "--g2", "-1"]) == 2


def test_rates_command_on_short_grid(tmp_path):
    code = main(
        ["--output", str(tmp_path), "rates", "--n", "2", "--t-min", "16384", "--t-max", "262144", "--t-count", "5"]
    )
    assert code == 0
    (row,) = _rows(tmp_path / "rates.csv")
    assert float(row["fitted_exponent"]) == pytest.approx(0.5, abs=0.02)
    assert row["verdict"] == "growth"
    assert float(row["achieved_tol"]) <= 1e-8
    assert row["converged"] == "true"


def test_norms_command(tmp_path):
    grid = ["--t-min", "16384", "--t-max", "65536", "--t-count", "3"]
    assert main(["--output", str(tmp_path), "norms", "--n", "1,2"] + grid) == 0
    rows = _rows(tmp_path / "norms.csv")
    assert list(rows[0])[:4] == ["n", "t", "norm", "achieved_tol"]
    assert [(row["n"], float(row["t"])) for row in rows] == [
        (n, t) for n in ("1", "2") for t in (16384.0, 32768.0, 65536.0)
    ]
    assert all(float(row["achieved_tol"]) <= 1e-8 and row["converged"] == "true" for row in rows)


@pytest.mark.slow
def test_table1_command(tmp_path, capsys):
    assert main(["--output", str(tmp_path), "--threads", "2", "table1"]) == 0
    rows = _rows(tmp_path / "table1.csv")
    assert [row["verdict"] for row in rows] == ["growth", "bounded", "decay"]
    assert "critical (n = 4)" in capsys.readouterr().out


@pytest.mark.slow
def test_singular_limit_command(tmp_path):
    code = main(
        [
            "--output",
            str(tmp_path),
            "singular-limit",
            "--n",
            "2",
            "--eps",
            "0.01,0.001",
            "--t-min",
            "0.1",
            "--t-max",
            "100",
            "--t-count",
            "7",
        ]
    )
    assert code == 0
    rows = _rows(tmp_path / "singular-limit.csv")
    assert list(rows[0])[:5] == ["eps", "n", "sup_energy_err", "sup_l2_err", "fitted_slope"]
    assert rows[0]["sup_l2_err"] == ""
    assert float(rows[0]["fitted_slope"]) == pytest.approx(1.0, abs=0.1)


def test_profile_error_command(tmp_path):
    grid = ["--t-min", "16384", "--t-max", "262144", "--t-count", "5"]
    assert main(["--output", str(tmp_path), "profile-error", "--n", "2"] + grid) == 0
    (row,) = _rows(tmp_path / "profile-error.csv")
    assert float(row["fitted_exponent"]) <= float(row["target_exponent"]) + 0.05
    assert float(row["improvement"]) < -0.4
