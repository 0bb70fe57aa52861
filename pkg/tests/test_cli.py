import csv
import json

import numpy as np
import pytest

from cylflow.certify import EnergyLedger, read_report
from cylflow.cli import main
from cylflow.io import read_checkpoint


def write(tmp_path, text, name="cfg.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_zero_data_simulation(tmp_path):
    cfg = write(tmp_path, "t_end = 0.2\ninterval = 0.1\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o"), "--resolution", "4"]) == 0
    led = EnergyLedger.from_csv(tmp_path / "o" / "ledger.csv")
    assert all(r["w_l2_sq"] == 0.0 and r["v_l2"] == 0.0 for r in led.rows)
    rep = read_report(tmp_path / "o" / "report.json")
    assert rep["decay"]["passed"] and rep["decay"]["applicable"]
    spec, t, C = read_checkpoint(tmp_path / "o" / "final.ckpt")
    assert t == pytest.approx(0.2) and np.all(C == 0)


def test_steady_flux_smoke_and_certify_round_trip(tmp_path):
    out = tmp_path / "o"
    cfg = write(tmp_path, "flux = constant\ndt = 0.002\nt_end = 0.1\ninterval = 0.1\n")
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    led = EnergyLedger.from_csv(out / "ledger.csv")
    assert len(led) == 51
    assert np.all(led.column("d_w12_sq") > 0)
    rep = read_report(out / "report.json")
    assert rep["integrated_estimate"]["passed"]
    assert main(["certify", "--config", str(out / "config.txt"), "--out", str(out),
                 "--ledger", str(out / "ledger.csv")]) == 0
    again = read_report(out / "certify.json")
    assert again["global_criterion"] == rep["global_criterion"]
    assert again["integrated_estimate"] == rep["integrated_estimate"]


def test_rejected_embedding_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "s = 1.3333333333333333\np = 3\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "violates" in capsys.readouterr().err
    assert not (tmp_path / "o" / "ledger.csv").exists()


def test_incompatible_table_flux_exit_code(tmp_path):
    for k in range(2):
        (tmp_path / f"in{k}.csv").write_text("x1,x2,value\n0,0,1\n0,1,1\n1,0,1\n1,1,1\n")
        (tmp_path / f"out{k}.csv").write_text("x1,x2,value\n0,0,2\n0,1,2\n1,0,2\n1,1,2\n")
    cfg = write(tmp_path, f"flux = table\nflux_times = 0, 1\nflux_inflow = {tmp_path}/in{{k}}.csv\n"
                          f"flux_outflow = {tmp_path}/out{{k}}.csv\nt_end = 0.1\ninterval = 0.1\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o"), "--resolution", "4"]) == 3
    assert main(["lift", "--config", cfg, "--out", str(tmp_path / "l"), "--resolution", "4"]) == 3


def test_malformed_ledger_exit_code(tmp_path, capsys):
    (tmp_path / "ledger.csv").write_text("t,w_l2_sq\n0,1\n")
    assert main(["certify", "--out", str(tmp_path), "--ledger", str(tmp_path / "ledger.csv")]) == 2
    assert "error" in capsys.readouterr().err


def test_lift_and_norms_outputs(tmp_path):
    cfg = write(tmp_path, "flux = parabolic\n")
    out = tmp_path / "o"
    assert main(["lift", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "lift.json").read_text())
    assert max(rep["trace_errors"].values()) < 1e-9
    assert {"b.vtk", "phi.vtk", "delta.vtk"} <= {p.name for p in out.iterdir()}
    assert main(["norms", "--config", cfg, "--out", str(out)]) == 0
    norms = json.loads((out / "norms.json").read_text())
    assert norms["embedding_ok"] and norms["norms"]["d_wsp"] > 0


def _sweep(tmp_path, text):
    cfg = write(tmp_path, "flux = parabolic\nt_end = 0.05\ninterval = 0.05\n" + text)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
    with (tmp_path / "sweep.csv").open() as fh:
        return list(csv.DictReader(fh))


def test_sweep_continues_past_failed_cell(tmp_path):
    rows = _sweep(tmp_path, "sweep_resolution = 2, 4\n")
    assert [r["resolution"] for r in rows] == ["2", "4"]
    assert rows[0]["status"].startswith("error: ConfigurationError")
    assert rows[1]["status"] == "ok" and float(rows[1]["korn_min"]) > 1


def test_single_cell_sweep_matches_simulate(tmp_path):
    rows = _sweep(tmp_path, "")
    assert main(["simulate", "--config", str(tmp_path / "cfg.txt"), "--out", str(tmp_path / "s")]) == 0
    rep = read_report(tmp_path / "s" / "report.json")
    assert float(rows[0]["absorption_margin"]) == rep["absorption"]["margin"]
    assert float(rows[0]["poisson_ratio"]) == rep["weighted_estimate"]["ratio"]
    assert float(rows[0]["min_phi_C"]) == rep["integrated_estimate"]["min_phi_constant"]


def test_sweep_margin_against_amplitude(tmp_path):
    fixed = _sweep(tmp_path, "sweep_amplitude = 0.5, 1, 2, 4\nsweep_resolution = 4\n"
                             "hopf_rule = fixed\nhopf_eps = 0.5\nhopf_rho = 0.5\n")
    m = [float(r["absorption_margin"]) for r in fixed]
    assert all(a > b for a, b in zip(m, m[1:]))
    adaptive = _sweep(tmp_path, "sweep_amplitude = 0.5, 1, 2, 4\nsweep_resolution = 4\n")
    assert all(float(r["absorption_margin"]) >= 0 for r in adaptive)


def test_seed_changes_initial_data(tmp_path):
    cfg = write(tmp_path, "initial = random\nt_end = 0.02\ninterval = 0.02\n")
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1", "--resolution", "4"])
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "2", "--resolution", "4"])
    a = read_checkpoint(tmp_path / "a" / "final.ckpt")[2]
    b = read_checkpoint(tmp_path / "b" / "final.ckpt")[2]
    assert not np.array_equal(a, b)
