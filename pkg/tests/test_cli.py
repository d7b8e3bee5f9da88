import csv
import io
import json

import numpy as np
import pytest

from zenodecay import cli
from zenodecay.errors import ConvergenceError
from zenodecay.scenarios import cavity_params, CavityGeometry


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_rate_fig3_matches_zeno_law():
    code, out, _ = run(["rate", "--preset", "fig3", "--tau", "3e-8"])
    assert code == 0
    env = json.loads(out)
    p = cavity_params(CavityGeometry(1e5, 15.0, 0.02, 1e6))
    zeno = p.g_s ** 2 * 3e-8 + p.gamma_b
    # first-order correction -Gamma_s tau / 3 of the sharp part
    assert env["results"]["kappa"] == pytest.approx(zeno, rel=0.03)
    assert env["results"]["kappa_s"] == pytest.approx(563786.4656930523, rel=1e-8)
    assert env["config"]["tau"] == 3e-8 and env["tool"] == "zenodecay"


def test_rate_methods_agree():
    base = ["rate", "--reservoir", "lorentzian", "--g-s", "2e6", "--gamma-s", "5e6",
            "--delta", "3e7", "--tau", "1e-7", "--format", "json"]
    vals = {}
    for m in ("quadrature", "time-domain", "closed-form"):
        code, out, _ = run(base + ["--method", m])
        assert code == 0
        vals[m] = json.loads(out)["results"]["kappa_s"]
    assert vals["quadrature"] == pytest.approx(vals["closed-form"], rel=1e-8)
    assert vals["time-domain"] == pytest.approx(vals["closed-form"], rel=1e-8)


def test_rate_hydrogenic_auto_is_closed_form_and_flags_validity():
    code, out, _ = run(["rate", "--reservoir", "hydrogenic", "--nu", "5e18"])
    env = json.loads(out)
    assert code == 0
    assert env["results"]["method"] == "closed-form"
    assert any("outside model validity" in a for a in env["annotations"])


def test_sweep_hydrogenic_monotone_table():
    code, out, _ = run(["sweep", "--reservoir", "hydrogenic", "--nu", "1e12:1e17:log:50"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "nu [rad/s]"
    assert all("[" in h for h in rows[0])
    assert len(rows) == 51
    kappa = np.array([float(r[3]) for r in rows[1:]])
    assert np.all(np.diff(kappa) > 0)
    assert all("e" in r[0] and len(r[0].split("e")[0].replace(".", "").lstrip("-")) == 12
               for r in rows[1:])


def test_sweep_two_axes_cartesian():
    code, out, _ = run(["sweep", "--reservoir", "hydrogenic", "--nu", "1e12:1e14:log:3",
                        "--omega-a", "1e15:3e15:linear:2"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:2] == ["omega_a [rad/s]", "nu [rad/s]"]
    assert len(rows) == 7


def test_sweep_workers_give_identical_bytes(monkeypatch):
    argv = ["sweep", "--reservoir", "hydrogenic", "--nu", "1e12:1e17:log:12"]
    serial = run(argv + ["--workers", "1"])[1]
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    assert run(argv)[1] == serial


def test_bad_worker_env(monkeypatch):
    monkeypatch.setenv(cli.WORKERS_ENV, "many")
    assert run(["sweep", "--reservoir", "hydrogenic", "--nu", "1:2:log:2"])[0] == 2


def test_evolve_fig3_four_curves(tmp_path):
    code, _, _ = run(["evolve", "--preset", "fig3", "--out", str(tmp_path)])
    assert code == 0
    header = (tmp_path / "fig3.csv").read_text().splitlines()[0].split(",")
    assert header[0] == "t_s" and len(header) == 5
    svg = (tmp_path / "fig3.svg").read_text()
    assert svg.count("<polyline") == 4
    for k in range(1, 5):
        assert f"{k}: " in svg
    env = json.loads((tmp_path / "fig3.json").read_text())
    assert env["command"] == "evolve"


def test_preset_fig4_four_series(tmp_path):
    assert run(["preset", "--preset", "fig4", "--out", str(tmp_path)])[0] == 0
    assert (tmp_path / "fig4.svg").read_text().count("<polyline") == 4


def test_evolve_generic_trace():
    code, out, _ = run(["evolve", "--reservoir", "lorentzian", "--g-s", "2e6", "--gamma-s", "5e6",
                        "--tau", "1e-7", "--n", "5"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t_s,W,re_alpha_e,im_alpha_e,interrupted"
    assert sum(line.endswith(",1") for line in lines[1:]) == 5


@pytest.mark.parametrize("argv", [
    ["evolve", "--preset", "fig3"],
    ["sweep", "--reservoir", "hydrogenic", "--nu", "1e12:1e17:log:5"],
    ["rate", "--preset", "fig4"],
])
def test_determinism(argv):
    assert run(argv)[1] == run(argv)[1]


def test_out_dir_bytes_identical(tmp_path):
    argv = ["sweep", "--reservoir", "hydrogenic", "--nu", "1e12:1e17:log:5"]
    run(argv + ["--out", str(tmp_path / "a")])
    run(argv + ["--out", str(tmp_path / "b")])
    for name in ("sweep.csv", "sweep.json", "sweep.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mode = rate\npreset = fig3\ntau = 1e-8\n")
    file_only = json.loads(run(["rate", "--config", str(cfg)])[1])
    assert file_only["config"]["tau"] == 1e-8
    flagged = json.loads(run(["rate", "--config", str(cfg), "--tau", "2e-8"])[1])
    assert flagged["config"]["tau"] == 2e-8
    # preset binding supplies the cavity
    assert flagged["config"]["finesse"] == 1e5


def test_write_config_round_trip(tmp_path):
    first = tmp_path / "one.cfg"
    argv = ["sweep", "--reservoir", "hydrogenic", "--nu", "1e12:1e15:log:4"]
    code, out1, _ = run(argv + ["--write-config", str(first)])
    assert code == 0
    second = tmp_path / "two.cfg"
    code, out2, _ = run(["sweep", "--config", str(first), "--write-config", str(second)])
    assert code == 0 and out1 == out2
    assert first.read_text() == second.read_text()


@pytest.mark.parametrize("argv", [
    ["rate", "--reservoir", "nowhere", "--tau", "1e-8"],
    ["rate", "--reservoir", "lorentzian", "--g-s", "1", "--gamma-s", "1"],
    ["rate", "--reservoir", "lorentzian", "--g-s", "1", "--gamma-s", "1", "--tau", "1",
     "--nu", "1"],
    ["rate", "--tau", "abc"],
    ["rate", "--preset", "fig3", "--method", "closed-form", "--filter", "lorentzian",
     "--nu", "1e6"],
    ["sweep", "--reservoir", "hydrogenic", "--nu", "1e12:1e17:log:1"],
    ["evolve", "--preset", "antizeno"],
    ["preset", "--preset", "fig9"],
    ["rate", "--config", "/nonexistent/file.cfg"],
    ["validate", "--tau", "1e-6", "--t-p", "1e-8"],
    ["bogus"],
    [],
])
def test_config_errors_exit_2(argv):
    assert run(argv)[0] == 2


def test_convergence_failure_exit_3(monkeypatch):
    def boom(p):
        raise ConvergenceError("forced", 1.0, 1.0)

    monkeypatch.setattr(cli, "compute_rate", boom)
    code, _, err = run(["rate", "--preset", "fig3"])
    assert code == 3 and "non-convergence" in err


def test_validity_warning_keeps_exit_zero():
    code, out, _ = run(["rate", "--preset", "fig3", "--tau", "1e-6", "--method", "closed-form"])
    assert code == 0
    assert json.loads(out)["annotations"]


def test_validate_schedule():
    code, out, _ = run(["validate", "--tau", "1e-6", "--t-p", "1e-8", "--omega-p", "3.14159e8",
                        "--gamma-u", "1e7"])
    env = json.loads(out)
    assert code == 0 and env["results"]["schedule_ok"] is True


def test_validate_cavity_reports_parameters():
    env = json.loads(run(["validate", "--preset", "fig3"])[1])
    assert env["results"]["gamma_s"] == pytest.approx(6.3e6, rel=0.01)
    assert env["results"]["short_time_regime"] is False


def test_csv_format_for_scalar_command_is_error():
    assert run(["rate", "--preset", "fig3", "--format", "csv"])[0] == 2


def test_tabulated_reservoir(tmp_path):
    table = tmp_path / "g.dat"
    w = np.linspace(1e6, 3e6, 201)
    g = np.exp(-((w - 2e6) / 2e5) ** 2)
    table.write_text("".join(f"{a:.17g} {b:.17g}\n" for a, b in zip(w, g)))
    code, out, _ = run(["rate", "--reservoir", "tabulated", "--table", str(table),
                        "--omega-a", "2e6", "--nu", "1"])
    assert code == 0
    # narrow filter: golden rule at the peak
    assert json.loads(out)["results"]["kappa_s"] == pytest.approx(2 * np.pi, rel=1e-4)


def test_version_flag():
    assert run(["--version"])[0] == 0
