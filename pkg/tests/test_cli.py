import csv
import io
import json
import math

import pytest

from kerrmag.cli import main
from kerrmag.config import RunConfig, SCHEMA
from kerrmag.errors import ConfigError
from kerrmag.experiments import catalog_entries, turning_points


def run(argv, capsys):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue(), capsys.readouterr().err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ------------------------------------------------------------ config

@pytest.mark.parametrize("name", list(catalog_entries()))
def test_render_parse_round_trip(name):
    cfg = RunConfig.from_entries(catalog_entries()[name])
    assert RunConfig.parse(cfg.render()) == cfg


def test_defaults_fill_missing_keys():
    cfg = RunConfig.parse("[drive]\npower = 175 mW  # mid window\n")
    assert cfg["power"] == "175 mW"
    assert cfg["kappa1"] == SCHEMA["kappa1"][2]
    assert cfg.to_spec().base.power == pytest.approx(0.175)


@pytest.mark.parametrize("text,line,key", [
    ("kappa1 = 25 MHz\nbogus = 1\n", 2, "bogus"),
    ("\n\nkappa2 = 5 MHZ\n", 3, "kappa2"),
    ("power = 1 mW\npower = 2 mW\n", 2, "power"),
    ("variable = Detuning\nlo = 50 mW\n", 2, "lo"),
    ("points = many\n", 1, "points"),
])
def test_parse_errors_name_line_and_key(text, line, key):
    with pytest.raises(ConfigError) as err:
        RunConfig.parse(text)
    assert err.value.line == line and err.value.key == key
    assert f"line {line}" in str(err.value) and key in str(err.value)


def test_missing_equals_sign():
    with pytest.raises(ConfigError) as err:
        RunConfig.parse("kappa1 25 MHz\n")
    assert err.value.line == 1


def test_overrides():
    cfg = RunConfig.from_entries({}).with_overrides(["power=20 mW", "j_mult = 0.8"])
    spec = cfg.to_spec()
    assert spec.base.power == pytest.approx(0.02) and spec.j_mult == 0.8
    with pytest.raises(ConfigError):
        cfg.with_overrides(["nope=1"])
    with pytest.raises(ConfigError):
        cfg.with_overrides(["power"])


def test_absolute_coupling_override():
    spec = RunConfig.from_entries({"j_coupling": "30 MHz", "lambda_p": "-5 MHz"}).to_spec()
    p, _ = spec.configure(0.1)
    assert p.j_coupling == pytest.approx(2 * math.pi * 30e6)
    assert p.lambda_p == pytest.approx(-2 * math.pi * 5e6)


# ------------------------------------------------------------ commands

def test_steady_zero_drive(capsys):
    code, out, _ = run(["steady", "--set", "power=0 W"], capsys)
    rows = out.strip().splitlines()[1:]
    assert code == 0 and len(rows) == 1
    assert float(rows[0].split()[0]) == 0.0 and "Stable" in rows[0]


def test_steady_bistable(capsys):
    code, out, _ = run(["steady", "--scenario", "fig2a", "--set", "power=175 mW"], capsys)
    rows = out.strip().splitlines()[1:]
    assert code == 0
    assert [r.split()[3] for r in rows] == ["Stable", "Unstable", "Stable"]


def test_steady_bad_unit(capsys):
    code, _, err = run(["steady", "--set", "kappa1=25 MHZ"], capsys)
    assert code == 1 and "kappa1" in err


def test_config_file(tmp_path, capsys):
    path = tmp_path / "run.cfg"
    path.write_text("[drive]\npower = 175 mW\n", encoding="utf-8")
    code, out, _ = run(["steady", "--config", str(path)], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 4
    path.write_text("power = 175\n", encoding="utf-8")
    code, _, err = run(["steady", "--config", str(path)], capsys)
    assert code == 1 and "line 1" in err and "power" in err


def test_missing_config_file_is_io_error(tmp_path, capsys):
    code, _, _ = run(["steady", "--config", str(tmp_path / "none.cfg")], capsys)
    assert code == 3


def test_critical(capsys):
    code, out, _ = run(["critical", "--scenario", "fig2a"], capsys)
    assert code == 0
    assert "Jc/2pi       = 35.777" in out
    assert "Jc0/2pi      = 36.211" in out
    assert "lambda_c/2pi  = -12.500000" in out
    assert "lambda_c0/2pi = 0.000000" in out


def test_critical_needs_pdc_power(capsys):
    code, _, err = run(["critical", "--set", "power=0 W"], capsys)
    assert code == 2 and "DomainError" in err


def test_sweep_files(tmp_path, capsys):
    out = tmp_path / "a.csv"
    code, _, _ = run(["sweep", "--scenario", "fig2a", "--out", str(out),
                      "--set", "points=50", "--threads", "1"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 50
    assert list(rows[0]) == (["abscissa"] + [f"m_root_{k}" for k in range(1, 6)]
                             + [f"stab_{k}" for k in range(1, 6)]
                             + ["m1", "m2", "nr_abs", "nr_db", "flags"])
    for r in rows:
        assert float(r["m1"]) == pytest.approx(float(r["m2"]), rel=1e-9)
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["config"]["name"] == "fig2a" and meta["config"]["points"] == "50"
    assert meta["abscissa_unit"] == "W"

    again = tmp_path / "b.csv"
    run(["sweep", "--scenario", "fig2a", "--out", str(again), "--set", "points=50",
         "--threads", "2"], capsys)
    assert again.read_bytes() == out.read_bytes()


def test_sweep_fig2d_window(tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert run(["sweep", "--scenario", "fig2d", "--out", str(out), "--set", "points=60",
                "--threads", "1"], capsys)[0] == 0
    nr = [float(r["nr_abs"]) > 0 for r in read_csv(out)]
    first, last = nr.index(True), len(nr) - 1 - nr[::-1].index(True)
    assert all(nr[first:last + 1])


def test_sweep_detuning_abscissa_in_hz(tmp_path, capsys):
    out = tmp_path / "f3.csv"
    run(["sweep", "--scenario", "fig3a", "--out", str(out), "--set", "points=4",
         "--threads", "1"], capsys)
    rows = read_csv(out)
    assert float(rows[0]["abscissa"]) == pytest.approx(-200e6)


@pytest.mark.parametrize("argv", [["sweep", "--scenario", ""],
                                  ["sweep", "--scenario", "fig10a"]])
def test_sweep_bad_scenario(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and "fig2a" in err and "fig9d" in err


def test_sweep_unwritable(capsys, tmp_path):
    code, _, _ = run(["sweep", "--scenario", "fig2a", "--set", "points=3",
                      "--out", str(tmp_path / "missing" / "x.csv"), "--threads", "1"],
                     capsys)
    assert code == 3


def test_hysteresis_linear(tmp_path, capsys):
    out = tmp_path / "h.csv"
    code, _, _ = run(["hysteresis", "--out", str(out), "--set", "kerr=0 Hz",
                      "--set", "points=30"], capsys)
    assert code == 0
    for r in read_csv(out):
        assert float(r["M_forward"]) == pytest.approx(float(r["M_backward"]), rel=1e-6)
        assert r["jump_forward"] == r["jump_backward"] == "0"


def test_hysteresis_fig2a(tmp_path, capsys, fig2a):
    out = tmp_path / "h.csv"
    code, _, _ = run(["hysteresis", "--scenario", "fig2a", "--out", str(out),
                      "--set", "points=120"], capsys)
    assert code == 0
    rows = read_csv(out)
    low, high = turning_points(fig2a)
    for r in rows:
        x = float(r["abscissa"])
        f, b = float(r["M_forward"]), float(r["M_backward"])
        if low < x < high:
            assert abs(f - b) > 0.1 * f
        else:
            assert f == pytest.approx(b, rel=1e-5)
    assert sum(r["jump_forward"] == "1" for r in rows) == 1
    assert sum(r["jump_backward"] == "1" for r in rows) == 1


def test_hysteresis_above_threshold(tmp_path, capsys):
    code, _, err = run(["hysteresis", "--out", str(tmp_path / "h.csv"),
                        "--set", "lambda_p=200 MHz", "--set", "points=5"], capsys)
    assert code == 2 and "abscissa 0.05" in err


def test_hysteresis_needs_power_sweep(capsys, tmp_path):
    code, _, err = run(["hysteresis", "--scenario", "fig3a",
                        "--out", str(tmp_path / "h.csv")], capsys)
    assert code == 1 and "Power" in err


def test_catalog_listing(capsys):
    code, out, _ = run(["catalog"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 32


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
