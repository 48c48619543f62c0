import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermovar.errors import ConfigError, SchemaMismatchError
from thermovar.harness import cli
from thermovar.harness.compare import compare_runs, relative_difference
from thermovar.harness.config import (COMMON_DEFAULTS, SCENARIOS, build_config, dump_config, load_config,
                                      parse_config)
from thermovar.harness.output import read_csv, write_csv
from thermovar.harness.report import at_least, at_most
from thermovar.harness.scenarios import run_scenario


def test_minimal_config_gets_defaults():
    cfg = parse_config("scenario = gas_tube_spatial\n")
    assert cfg["numerics.cfl"] == 0.25
    assert cfg["numerics.snapshot_every"] == 0
    assert cfg["numerics.nx"] == 128
    assert cfg.get("numerics.dt") is None


def test_comments_and_quotes():
    cfg = parse_config('# header\nscenario = "piston"   # preset\n\noutput = runs/a\n')
    assert cfg.scenario == "piston" and cfg["output"] == "runs/a"


@pytest.mark.parametrize("text,key,line", [
    ("scenario = piston\nphenomenology.kappa = -1\n", "phenomenology.kappa", 2),
    ("scenario = piston\n\nnumerics.nx = ten\n", "numerics.nx", 3),
    ("scenario = piston\nbogus.key = 1\n", "bogus.key", 2),
    ("scenario = piston\nnumerics.dt = 1e-3\nnumerics.dt = 2e-3\n", "numerics.dt", 3),
    ("scenario = warp_drive\n", "scenario", 1),
    ("scenario = gas_tube_spatial\nnumerics.form = free_energy\n", "numerics.form", 2),
    ("scenario = piston\neos.Cp = 2.0\n", "eos.Cp", 2),
])
def test_validation_errors_name_key_and_line(text, key, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.key == key
    assert err.value.line == line


def test_malformed_line():
    with pytest.raises(ConfigError) as err:
        parse_config("scenario = piston\njust words\n")
    assert err.value.line == 2
    with pytest.raises(ConfigError):
        parse_config("[section]\nscenario = piston\n")


def test_missing_scenario():
    with pytest.raises(ConfigError, match="valid identifiers"):
        parse_config("numerics.nx = 32\n")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


@given(
    scenario=st.sampled_from(SCENARIOS),
    kappa=st.floats(0.0, 10.0, allow_nan=False),
    amp=st.floats(-0.05, 0.05, allow_nan=False),
    nx=st.integers(2, 4096),
    out=st.text(alphabet="abcxyz_/0123", min_size=1, max_size=12),
)
@settings(max_examples=60, deadline=None)
def test_round_trip(scenario, kappa, amp, nx, out):
    cfg = build_config({"scenario": scenario, "phenomenology.kappa": kappa, "initial.amplitude": amp,
                        "numerics.nx": nx, "output": out})
    again = parse_config(dump_config(cfg))
    assert again == cfg
    assert dump_config(again) == dump_config(cfg)


def test_verdicts():
    assert at_most("a", 1e-9, 1e-8).passed
    assert not at_most("a", float("nan"), 1.0).passed
    assert at_least("order", 2.0, 1.8).passed
    assert "[FAIL]" in at_least("order", 1.0, 1.8).line()


def test_csv_round_trip(tmp_path):
    cols = {"t": [0.0, 0.1], "x": [1 / 3, 2e-300]}
    write_csv(tmp_path / "a.csv", cols)
    header, data = read_csv(tmp_path / "a.csv")
    assert header == ["t", "x"]
    assert data[0, 1] == 1 / 3 and data[1, 1] == 2e-300
    with pytest.raises(ValueError):
        write_csv(tmp_path / "b.csv", {"x": [1.0]})


def test_relative_difference():
    assert relative_difference([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert relative_difference([1.0, 2.0], [1.0, 2.2]) == pytest.approx(0.2 / 2.2)
    assert relative_difference([0.0], [1e-14]) == 0.0


@pytest.fixture(scope="module")
def spatial_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("runs")
    out = {}
    for name, extra in (("temp", {}), ("ent", {"numerics.form": "entropy"}), ("coarse", {"numerics.nx": 32})):
        vals = {"scenario": "gas_tube_spatial", "numerics.nx": 64, "numerics.t_end": 0.02,
                "numerics.snapshot_every": 10, "numerics.dt": 5e-4}
        vals.update(extra)
        run_scenario(build_config(vals), out=root / name)
        out[name] = root / name
    return out


def test_compare_runs(spatial_runs):
    assert compare_runs(spatial_runs["temp"], spatial_runs["temp"], 0.0).passed
    res = compare_runs(spatial_runs["temp"], spatial_runs["ent"], 1e-6)
    assert res.passed and res.max_rel > 0
    with pytest.raises(SchemaMismatchError):
        compare_runs(spatial_runs["temp"], spatial_runs["coarse"], 1e-6)
    with pytest.raises(SchemaMismatchError):
        compare_runs(spatial_runs["temp"] / "final.csv", spatial_runs["coarse"] / "final.csv", 1e-6)


def test_run_outputs(spatial_runs):
    run = spatial_runs["temp"]
    report = json.loads((run / "report.json").read_text())
    assert report["passed"]
    assert report["config"]["numerics.nx"] == 64
    assert {"diagnostics.csv", "final.csv", "snap_0.csv", "snap_40.csv"} <= set(report["files"])
    header, data = read_csv(run / "diagnostics.csv")
    assert header[0] == "t" and "ck_residual_max" in header and data.shape[0] == 41
    assert parse_config((run / "config.resolved").read_text())["numerics.nx"] == 64


def test_deterministic(tmp_path):
    cfg = build_config({"scenario": "two_cells", "numerics.t_end": 0.1})
    run_scenario(cfg, out=tmp_path / "a")
    run_scenario(cfg, out=tmp_path / "b")
    assert (tmp_path / "a" / "diagnostics.csv").read_bytes() == (tmp_path / "b" / "diagnostics.csv").read_bytes()


def test_two_cells_fit(tmp_path):
    report = run_scenario(build_config({"scenario": "two_cells"}), out=tmp_path)
    fit = {v.name: v for v in report.verdicts}["relaxation_rate_error"]
    assert fit.passed and fit.tolerance == 1e-4


@pytest.mark.parametrize("scenario", ["piston", "adiabatic_piston", "gas_tube_material", "cross_check"])
def test_scenarios_pass(tmp_path, scenario):
    vals = {"scenario": scenario, "numerics.t_end": 0.2 if scenario in ("piston", "adiabatic_piston") else 0.02}
    if scenario in ("gas_tube_material", "cross_check"):
        vals["numerics.nx"] = 32
    report = run_scenario(build_config(vals), out=tmp_path)
    assert report.passed, [v.line() for v in report.verdicts if not v.passed]


def test_supplied_heat_scenario(tmp_path):
    cfg = build_config({"scenario": "gas_tube_material", "numerics.nx": 32, "numerics.t_end": 0.02,
                        "supply.profile": "cosine", "supply.amplitude": 0.5})
    report = run_scenario(cfg, out=tmp_path)
    names = {v.name for v in report.verdicts}
    assert "energy_balance_rel" in names and "thermodynamic_type_identity" not in names
    assert report.passed


def test_unknown_scenario(tmp_path):
    from thermovar.harness.config import RunConfig

    with pytest.raises(ConfigError, match="valid identifiers"):
        run_scenario(RunConfig({**COMMON_DEFAULTS, "scenario": "nope"}), out=tmp_path)


def test_cli_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.cfg"
    good.write_text("scenario = two_cells\nnumerics.t_end = 0.1\n")
    assert cli.main(["run", "--config", str(good), "--out", str(tmp_path / "o")]) == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("scenario = two_cells\nphenomenology.kappa = -1\n")
    assert cli.main(["run", "--config", str(bad)]) == 2
    assert "phenomenology.kappa" in capsys.readouterr().err
    assert cli.main(["compare", str(tmp_path / "o"), str(tmp_path / "o"), "--tol", "0"]) == 0
    assert cli.main(["check", "--suite", "eos"]) == 0
    other = tmp_path / "o2"
    cli.main(["run", "--config", str(good), "--out", str(other)])
    header, data = read_csv(other / "diagnostics.csv")
    data[:, 1] *= 1.01
    write_csv(other / "diagnostics.csv", {h: data[:, j] for j, h in enumerate(header)})
    assert cli.main(["compare", str(tmp_path / "o"), str(other), "--tol", "1e-6", "--include-diagnostics"]) == 1
    with pytest.raises(SystemExit):
        cli.main(["check", "--suite", "nope"])
