import json
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbmlimits.harness.cli import main
from bbmlimits.harness.config import ConfigError, ScenarioConfig, build_space, load_config
from bbmlimits.harness.emit import emit
from bbmlimits.harness.extrapolate import InputError, extrapolate, fit_power
from bbmlimits.harness.runner import run_scenario, verdict

SCENARIO = """\
family = "{family}"
p = 2.0
deltas = [0.08, 0.04, 0.02, 0.01]
seed = 3
tolerance = 0.02

[space]
name = "interval"

[map]
kind = "{map}"

[quadrature]
method = "{method}"
n_outer = 4000
"""


def write_config(tmp_path, family="rho1", map="identity", method="quadrature", name="scenario.toml"):
    path = tmp_path / name
    path.write_text(SCENARIO.format(family=family, map=map, method=method))
    return path


# extrapolation ---------------------------------------------------------------


def test_extrapolate_synthetic_eighth():
    fit = extrapolate([(0.04, 0.1253), (0.02, 0.1251), (0.01, 0.12505)])
    assert fit.limit == pytest.approx(0.125, abs=1e-4)
    assert fit.uncertainty < 1e-4
    assert fit.raw_smallest == 0.12505


def test_extrapolate_constant_is_exact():
    fit = extrapolate([(0.1, 0.7), (0.05, 0.7), (0.02, 0.7)])
    assert fit.limit == 0.7 and fit.uncertainty == 0.0


def test_extrapolate_underdetermined():
    with pytest.raises(InputError):
        extrapolate([(0.1, 1.0), (0.05, 0.9)], model="power")
    with pytest.raises(InputError):
        extrapolate([(0.1, 1.0), (0.05, 0.9)])
    with pytest.raises(InputError):
        extrapolate([(0.1, 1.0), (0.05, 0.9), (0.02, 0.8)], model="cubic")


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(-10, 10), n=st.integers(3, 8))
def test_extrapolate_recovers_linear_intercept(a, b, n):
    deltas = 0.08 * 0.5 ** np.arange(n)
    fit = extrapolate([(d, a + b * d) for d in deltas])
    assert fit.limit == pytest.approx(a, abs=1e-10)


def test_power_model_recovers_exponent():
    x = np.array([0.08, 0.04, 0.02, 0.01, 0.005])
    e, b, g, resid = fit_power(x, 0.3 + 2.0 * x**1.7, gamma=None)
    assert e == pytest.approx(0.3, abs=1e-8)
    assert g == pytest.approx(1.7, abs=1e-6)
    fit = extrapolate(list(zip(x, 0.3 + 2.0 * x**1.7)), model="power")
    assert fit.limit == pytest.approx(0.3, abs=1e-8)


def test_weighted_fit_uses_errors():
    rows = [(0.08, 1.08, 0.01), (0.04, 1.04, 0.01), (0.02, 1.02, 0.01), (0.01, 1.5, 10.0)]
    assert extrapolate(rows).limit == pytest.approx(1.0, abs=1e-3)


# config ------------------------------------------------------------------------


def test_config_roundtrip(tmp_path):
    cfg = load_config(write_config(tmp_path))
    assert cfg.family == "rho1" and cfg.deltas == (0.08, 0.04, 0.02, 0.01)
    assert len(cfg.fingerprint()) == 64


def test_fingerprint_ignores_output_and_workers():
    base = dict(space="interval", map="identity", deltas=[0.08, 0.04, 0.02])
    a = ScenarioConfig.from_dict(base)
    b = ScenarioConfig.from_dict({**base, "output_dir": "/tmp/x", "quadrature": {"workers": 4}})
    c = ScenarioConfig.from_dict({**base, "seed": 1})
    d = ScenarioConfig.from_dict({**base, "p": 2})
    assert a.fingerprint() == b.fingerprint() == d.fingerprint()
    assert a.fingerprint() != c.fingerprint()


@pytest.mark.parametrize("bad", [
    {"deltas": [0.01, 0.02, 0.04]},
    {"deltas": [0.08, 0.08, 0.02]},
    {"deltas": [1.5, 0.5, 0.1]},
    {"deltas": []},
    {"tolerance": 0.0},
    {"family": "rho9"},
    {"quadrature": {"colour": 1}},
    {"unknown": 1},
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"space": "interval", "map": "identity", **bad})


def test_unknown_space():
    with pytest.raises(ConfigError):
        build_space("torus")


def test_malformed_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("family = \n")
    with pytest.raises(ConfigError):
        load_config(path)


# runner ------------------------------------------------------------------------


def test_verdict_floor_and_monotonicity():
    assert verdict(0.0, 0.0, 0.01)
    assert not verdict(1e-9, 0.0, 0.01)
    for tol in (0.001, 0.01, 0.1):
        if verdict(1.02, 1.0, tol):
            assert verdict(1.02, 1.0, 2 * tol)


def test_run_scenario_rho1():
    cfg = ScenarioConfig.from_dict({"space": "interval", "map": "identity", "family": "rho1"})
    rep = run_scenario(cfg)
    assert rep.passed
    assert rep.extrapolated == pytest.approx(1 / 3, rel=1e-10)
    assert rep.cheeger_ratios is not None and len(rep.cheeger_ratios) == 4


def test_run_scenario_constant_map():
    cfg = ScenarioConfig.from_dict({"space": "interval", "map": {"kind": "constant", "value": 2.0}, "family": "rho0"})
    rep = run_scenario(cfg)
    assert rep.passed and rep.predicted == 0.0 and rep.extrapolated == 0.0


def test_run_scenario_rho0_reports_s():
    cfg = ScenarioConfig.from_dict({"space": "interval", "map": "identity", "family": "rho0", "tolerance": 0.03})
    rep = run_scenario(cfg)
    assert rep.passed
    assert [row["s"] for row in rep.rows()] == [0.92, 0.96, 0.98, 0.99]


def test_run_scenario_error_record():
    cfg = ScenarioConfig.from_dict({"space": "interval", "map": "identity", "target": "discrete"})
    rep = run_scenario(cfg)
    assert rep.verdict == "error" and rep.error["type"] == "UnsupportedTargetError"


def test_verdict_monotone_in_tolerance():
    base = {"space": "interval", "map": "identity", "family": "rho0"}
    results = [run_scenario(ScenarioConfig.from_dict({**base, "tolerance": t})).passed for t in (0.001, 0.01, 0.1)]
    assert results == sorted(results)


# emit --------------------------------------------------------------------------


def test_emit_layout(tmp_path):
    rep = run_scenario(ScenarioConfig.from_dict({"space": "interval", "map": "identity", "family": "rho2"}))
    emit(rep, tmp_path)
    lines = (tmp_path / "energies.csv").read_text().splitlines()
    assert lines[0] == "delta,value,stderr,n_samples"
    assert len(lines) == 5
    records = [json.loads(line) for line in (tmp_path / "report.jsonl").read_text().splitlines()]
    assert len(records) == 5
    summary = records[-1]
    for key in ("predicted", "extrapolated", "rel_dev", "verdict", "fingerprint"):
        assert key in summary


# cli ---------------------------------------------------------------------------


def test_cli_run_is_byte_identical(tmp_path):
    cfg = write_config(tmp_path, family="rho3", method="monte-carlo")
    outs = []
    for name, workers in (("a", "1"), ("b", "2")):
        assert main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / name), "--workers", workers]) == 0
        outs.append(((tmp_path / name / "energies.csv").read_bytes(), (tmp_path / name / "report.jsonl").read_bytes()))
    assert outs[0] == outs[1]


def test_cli_seed_override_changes_output(tmp_path):
    cfg = write_config(tmp_path, family="rho3", method="monte-carlo")
    main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / "a")])
    main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / "b"), "--seed", "11"])
    assert (tmp_path / "a" / "energies.csv").read_bytes() != (tmp_path / "b" / "energies.csv").read_bytes()


def test_cli_failing_verdict_exit_code(tmp_path):
    path = tmp_path / "tight.toml"
    path.write_text(SCENARIO.format(family="rho0", map="identity", method="quadrature").replace(
        "tolerance = 0.02", "tolerance = 0.0001"))
    assert main(["run", "--config", str(path), "--out-dir", str(tmp_path / "out")]) == 1


@pytest.mark.skipif(os.geteuid() == 0, reason="permission bits do not bind root")
def test_cli_unwritable_directory_by_permissions(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    assert main(["run", "--config", str(write_config(tmp_path)), "--out-dir", str(locked / "out")]) == 2


def test_cli_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    assert main(["run", "--config", str(write_config(tmp_path)), "--out-dir", str(blocker / "out")]) == 2


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.toml"), "--out-dir", str(tmp_path)]) == 2
    assert main(["ks", "--space", "interval", "--x", "0.5 0.5"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["check", "--family", "rho7", "--space", "interval"])
    assert exc.value.code == 2


def test_cli_check(tmp_path, capsys):
    assert main(["check", "--family", "rho1", "--space", "interval", "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "condition iii: PASS" in out
    assert json.loads((tmp_path / "admissibility.json").read_text())["family"] == "rho1"
    assert main(["check", "--family", "annulus", "--space", "interval"]) == 1


def test_cli_diagnostics(capsys):
    assert main(["ks", "--space", "interval", "--map", "identity", "--x", "0.5"]) == 0
    assert "# density=0.333333" in capsys.readouterr().out
    assert main(["doubling", "--space", "interval"]) == 0
    assert "C_D=2.0" in capsys.readouterr().out
    assert main(["dimension", "--space", "square", "--x", "0.5,0.5"]) == 0
    assert "dimension=2.0" in capsys.readouterr().out
    assert main(["inner", "--space", "interval", "--family", "rho3", "--delta", "0.1", "--x", "0.5"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.5)
    assert main(["energy", "--space", "interval", "--family", "rho2", "--delta", "0.05"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "delta,value,stderr,n_samples"
    assert main(["smooth", "--space", "interval", "--r", "0.05"]) == 0
    assert "partition_error" in capsys.readouterr().out
