import json
import math

import pytest

from qproc.cli import CliConfig, UsageError, run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_density_semicircle(capsys):
    code, out, _ = _run(capsys, "density", "--q", "0", "--x", "0,1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,density"
    assert lines[1] == f"0,{format(1 / math.pi, '.12g')}"
    assert float(lines[2].split(",")[1]) == pytest.approx(math.sqrt(3) / (2 * math.pi), abs=1e-12)


def test_density_json_and_cdf(capsys):
    code, out, _ = _run(capsys, "density", "--q", "1", "--x", "0", "--cdf", "--format", "json")
    assert code == 0 and json.loads(out) == {"x": [0.0], "cdf": [0.5]}


def test_transition_needs_both(capsys):
    code, _, err = _run(capsys, "density", "--q", "0.5", "--x", "0", "--y", "0.2")
    assert code == 1 and "--rho" in err


def test_poly(capsys):
    code, out, _ = _run(capsys, "poly", "--q", "0.3", "--n", "3", "--x", "1.5")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()]
    assert rows[0] == ["degree", "value"] and len(rows) == 5
    # H_3 = x^3 - (2 + q) x
    assert float(rows[4][1]) == pytest.approx(1.5**3 - 2.3 * 1.5)


def test_spectrum(capsys):
    code, out, _ = _run(capsys, "spectrum", "--q", "1", "--alpha", "0.7", "--n", "1", "--omega", "0,1.3")
    assert code == 0
    vals = [float(line.split(",")[1]) for line in out.splitlines()[1:]]
    assert vals == pytest.approx([2 / 0.7, 1.4 / (1.69 + 0.49)])


def test_bridge_qwiener_json(capsys):
    code, out, _ = _run(capsys, "bridge", "--kind", "qwiener", "--q", "0.5", "--left", "0.7", "--right", "-0.4",
                        "--sigma", "2", "--delta", "0.5", "--gamma", "1", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["mean"] == pytest.approx(1 / 3) and d["variance"] == pytest.approx(0.3688888888888889)


def test_bridge_ou_csv(capsys):
    code, out, _ = _run(capsys, "bridge", "--q", "0.5", "--alpha", "1", "--n", "2", "--left", "0.4",
                        "--right", "-0.7", "--delta", "0.6", "--gamma", "0.9")
    assert code == 0
    d = dict(line.split(",") for line in out.splitlines()[1:])
    assert float(d["hermite_2"]) == pytest.approx(-0.3690980845830885, abs=1e-11)
    assert float(d["variance"]) == pytest.approx(0.6306309393291597, abs=1e-11)


def test_simulate_csv_shape(capsys):
    code, out, _ = _run(capsys, "simulate", "--q", "0.5", "--alpha", "1", "--t1", "1", "--dt", "0.25",
                        "--paths", "2", "--seed", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "path,time,value" and len(lines) == 1 + 2 * 5
    assert lines[1].startswith("0,0,") and lines[-1].startswith("1,1,")


def test_simulate_json(capsys):
    code, out, _ = _run(capsys, "simulate", "--kind", "qwiener", "--q", "0", "--t0", "0", "--t1", "2",
                        "--dt", "1", "--seed", "2", "--format", "json")
    assert code == 0
    (path,) = json.loads(out)
    assert path["times"] == [0.0, 1.0, 2.0] and path["values"][0] == 0.0 and path["seed"] == 2


def test_simulate_to_file(tmp_path, capsys):
    target = tmp_path / "p.csv"
    code, out, _ = _run(capsys, "simulate", "--q", "0", "--alpha", "1", "--t1", "1", "--dt", "0.5",
                        "--output", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("path,time,value\n")


@pytest.mark.parametrize("argv,needle", [
    (["density", "--q", "1.5", "--x", "0"], "does not exist for q > 1"),
    (["simulate", "--q", "0.5", "--t1", "1", "--dt", "0.1"], "--alpha"),
    (["simulate", "--q", "0.5", "--alpha", "1", "--t1", "1", "--dt", "0.3"], "integer"),
    (["simulate", "--q", "0.5", "--alpha", "-1", "--t1", "1", "--dt", "0.5"], "alpha"),
    (["poly", "--q", "0.5", "--n", "2", "--x", "1", "--family", "asc"], "--y"),
    (["bridge", "--kind", "ou", "--q", "0.5", "--alpha", "1", "--n", "5", "--left", "0", "--right", "0",
      "--delta", "1", "--gamma", "1"], ""),
    (["frobnicate"], "invalid choice"),
    (["density", "--x", "0"], "--q"),
])
def test_usage_errors_exit_1(capsys, argv, needle):
    code, out, err = _run(capsys, *argv)
    assert code == 1 and out == ""
    assert err.startswith("qproc: error:") and needle in err


def test_config_dataclass():
    cfg = CliConfig("spectrum", q=0.5, alpha=2.0, options={"n": 1})
    assert cfg.needs_alpha
    with pytest.raises(UsageError):
        CliConfig("spectrum", q=0.5)
    with pytest.raises(UsageError):
        CliConfig("simulate", q=0.5, alpha=1.0, format="xml")


def test_verify_quick_writes_coverage(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QPROC_THREADS", "2")
    cov = tmp_path / "cov.json"
    code, out, err = _run(capsys, "verify", "--suite", "quick", "--seed", "3", "--coverage", str(cov))
    assert code == 0
    rows = json.loads(out)
    assert all(r["passed"] for r in rows)
    assert "checks passed" in err
    assert all(json.loads(cov.read_text()).values())


def test_negative_list_values(capsys):
    code, out, _ = _run(capsys, "density", "--q", "0", "--x", "-1,0.5", "--y", "-0.2", "--rho", "0.5")
    assert code == 0 and out.splitlines()[1].startswith("-1,")
