import json
import math

import pytest

from lemlab import cli
from lemlab import experiments as ex
from lemlab.core import PoleConfig
from lemlab.errors import ConfigError
from lemlab.green import BidiskPoint
from lemlab.optimizer import OptimizerOptions

FAST = OptimizerOptions(starts=6, evals=300)


def spec(**kw):
    base = dict(z=BidiskPoint(0.3, 0.3j), path="Equal", t0=1e-2, ratio=0.1, count=2, options=FAST)
    base.update(kw)
    return ex.SweepSpec(**base)


def test_paths():
    assert spec().poles()[1][1] == PoleConfig(1e-3, 1e-3)
    s = spec(path="Resonant", z=BidiskPoint(0.05, -0.05), gamma_scale=-1.0)
    t, p = s.poles()[0]
    assert p.eps2 == pytest.approx((1 - t) * t)
    s = spec(path="Generic", directions=(1j, 1j))
    assert s.poles()[0][1].eps1 == pytest.approx(1e-2j)
    s = spec(path="Custom", custom=((1e-2, 1e-2), (1e-3, 2e-3)))
    assert [t for t, _ in s.poles()] == [1e-2, 2e-3]


@pytest.mark.parametrize("kw", [
    dict(t0=2.0), dict(ratio=1.5), dict(count=0), dict(c0=0),
    dict(path="Generic", directions=(1, -1), z=BidiskPoint(0.3, 0.3)),
    dict(path="Generic", directions=(2, 1)),
    dict(path="Custom"), dict(path="Custom", custom=((1e-3, 1e-3), (1e-2, 1e-2))),
    dict(path="Resonant", z=BidiskPoint(0.3, 0)),
])
def test_spec_validation(kw):
    with pytest.raises(ConfigError):
        spec(**kw)


def test_record_fields_and_dominance():
    rec = ex.eval_point(BidiskPoint(0.3, 0), PoleConfig(1e-4, 1e-4), FAST)
    assert rec.axis_cost is not None and rec.generic_cost is None
    assert abs(rec.optimizer_value - rec.axis_cost) <= 0.2
    assert rec.dominance_ok()
    assert rec.g3 <= min(rec.g1, rec.g2)
    assert rec.method and rec.verdict
    assert "wall_time" not in rec.to_dict()
    assert "wall_time" in rec.to_dict(timing=True)


def test_single_point_sweep_equals_eval_point():
    s = spec(count=1)
    records, _ = ex.run_sweep(s)
    rec = ex.eval_point(s.z, s.poles()[0][1], s.options, s.c0, s.t0)
    assert ex.records_to_csv(records) == ex.records_to_csv([rec])


def test_csv_layout_and_determinism():
    a = ex.records_to_csv(ex.run_sweep(spec())[0])
    b = ex.records_to_csv(ex.run_sweep(spec(jobs=2))[0])
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "lemlab-v1"
    assert lines[1].split(",") == list(ex.CSV_COLUMNS)
    rows = ex.read_csv(a)
    assert float(rows[0]["t"]) == 1e-2
    assert float(rows[1]["optimizer_value"]) == pytest.approx(float(rows[1]["optimizer_value"]))
    with pytest.raises(ConfigError):
        ex.read_csv("nope\n")


def test_summary_targets():
    records, summary = ex.run_sweep(spec())
    assert summary.target_name == "three_half_log_z"
    assert summary.target == pytest.approx(1.5 * math.log(0.3))
    assert summary.failures == 0 and summary.dominance_ok
    name, _ = ex.regime_target(BidiskPoint(0.3, -0.3), PoleConfig(1e-3, 1e-3), 0.5)
    assert name == "two_log_z"


def test_resonant_certificates_are_rejected():
    s = spec(path="Resonant", z=BidiskPoint(0.3, -0.3), c0=0.5)
    out = ex.verify_certificates(s)
    assert all(e["status"] == "hypothesis_violated" for e in out)


def test_tampered_costs_fail_a_step():
    s = spec(count=1)
    out = ex.verify_certificates(s, cost_offset=5.0)
    rep = out[0]["report"]
    assert rep.hypothesis and rep.failed_steps and not rep.contradiction_witness


def test_plot_data():
    records, _ = ex.run_sweep(spec())
    lines = ex.plot_data(records).splitlines()
    assert len(lines) == 2
    assert float(lines[0].split()[0]) == pytest.approx(math.log(1e-2))


def test_parse_complex():
    assert ex.parse_complex("0.3+0.1j") == 0.3 + 0.1j
    assert ex.parse_complex([0.5, -1]) == 0.5 - 1j
    with pytest.raises(ConfigError):
        ex.parse_complex("abc")


# -- command line -------------------------------------------------------------

ARGS = ["--starts", "6", "--evals", "300"]


def test_cli_eval(tmp_path, capsys):
    out = tmp_path / "e.json"
    assert cli.main(["eval", "--z", "0.3,0.3j", "--eps", "1e-4,1e-4", "--out", str(out)] + ARGS) == 0
    rec = json.loads(out.read_text())
    assert rec["method"] and rec["generic_cost"] is not None


def test_cli_sweep_files(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"z": [[0.3, 0], [0, 0.3]], "path": "Equal", "t0": 1e-2, "count": 2,
                               "optimizer": {"starts": 6, "evals": 300}}))
    a, b, plot = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "p.txt"
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(a), "--emit-plotdata", str(plot)]) == 0
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(plot.read_text().splitlines()) == 2
    js = tmp_path / "a.json"
    assert cli.main(["sweep", "--config", str(cfg), "--format", "json", "--out", str(js)]) == 0
    assert "summary" in json.loads(js.read_text())


def test_cli_check_exit_code(monkeypatch, tmp_path):
    base = ["sweep", "--z", "0.3,0.3j", "--path", "Equal", "--count", "2", "--out", str(tmp_path / "x")] + ARGS
    assert cli.main(base + ["--check"]) == 0
    monkeypatch.setattr(ex, "BAND_WIDTH", -1.0)
    assert cli.main(base + ["--check"]) == 3


def test_cli_invalid_config(tmp_path, capsys):
    assert cli.main(["eval", "--z", "2,0", "--eps", "1e-3,1e-3"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["code"] == "invalid_config"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"z": [0.3, 0.3], "colour": "red"}))
    assert cli.main(["sweep", "--config", str(bad)]) == 2
    assert cli.main(["sweep", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["eval", "--z", "0.3,0.3"]) == 2


def test_cli_module_error(capsys):
    assert cli.main(["construct", "--kind", "resonant", "--z", "0.05,-0.05", "--eps", "1e-4,1e-4"]) == 1
    assert json.loads(capsys.readouterr().err)["code"] == "assumption_violated"


def test_cli_construct(tmp_path):
    out = tmp_path / "c.json"
    assert cli.main(["construct", "--z", "0.3,0.3j", "--eps", "1e-5,1e-5", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["kind"] == "generic" and d["rescaled"]["boundary_sup"] <= 1 + 1e-10
    assert cli.main(["construct", "--z", "0.3,0", "--eps", "1e-5,1e-5", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["rescaled"]["code"] == "node_escapes"


def test_cli_verify_and_witness_exit(monkeypatch, tmp_path):
    argv = ["verify", "--z", "0.3,0.3j", "--path", "Equal", "--count", "1", "--t0", "1e-5",
            "--out", str(tmp_path / "v.json"), "--audit", "200"] + ARGS
    assert cli.main(argv) == 0
    d = json.loads((tmp_path / "v.json").read_text())
    assert d["witness_found"] is False and d["audit"]["ok"]
    from lemlab.bounds import ChainReport
    monkeypatch.setattr(ChainReport, "contradiction_witness", property(lambda self: True))
    assert cli.main(argv) == 4


def test_cli_lower_bound_constant(capsys):
    assert cli.main(["lower-bound-constant", "--c0", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["CH_prime"] == 4.0
