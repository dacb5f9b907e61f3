from __future__ import annotations

import json
from pathlib import Path

import pytest

from helpers import single_line
from transit_dtue.cli import main
from transit_dtue.costs import CostModel
from transit_dtue.loading import FlowDistribution
from transit_dtue.reports import emit_reports, heatmap
from transit_dtue.scenario import (
    INITIAL_SETTINGS, Scenario, ScenarioError, generate_initial, scale_demand,
)
from transit_dtue.solvers import SolverConfig, adagdd

ROOT = Path(__file__).resolve().parents[1]
SCEN = ROOT / "scenarios"


def test_uniform_setting(synthetic):
    q = generate_initial("uniform", synthetic)
    counts = [q[k] for k in synthetic.od_options["1-9"] if 18000 <= k.time <= 45000]
    assert len(counts) == 91
    assert counts[:90] == [22] * 90 and counts[90] == 20
    assert counts[-1] == q[("1-9", 45000, "1-9/r1")]


def test_latest_setting(synthetic):
    q = generate_initial("latest", synthetic)
    assert q[("2-10", 44700, "2-10/r1")] == 2000
    assert q.od_total("2-10") == 2000


def test_default_earliest_split(synthetic):
    net = synthetic.with_demand({"1-9": 5})
    q = generate_initial("default-earliest", net)
    pref = net.ods["1-9"].preferred_departure
    assert q[("1-9", 18000, "1-9/r1")] == 2 and q[("1-9", pref, "1-9/r1")] == 3


@pytest.mark.parametrize("setting", INITIAL_SETTINGS)
def test_initial_settings_conserve(synthetic, setting):
    generate_initial(setting, synthetic).validate()


def test_zero_demand_setting(synthetic):
    net = synthetic.with_demand({k: 0 for k in synthetic.ods})
    for s in INITIAL_SETTINGS:
        assert generate_initial(s, net) == FlowDistribution.zeros(net)


def test_missing_preferred_time():
    net = single_line(demand=3, capacity=5)
    with pytest.raises(ScenarioError, match="preferred"):
        generate_initial("default", net)


def test_scale_demand(synthetic):
    assert scale_demand(synthetic, 1.0).to_dict() == synthetic.to_dict()
    net = synthetic.with_demand({"1-9": 5356, "1-10": 14967})
    assert scale_demand(net, 1.65).ods["1-9"].demand == 8837
    assert scale_demand(net, 0.6).ods["1-10"].demand == 8980
    with pytest.raises(ScenarioError):
        scale_demand(net, 0)


def test_scenario_validation(tmp_path):
    base = {"schema_version": 1, "network": "fixture:synthetic4.json"}
    Scenario.from_dict(base)
    for bad in ({"schema_version": 2}, {"demand_scale": 0}, {"solver": "newton"}, {"reports": ["plots"]},
                {"network": "missing.json"}, {"initial": "sometimes.csv"},
                {"solver_config": {"max_outer": 0}}, {"solver_config": {"turbo": True}}):
        with pytest.raises((ScenarioError, ValueError)):
            Scenario.from_dict({**base, **bad}, tmp_path)


def test_scenario_round_trip(tmp_path):
    sc = Scenario.load(SCEN / "synthetic.json")
    p = tmp_path / "again.json"
    p.write_text(json.dumps(sc.to_dict()))
    assert Scenario.load(p).to_dict() == sc.to_dict()


def test_bundled_scenarios_load():
    for p in sorted(SCEN.glob("*.json")):
        sc = Scenario.load(p)
        net = sc.load_network()
        sc.initial_flows(net).validate()


def test_zero_demand_reports(tmp_path, two_od):
    net = two_od.with_demand({k: 0 for k in two_od.ods})
    model = CostModel(net)
    rep = adagdd(model, FlowDistribution.zeros(net), SolverConfig())
    files = emit_reports(rep, tmp_path, ("convergence", "od_costs", "system_cost", "heatmap", "flows", "manifest"),
                         {"name": "zero"}, {"start": 32000, "width": 600, "bins": 2})
    assert {f.name for f in files} >= {"convergence.csv", "od_costs.csv", "system_cost.csv", "heatmap.csv",
                                        "flows.csv", "manifest.json"}
    summary = dict(line.split(",") for line in (tmp_path / "system_cost.csv").read_text().splitlines()[1:])
    assert summary["gap"] == "0" and summary["srg"] == "0" and summary["demand"] == "0"
    for line in (tmp_path / "heatmap.csv").read_text().splitlines()[1:]:
        assert all(c in ("0", "") for c in line.split(",")[1:])
    for f in files:
        assert b"\r\n" not in f.read_bytes()


def test_heatmap_sentinel_for_empty_bins(two_od_model):
    table = two_od_model.evaluate(FlowDistribution(two_od_model.network, [100, 100, 80, 100, 100]))
    hm = heatmap(table, start=21000, width=1200, bins=13)
    assert hm.origins == ["O1", "O2"]
    # every run of the example departs between 08:50 and 09:10
    assert hm.cells[0][9] == pytest.approx(280 / 3000)
    assert all(c is None for i, c in enumerate(hm.cells[0]) if i != 9)
    assert all(c is None or c >= 0 for row in hm.cells for c in row)


def test_cli_run_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(SCEN / "two_od.json"), "--out", str(a), "--trace"]) == 0
    assert main(["run", str(SCEN / "two_od.json"), "--out", str(b), "--trace"]) == 0
    out = capsys.readouterr().out
    assert "termination=" in out
    names = sorted(p.name for p in a.iterdir() if p.name != "timing.json")
    assert "trace.csv" in names and "manifest.json" in names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_cli_overrides(tmp_path):
    out = tmp_path / "o"
    assert main(["run", str(SCEN / "tiny_shared.json"), "--solver", "msa", "--initial", "latest",
                 "--seed", "4", "--demand-scale", "2", "--out", str(out)]) == 0
    m = json.loads((out / "manifest.json").read_text())
    assert m["solver"] == "msa" and m["seed"] == 4
    assert m["scenario"]["initial"] == "latest" and m["final"]["demand"] == 6


def test_cli_multiple_scenarios(tmp_path):
    assert main(["run", str(SCEN / "tiny_shared.json"), str(SCEN / "two_od.json"), "--out", str(tmp_path),
                 "--jobs", "2"]) == 0
    assert (tmp_path / "tiny_shared" / "flows.csv").exists()
    assert (tmp_path / "two_od" / "flows.csv").exists()


def test_cli_oracle(capsys):
    assert main(["oracle", str(SCEN / "tiny_shared.json")]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["min_gap"] == 9000 and res["enumerated"] == 6
    assert main(["oracle", str(SCEN / "synthetic.json")]) == 2


def test_cli_certify(tmp_path, capsys, two_od):
    assert main(["run", str(SCEN / "two_od.json"), "--out", str(tmp_path / "r")]) == 0
    assert main(["certify", str(SCEN / "two_od.json"), str(tmp_path / "r" / "flows.csv")]) == 0
    assert "PASS" in capsys.readouterr().out
    bad = tmp_path / "bad.csv"
    FlowDistribution(two_od, [280, 0, 0, 200, 0]).to_csv(bad)
    assert main(["certify", str(SCEN / "two_od.json"), str(bad)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_errors(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema_version": 9, "network": "fixture:synthetic4.json"}))
    assert main(["run", str(bad)]) == 2
    assert "schema_version" in capsys.readouterr().err
