import json

import numpy as np

from strobust import casestudy
from strobust.formula_monitor import explain, run_monitor
from strobust.parser import parse_spec
from strobust.predicate_monitor import MonitorConfig
from strobust.signal import load_csv


def test_f16like_structure():
    case = casestudy.f16like()
    assert "U[0,300]" in case.spec and "1600" in case.spec and "1800" in case.spec
    root = parse_spec(case.spec, case.signal.n)
    assert len(root.args) == 3
    assert case.signal.t_lo == -50 and case.signal.t_hi == 1897


def test_f16like_binding_switches():
    case = casestudy.f16like()
    root = parse_spec(case.spec, 3)
    out = explain(root, case.signal, 0, MonitorConfig(dt_max=50))
    assert not out["root"].violated and len(out["root"]) == 51
    assert out["climb"][0] < out["threat"][0]
    assert out["threat"][50] < out["climb"][50]


def test_robotaxi_structure(tmp_path):
    case = casestudy.robotaxi()
    assert "G[0,90]" in case.spec and "1.0" in case.spec
    casestudy.write_case(case, tmp_path)
    cfg = json.loads((tmp_path / "config.json").read_text())
    assert cfg["d_min"] == 1.0
    agents = load_csv(tmp_path / "agents.csv")
    rel = load_csv(tmp_path / "signal.csv")
    assert agents.n == 4 and rel.n == 2
    assert np.allclose(agents.values[:, :2] - agents.values[:, 2:], rel.values)


def test_robotaxi_envelope_and_lipschitz_bound():
    case = casestudy.robotaxi()
    cfg = MonitorConfig(dt_max=10)
    env2 = run_monitor(parse_spec(case.spec, 2), case.signal, 0, cfg).envelope
    assert not env2.violated
    agents = case.extra_csv["agents.csv"]
    env4 = run_monitor(casestudy.pairwise_distance_formula(), agents, 0, cfg).envelope
    assert len(env4) <= len(env2)
    assert all(env4[i] <= env2[i] for i in range(len(env4)))


def test_robotaxi_fixed():
    case = casestudy.robotaxi_fixed()
    assert case.signal.n == 2 and "sd_out(ball(" in case.spec
    env = run_monitor(parse_spec(case.spec, 2), case.signal, 0, MonitorConfig(dt_max=10)).envelope
    assert not env.violated
