import json
import math
from pathlib import Path

import numpy as np
import pytest

import bridgenav as bn

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"

GAP = {
    "name": "gap",
    "dimension": 2,
    "bounds": {"lo": [0, 0], "hi": [200, 100]},
    "seed": 3,
    "limits": {"radius": 2, "v_max": 3, "a_max": 2},
    "obstacles": [
        {"box": {"lo": [90, 0], "hi": [110, 44]}},
        {"box": {"lo": [90, 56], "hi": [110, 100]}},
    ],
    "agents": [
        {"start": [30, 40], "goal": [170, 60]},
        {"start": [30, 60], "goal": [170, 40]},
    ],
}


@pytest.fixture(scope="module")
def gap():
    s = bn.parse_scenario(json.dumps(GAP))
    return s, bn.run(s)


def test_entrance_constants():
    assert bn.entrance_line_length(3, 2) == pytest.approx(0.49226, abs=1e-5)
    assert bn.entrance_turn_time(3, 2) == pytest.approx(2.12132, abs=1e-5)


def test_optimal_connect_reaches_goal_at_rest():
    lim = bn.Limits(1, 3, 2)
    t = bn.optimal_connect([0, 0], [0, 0], [10, 5], [0, 0], lim, 0.05)
    assert t["p"].shape[1] == 2
    np.testing.assert_allclose(t["p"][-1], [10, 5], atol=1e-9)
    np.testing.assert_allclose(t["v"][-1], [0, 0], atol=1e-9)
    assert np.linalg.norm(t["v"], axis=1).max() <= 3 * (1 + 1e-6)
    assert (len(t["p"]) - 1) * 0.05 >= bn.travel_time([0, 0], [10, 5], lim) - 1e-9


def test_geometric_path_avoids_wall():
    wall = [[[90, 0], [110, 0], [110, 80], [90, 80]]]
    path = bn.geometric_path([10, 50], [190, 50], wall, 2, [0, 0], [200, 100], 1.0)
    assert path[0] == [10, 50] and path[-1] == [190, 50]
    assert len(path) > 2
    assert max(p[1] for p in path) > 80


def test_run_is_collision_free(gap):
    s, r = gap
    assert s.agent_count == 2
    assert r.collision_events == (0, 0)
    assert r.bridge_count == 1
    assert len(r.delays) == 2
    m = bn.metrics(r, s)
    assert m["pruned_mismatches"] == 0
    p = r.trajectory(1)["p"]
    np.testing.assert_allclose(p[-1], GAP["agents"][1]["goal"], atol=1e-6)


def test_run_is_deterministic(gap):
    s, r = gap
    assert bn.run(s).trajectory_log() == r.trajectory_log()
    header = r.trajectory_log().splitlines()[0]
    assert header == "agent_id,step,t,px,py,vx,vy,ax,ay,phase"


def test_svg_and_round_trip(gap):
    s, r = gap
    assert r.svg(s).lstrip().startswith("<svg")
    again = bn.parse_scenario(s.to_json())
    assert again.to_json() == s.to_json()


def test_invalid_input():
    with pytest.raises(bn.BridgeNavError, match="line 1"):
        bn.parse_scenario("{")
    bad = dict(GAP, agents=[{"start": [100, 10], "goal": [170, 40]}])
    assert bn.scenario_violations(json.dumps(bad)) == ["agents[0].start: inside an inflated obstacle"]
    with pytest.raises(bn.BridgeNavError):
        bn.parse_scenario(json.dumps(bad))


@pytest.mark.parametrize("name", ["corridor_2d", "duct_3d"])
def test_shipped_scenarios_load(name):
    s = bn.load_scenario(str(SCENARIOS / f"{name}.json"))
    assert s.limits.valid()
    assert math.isfinite(s.tau) and s.tau > 0
