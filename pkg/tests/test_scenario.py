import json

import pytest

from gantry.errors import ValidationError
from gantry.scenario import load_scenario, run_scenario, run_scenario_file
from gantry.testbed import WALKTHROUGH_SCENARIO, build_engine


def test_walkthrough_file_parses():
    steps = load_scenario(WALKTHROUGH_SCENARIO)
    assert steps[0].op == "cluster_init"
    assert [s.at for s in steps] == sorted(s.at for s in steps)


def test_steps_advance_the_clock(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"steps": [
        {"at": 100, "op": "advance_clock", "params": {"dt": 0}},
        {"at": 250, "op": "advance_clock", "params": {"dt": 0}},
    ]}))
    engine = build_engine(state_dir=str(tmp_path / "state"))
    run_scenario_file(engine, path)
    assert engine.world.clock.now == 250.0


def test_past_activation_times_do_not_rewind(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"steps": [
        {"at": 100, "op": "advance_clock", "params": {"dt": 500}},
        {"at": 200, "op": "advance_clock", "params": {"dt": 0}},
    ]}))
    engine = build_engine(state_dir=str(tmp_path / "state"))
    run_scenario_file(engine, path)
    assert engine.world.clock.now == 600.0


def test_strict_mode_raises_on_failed_step(tmp_path):
    engine = build_engine(state_dir=str(tmp_path / "state"))
    steps = load_scenario(WALKTHROUGH_SCENARIO)
    steps.insert(0, steps[-1])  # instance op before the cluster exists
    with pytest.raises(ValidationError) as err:
        run_scenario(engine, steps)
    assert err.value.code == "scenario-step-failed"


def test_malformed_scenario_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"steps": [{"params": {}}]}))
    with pytest.raises(ValidationError):
        load_scenario(path)
    path.write_text(json.dumps({"not_steps": []}))
    with pytest.raises(ValidationError):
        load_scenario(path)
