"""
Tests for scenario documents: defaults, strict keys and error paths.
"""

import json

import pytest

from utils.config import DEFAULT_SCENARIO
from utils.scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    scenario_from_dict,
    to_plain,
)
from utils.world import PanelSpec


def test_empty_document_gives_defaults():
    assert scenario_from_dict({}) == Scenario()


def test_shipped_default_matches_the_defaults():
    assert load_scenario(DEFAULT_SCENARIO) == Scenario()


def test_plain_form_round_trips():
    scenario = Scenario(seed=42, max_sim_s=90.0)
    assert scenario_from_dict(json.loads(json.dumps(to_plain(scenario)))) == scenario


def test_nested_sections_override_single_fields():
    scenario = scenario_from_dict({
        "layout": {"panels": [{"length_m": 0.8, "width_m": 0.5}], "extra_bump_y_m": [0.4]},
        "kinematics": {"track_width_m": 0.25},
        "faults": {"force_low_battery_at_column": 2},
        "presets": {"x1_set_up": 220},
    })
    assert scenario.layout.panels == (PanelSpec(0.8, 0.5, 30.0),)
    assert scenario.layout.extra_bump_y_m == (0.4,)
    assert scenario.kinematics.track_width_m == 0.25
    assert scenario.kinematics.wheel_diameter_m == 0.113
    assert scenario.faults.force_low_battery_at_column == 2
    assert scenario.presets.x1_set_up == 220


@pytest.mark.parametrize("doc,fragment", [
    ({"bogus": 1}, "unknown key 'bogus'"),
    ({"kinematics": {"track_width": 0.2}}, "unknown key 'kinematics.track_width'"),
    ({"layout": {"panels": [{"length_m": 1.0, "width_m": 0.6, "tilt": 3}]}}, "layout.panels[0].tilt"),
])
def test_unknown_keys_are_rejected_with_their_path(doc, fragment):
    with pytest.raises(ScenarioError) as excinfo:
        scenario_from_dict(doc)
    assert fragment in str(excinfo.value)


@pytest.mark.parametrize("doc", [
    {"seed": 1.5},
    {"seed": -1},
    {"dt_s": "fast"},
    {"calibrate_speed_band": 1},
    {"layout": {"panels": [{"width_m": 0.6}]}},
    {"layout": {"panels": [{"length_m": 1.0, "width_m": 0.6, "incline_deg": 45}]}},
    {"layout": {"panels": []}},
    {"charger": {"v_cv": 12.0}},
    {"kinematics": {"track_width_m": 0}},
    {"mission_cfg": "fast"},
])
def test_invalid_values_raise_scenario_error(doc):
    with pytest.raises(ScenarioError):
        scenario_from_dict(doc)


def test_scenario_error_is_a_value_error():
    assert issubclass(ScenarioError, ValueError)


def test_bad_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json", encoding="utf-8")
    with pytest.raises(ScenarioError):
        load_scenario(path)


def test_missing_file_is_an_os_error(tmp_path):
    with pytest.raises(OSError):
        load_scenario(tmp_path / "nowhere.json")
