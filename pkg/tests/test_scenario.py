from __future__ import annotations

import pytest

from audiospace.device import VolumeLevel
from audiospace.netsim import NetworkModel
from audiospace.scenario import (
    DeviceSpec,
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    Select,
    SetVolume,
    Stop,
    SwitchWall,
    Tap,
    TraceEvent,
    check_against_catalog,
    load_scenario,
    scenario_from_dict,
    scenario_to_dict,
    scenario_to_json,
)

DOC = {
    "duration_ms": 30_000,
    "network": {"seed": 5, "latency_ms": [10, 50], "loss_prob": 0.1, "dup_prob": 0.0},
    "devices": [
        {"device_id": 1, "group_id": 1, "initial_volume": "loud", "initial_wall": "w"},
        {"device_id": 2, "group_id": 1},
    ],
    "events": [
        {"t_ms": 100, "device_id": 1, "action": {"type": "tap", "wall_id": "w", "x": 3, "y": 4}},
        {"t_ms": 200, "device_id": 2, "action": {"type": "select", "target_id": "ta"}},
        {"t_ms": 300, "device_id": 1, "action": {"type": "set_volume", "level": "off"}},
        {"t_ms": 400, "device_id": 1, "action": {"type": "switch_wall", "wall_id": "w2"}},
        {"t_ms": 500, "device_id": 2, "action": {"type": "stop"}},
    ],
}


def test_parse_full_document():
    sc = scenario_from_dict(DOC)
    assert sc.duration_ms == 30_000
    assert sc.network == NetworkModel(seed=5, latency_ms=(10, 50), loss_prob=0.1)
    assert sc.devices[0].initial_volume is VolumeLevel.LOUD
    assert sc.devices[0].initial_wall == "w"
    assert sc.devices[1].initial_volume is VolumeLevel.QUIET  # the default
    assert [type(e.action) for e in sc.events] == [Tap, Select, SetVolume, SwitchWall, Stop]


def test_defaults_when_network_omitted():
    sc = scenario_from_dict(
        {"duration_ms": 1000, "devices": [{"device_id": 1, "group_id": 1}]}
    )
    assert sc.network == NetworkModel()
    assert sc.network.beacon_period_ms == 1000
    assert sc.events == ()


def test_round_trip():
    sc = scenario_from_dict(DOC)
    assert scenario_from_dict(scenario_to_dict(sc)) == sc
    assert load_scenario(scenario_to_json(sc)) == sc


def test_malformed_documents():
    with pytest.raises(ScenarioParseError):
        load_scenario("nope")
    with pytest.raises(ScenarioParseError):
        scenario_from_dict({"devices": []})  # duration missing
    with pytest.raises(ScenarioParseError):
        scenario_from_dict(
            {
                "duration_ms": 10,
                "devices": [{"device_id": 1, "group_id": 1}],
                "events": [{"t_ms": 1, "device_id": 1, "action": {"type": "warp"}}],
            }
        )
    with pytest.raises(ScenarioParseError):
        scenario_from_dict(
            {
                "duration_ms": 10,
                "devices": [{"device_id": 1, "group_id": 1, "initial_volume": "max"}],
            }
        )


def test_validation_rules():
    with pytest.raises(ScenarioValidationError, match="positive"):
        scenario_from_dict({"duration_ms": 0, "devices": [{"device_id": 1, "group_id": 1}]})
    with pytest.raises(ScenarioValidationError, match="at least one device"):
        scenario_from_dict({"duration_ms": 10, "devices": []})
    with pytest.raises(ScenarioValidationError, match="duplicate device_id"):
        scenario_from_dict(
            {
                "duration_ms": 10,
                "devices": [{"device_id": 1, "group_id": 1}, {"device_id": 1, "group_id": 2}],
            }
        )


def test_events_must_be_time_sorted():
    doc = {
        "duration_ms": 1000,
        "devices": [{"device_id": 1, "group_id": 1}],
        "events": [
            {"t_ms": 500, "device_id": 1, "action": {"type": "stop"}},
            {"t_ms": 100, "device_id": 1, "action": {"type": "stop"}},
        ],
    }
    with pytest.raises(ScenarioValidationError, match="earlier than"):
        scenario_from_dict(doc)


def test_event_bounds_and_device_references():
    base = {"duration_ms": 1000, "devices": [{"device_id": 1, "group_id": 1}]}
    with pytest.raises(ScenarioValidationError, match="outside"):
        scenario_from_dict(
            {**base, "events": [{"t_ms": 1001, "device_id": 1, "action": {"type": "stop"}}]}
        )
    with pytest.raises(ScenarioValidationError, match="unknown device"):
        scenario_from_dict(
            {**base, "events": [{"t_ms": 1, "device_id": 9, "action": {"type": "stop"}}]}
        )


def test_bad_network_config_is_a_validation_error():
    with pytest.raises(ScenarioValidationError, match="loss_prob"):
        scenario_from_dict(
            {
                "duration_ms": 10,
                "network": {"loss_prob": 2.0},
                "devices": [{"device_id": 1, "group_id": 1}],
            }
        )


def test_check_against_catalog(tiny_catalog):
    sc = Scenario(
        duration_ms=10_000,
        devices=(DeviceSpec(1, 1, initial_wall="ghost"),),
        events=(
            TraceEvent(100, 1, Tap("w", 500, 5)),
            TraceEvent(200, 1, Tap("nowhere", 1, 1)),
            TraceEvent(300, 1, Select("missing")),
            TraceEvent(400, 1, SwitchWall("w2")),
        ),
    )
    problems = check_against_catalog(sc, tiny_catalog)
    assert len(problems) == 4
    assert any("ghost" in p for p in problems)
    assert any("outside" in p for p in problems)
    assert any("nowhere" in p for p in problems)
    assert any("missing" in p for p in problems)


def test_clean_scenario_has_no_problems(tiny_catalog):
    sc = Scenario(
        duration_ms=10_000,
        devices=(DeviceSpec(1, 1, initial_wall="w"),),
        events=(TraceEvent(100, 1, Tap("w", 5, 5)), TraceEvent(200, 1, Select("tb"))),
    )
    assert check_against_catalog(sc, tiny_catalog) == []
