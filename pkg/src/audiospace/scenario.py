"""Scenario documents: who is in the space and what they do when.

A scenario is a closed description of one run: the participating
devices, the network behavior, and a time-sorted list of user actions.
Running the same scenario against the same catalog always produces the
same output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Any, Union

from .catalog import Catalog
from .device import DEFAULT_VOLUME, VolumeLevel
from .netsim import NetworkConfigError, NetworkModel


class ScenarioError(Exception):
    pass


class ScenarioParseError(ScenarioError):
    pass


class ScenarioValidationError(ScenarioError):
    pass


@dataclass(frozen=True)
class Tap:
    """Finger tap at imagemap pixel (x, y) of a wall."""

    wall_id: str
    x: int
    y: int

    kind = "tap"


@dataclass(frozen=True)
class Select:
    """Direct activation of a known target, skipping hit-testing."""

    target_id: str

    kind = "select"


@dataclass(frozen=True)
class SetVolume:
    level: VolumeLevel

    kind = "set_volume"


@dataclass(frozen=True)
class SwitchWall:
    wall_id: str

    kind = "switch_wall"


@dataclass(frozen=True)
class Stop:
    kind = "stop"


Action = Union[Tap, Select, SetVolume, SwitchWall, Stop]


@dataclass(frozen=True)
class TraceEvent:
    t_ms: int
    device_id: int
    action: Action


@dataclass(frozen=True)
class DeviceSpec:
    device_id: int
    group_id: int
    initial_volume: VolumeLevel = DEFAULT_VOLUME
    initial_wall: str | None = None


@dataclass(frozen=True)
class Scenario:
    duration_ms: int
    devices: tuple[DeviceSpec, ...]
    events: tuple[TraceEvent, ...] = ()
    network: NetworkModel = field(default_factory=NetworkModel)


def _require(doc: dict, key: str, path: str) -> Any:
    if not isinstance(doc, dict):
        raise ScenarioParseError(f"{path}: expected object")
    if key not in doc:
        raise ScenarioParseError(f"{path}: missing key {key!r}")
    return doc[key]


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioParseError(f"{path}: expected integer, got {value!r}")
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ScenarioParseError(f"{path}: expected string, got {value!r}")
    return value


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"{path}: expected number, got {value!r}")
    return float(value)


def _parse_volume(value: Any, path: str) -> VolumeLevel:
    try:
        return VolumeLevel(_as_str(value, path))
    except ValueError:
        raise ScenarioParseError(
            f"{path}: volume must be one of off, quiet, loud; got {value!r}"
        ) from None


def _parse_action(doc: Any, path: str) -> Action:
    kind = _as_str(_require(doc, "type", path), f"{path}.type")
    if kind == "tap":
        return Tap(
            wall_id=_as_str(_require(doc, "wall_id", path), f"{path}.wall_id"),
            x=_as_int(_require(doc, "x", path), f"{path}.x"),
            y=_as_int(_require(doc, "y", path), f"{path}.y"),
        )
    if kind == "select":
        return Select(target_id=_as_str(_require(doc, "target_id", path), f"{path}.target_id"))
    if kind == "set_volume":
        return SetVolume(level=_parse_volume(_require(doc, "level", path), f"{path}.level"))
    if kind == "switch_wall":
        return SwitchWall(wall_id=_as_str(_require(doc, "wall_id", path), f"{path}.wall_id"))
    if kind == "stop":
        return Stop()
    raise ScenarioParseError(f"{path}.type: unknown action type {kind!r}")


def _parse_network(doc: Any) -> NetworkModel:
    if not isinstance(doc, dict):
        raise ScenarioParseError("network: expected object")
    latency = doc.get("latency_ms", [0, 0])
    if not isinstance(latency, list) or len(latency) != 2:
        raise ScenarioParseError("network.latency_ms: expected [min, max]")
    try:
        return NetworkModel(
            seed=_as_int(doc.get("seed", 0), "network.seed"),
            latency_ms=(
                _as_int(latency[0], "network.latency_ms[0]"),
                _as_int(latency[1], "network.latency_ms[1]"),
            ),
            loss_prob=_as_number(doc.get("loss_prob", 0.0), "network.loss_prob"),
            dup_prob=_as_number(doc.get("dup_prob", 0.0), "network.dup_prob"),
            beacon_period_ms=_as_int(doc.get("beacon_period_ms", 1000), "network.beacon_period_ms"),
        )
    except NetworkConfigError as exc:
        raise ScenarioValidationError(f"network: {exc}") from exc


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario: top level must be an object")

    duration_ms = _as_int(_require(doc, "duration_ms", "scenario"), "duration_ms")

    devices = []
    for i, ddoc in enumerate(doc.get("devices", [])):
        path = f"devices[{i}]"
        wall = ddoc.get("initial_wall") if isinstance(ddoc, dict) else None
        if wall is not None:
            wall = _as_str(wall, f"{path}.initial_wall")
        volume = DEFAULT_VOLUME
        if isinstance(ddoc, dict) and "initial_volume" in ddoc:
            volume = _parse_volume(ddoc["initial_volume"], f"{path}.initial_volume")
        devices.append(
            DeviceSpec(
                device_id=_as_int(_require(ddoc, "device_id", path), f"{path}.device_id"),
                group_id=_as_int(_require(ddoc, "group_id", path), f"{path}.group_id"),
                initial_volume=volume,
                initial_wall=wall,
            )
        )

    events = []
    for i, edoc in enumerate(doc.get("events", [])):
        path = f"events[{i}]"
        events.append(
            TraceEvent(
                t_ms=_as_int(_require(edoc, "t_ms", path), f"{path}.t_ms"),
                device_id=_as_int(_require(edoc, "device_id", path), f"{path}.device_id"),
                action=_parse_action(_require(edoc, "action", path), f"{path}.action"),
            )
        )

    network = _parse_network(doc.get("network", {}))
    scenario = Scenario(duration_ms, tuple(devices), tuple(events), network)
    _validate(scenario)
    return scenario


def load_scenario(source: Union[bytes, str, IO]) -> Scenario:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ScenarioParseError(f"malformed scenario document: {exc}") from exc
    return scenario_from_dict(doc)


def _validate(scenario: Scenario) -> None:
    if scenario.duration_ms <= 0:
        raise ScenarioValidationError("duration_ms must be positive")
    if not scenario.devices:
        raise ScenarioValidationError("scenario needs at least one device")

    seen: set[int] = set()
    for spec in scenario.devices:
        if spec.device_id in seen:
            raise ScenarioValidationError(f"duplicate device_id {spec.device_id}")
        seen.add(spec.device_id)

    prev = 0
    for i, event in enumerate(scenario.events):
        if event.t_ms < prev:
            raise ScenarioValidationError(
                f"events[{i}] at t={event.t_ms} is earlier than its predecessor at t={prev}"
            )
        prev = event.t_ms
        if not 0 <= event.t_ms <= scenario.duration_ms:
            raise ScenarioValidationError(
                f"events[{i}] at t={event.t_ms} is outside [0, {scenario.duration_ms}]"
            )
        if event.device_id not in seen:
            raise ScenarioValidationError(
                f"events[{i}] references unknown device {event.device_id}"
            )


def check_against_catalog(scenario: Scenario, catalog: Catalog) -> list[str]:
    """Cross-checks that need content: walls, targets, tap coordinates.

    Returns a list of problems; empty means the pair is runnable.
    """
    problems = []
    for spec in scenario.devices:
        if spec.initial_wall is not None and spec.initial_wall not in catalog.walls_by_id:
            problems.append(
                f"device {spec.device_id} starts at unknown wall {spec.initial_wall!r}"
            )
    for i, event in enumerate(scenario.events):
        action = event.action
        where = f"events[{i}] (t={event.t_ms})"
        if isinstance(action, (Tap, SwitchWall)):
            wall = catalog.walls_by_id.get(action.wall_id)
            if wall is None:
                problems.append(f"{where}: unknown wall {action.wall_id!r}")
            elif isinstance(action, Tap) and not (
                0 <= action.x < wall.width_px and 0 <= action.y < wall.height_px
            ):
                problems.append(
                    f"{where}: tap ({action.x}, {action.y}) outside "
                    f"{wall.width_px}x{wall.height_px} wall {action.wall_id!r}"
                )
        elif isinstance(action, Select) and action.target_id not in catalog.targets_by_id:
            problems.append(f"{where}: unknown target {action.target_id!r}")
    return problems


# --- serialization ----------------------------------------------------------


def _action_to_dict(action: Action) -> dict:
    if isinstance(action, Tap):
        return {"type": "tap", "wall_id": action.wall_id, "x": action.x, "y": action.y}
    if isinstance(action, Select):
        return {"type": "select", "target_id": action.target_id}
    if isinstance(action, SetVolume):
        return {"type": "set_volume", "level": action.level.value}
    if isinstance(action, SwitchWall):
        return {"type": "switch_wall", "wall_id": action.wall_id}
    return {"type": "stop"}


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "duration_ms": scenario.duration_ms,
        "network": {
            "seed": scenario.network.seed,
            "latency_ms": list(scenario.network.latency_ms),
            "loss_prob": scenario.network.loss_prob,
            "dup_prob": scenario.network.dup_prob,
            "beacon_period_ms": scenario.network.beacon_period_ms,
        },
        "devices": [
            {
                "device_id": d.device_id,
                "group_id": d.group_id,
                "initial_volume": d.initial_volume.value,
            }
            | ({"initial_wall": d.initial_wall} if d.initial_wall is not None else {})
            for d in scenario.devices
        ],
        "events": [
            {"t_ms": e.t_ms, "device_id": e.device_id, "action": _action_to_dict(e.action)}
            for e in scenario.events
        ],
    }


def scenario_to_json(scenario: Scenario, indent: int | None = None) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=indent)
