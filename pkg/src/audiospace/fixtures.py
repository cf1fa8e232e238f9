"""Built-in demo content: a three-room house tour and a sample visit.

The demo catalog is a 51-exhibit tour spread over nine walls, with
narration lengths between 5.5 and 27 seconds plus one long outlier at
59 seconds.  The demo session is a 25-minute visit by two companions
who alternate selections, fiddle with volume, and miss a tap or two.
Both are deterministic so the committed fixture files can be checked
against the builders.
"""

from __future__ import annotations

import os

from .catalog import Catalog, Clip, Room, Rect, Target, Wall, catalog_to_json
from .device import VolumeLevel
from .netsim import NetworkModel
from .scenario import (
    DeviceSpec,
    Scenario,
    Select,
    SetVolume,
    Stop,
    Tap,
    TraceEvent,
    scenario_to_json,
)

CLIP_COUNT = 51
LONG_CLIP_ID = 51
LONG_CLIP_MS = 59_000

_WALL_W = 1024
_WALL_H = 768
_COLS = 3
_ROWS = 2
_SLOT_W = 280
_SLOT_H = 330

def _slot_rect(slot: int) -> Rect:
    col, row = slot % _COLS, slot // _COLS
    return Rect(10 + col * 340, 20 + row * 370, _SLOT_W, _SLOT_H)


def _duration_ms(clip_id: int) -> int:
    if clip_id == LONG_CLIP_ID:
        return LONG_CLIP_MS
    return 5500 + (clip_id * 4177) % 21501  # lands in [5500, 27000]


def build_demo_catalog() -> Catalog:
    clips = tuple(Clip(i, _duration_ms(i), title=f"Exhibit {i}") for i in range(1, CLIP_COUNT + 1))

    wall_ids = [f"r{r}-w{w}" for r in (1, 2, 3) for w in ("a", "b", "c")]
    rooms = tuple(
        Room(f"room-{r}", tuple(f"r{r}-w{w}" for w in ("a", "b", "c"))) for r in (1, 2, 3)
    )

    walls = []
    clip_id = 1
    per_wall = _COLS * _ROWS
    for wall_id in wall_ids:
        targets = []
        for slot in range(per_wall):
            if clip_id > CLIP_COUNT:
                break
            targets.append(Target(f"obj-{clip_id:02d}", _slot_rect(slot), clip_id))
            clip_id += 1
        walls.append(
            Wall(wall_id, f"room-{wall_id[1]}", _WALL_W, _WALL_H, tuple(targets))
        )

    return Catalog(rooms=rooms, walls=tuple(walls), clips=clips, tap_tip_ms=1500)


def build_demo_scenario() -> Scenario:
    """A 25-minute two-visitor session with about forty selections."""
    events = []
    for k in range(40):
        events.append(
            TraceEvent(
                t_ms=10_000 + k * 36_000,
                device_id=1 + k % 2,
                action=Select(f"obj-{(k * 7) % CLIP_COUNT + 1:02d}"),
            )
        )
    events += [
        TraceEvent(50_500, 1, Tap("r1-wa", 0, 0)),  # gap between targets: a miss
        TraceEvent(70_250, 2, Tap("r1-wa", 15, 25)),  # lands inside obj-01
        TraceEvent(200_000, 2, SetVolume(VolumeLevel.LOUD)),
        TraceEvent(400_000, 2, SetVolume(VolumeLevel.QUIET)),
        TraceEvent(600_500, 1, Stop()),
        TraceEvent(800_000, 1, SetVolume(VolumeLevel.OFF)),
        TraceEvent(900_000, 1, SetVolume(VolumeLevel.QUIET)),
    ]
    events.sort(key=lambda e: e.t_ms)
    return Scenario(
        duration_ms=1_500_000,
        devices=(
            DeviceSpec(device_id=1, group_id=1, initial_wall="r1-wa"),
            DeviceSpec(device_id=2, group_id=1, initial_wall="r1-wa"),
        ),
        events=tuple(events),
        network=NetworkModel(seed=7),
    )


def write_fixture_files(directory: str) -> list[str]:
    """Regenerate the committed fixture JSON files; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    catalog_path = os.path.join(directory, "house_catalog.json")
    scenario_path = os.path.join(directory, "demo_session.json")
    with open(catalog_path, "w", encoding="utf-8") as fh:
        fh.write(catalog_to_json(build_demo_catalog(), indent=2) + "\n")
    with open(scenario_path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_json(build_demo_scenario(), indent=2) + "\n")
    return [catalog_path, scenario_path]
