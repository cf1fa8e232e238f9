from __future__ import annotations

import pytest

from audiospace.catalog import Catalog, Clip, Rect, Room, Target, Wall
from audiospace.fixtures import build_demo_catalog
from audiospace.netsim import NetworkModel
from audiospace.scenario import DeviceSpec, Scenario, TraceEvent


@pytest.fixture(scope="session")
def demo_catalog() -> Catalog:
    return build_demo_catalog()


@pytest.fixture()
def tiny_catalog() -> Catalog:
    # one wall, two targets; clip 3 is deliberately orphaned
    wall = Wall(
        "w",
        "room",
        100,
        100,
        targets=(
            Target("ta", Rect(0, 0, 10, 10), 1),
            Target("tb", Rect(20, 0, 10, 10), 2),
        ),
    )
    bare = Wall("w2", "room", 50, 50, targets=())
    return Catalog(
        rooms=(Room("room", ("w", "w2")),),
        walls=(wall, bare),
        clips=(Clip(1, 10_000), Clip(2, 5_000), Clip(3, 7_000)),
        tap_tip_ms=1500,
    )


def make_scenario(
    events: list[TraceEvent],
    duration_ms: int = 60_000,
    n_devices: int = 2,
    network: NetworkModel | None = None,
) -> Scenario:
    return Scenario(
        duration_ms=duration_ms,
        devices=tuple(DeviceSpec(device_id=i + 1, group_id=1) for i in range(n_devices)),
        events=tuple(sorted(events, key=lambda e: e.t_ms)),
        network=network if network is not None else NetworkModel(),
    )
