"""Randomized stress tools.

Two fuzzers live here.  The scenario fuzzer generates random but valid
user behavior and replays it through the full engine with invariant
checking on, under progressively nastier networks; any rule violation
is collected rather than raised so a long campaign reports everything
it found.  The decoder fuzzer throws random and mutated byte strings at
the datagram parser, where the only acceptable outcomes are a decoded
message or a typed protocol error.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import protocol
from .catalog import Catalog
from .device import VolumeLevel
from .engine import InvariantViolation, run_simulation
from .netsim import NetworkModel
from .oracle import run_oracle
from .renderlog import RenderLogError, log_from_jsonl
from .scenario import (
    DeviceSpec,
    Scenario,
    Select,
    SetVolume,
    Stop,
    SwitchWall,
    Tap,
    TraceEvent,
)

DEFAULT_LOSS_LADDER = (0.0, 0.1, 0.3, 0.5)

_VOLUMES = (VolumeLevel.OFF, VolumeLevel.QUIET, VolumeLevel.LOUD)


def generate_scenario(
    catalog: Catalog,
    seed: int,
    n_events: int,
    n_devices: int = 2,
    duration_ms: int = 120_000,
    network: NetworkModel | None = None,
) -> Scenario:
    """Random but always-valid scenario; same inputs, same scenario."""
    rng = random.Random(seed)
    wall_ids = sorted(catalog.walls_by_id)
    target_ids = sorted(catalog.targets_by_id)

    devices = tuple(
        DeviceSpec(
            device_id=i + 1,
            group_id=1,
            initial_volume=rng.choice(_VOLUMES),
            initial_wall=rng.choice(wall_ids),
        )
        for i in range(n_devices)
    )

    events = []
    for t in sorted(rng.randint(0, duration_ms) for _ in range(n_events)):
        device_id = rng.randint(1, n_devices)
        roll = rng.random()
        if roll < 0.40:
            action = Select(rng.choice(target_ids))
        elif roll < 0.60:
            wall = catalog.walls_by_id[rng.choice(wall_ids)]
            action = Tap(
                wall.wall_id,
                rng.randrange(wall.width_px),
                rng.randrange(wall.height_px),
            )
        elif roll < 0.75:
            action = SetVolume(rng.choice(_VOLUMES))
        elif roll < 0.85:
            action = SwitchWall(rng.choice(wall_ids))
        else:
            action = Stop()
        events.append(TraceEvent(t, device_id, action))

    return Scenario(
        duration_ms=duration_ms,
        devices=devices,
        events=tuple(events),
        network=network if network is not None else NetworkModel(),
    )


@dataclass
class FuzzReport:
    runs: int = 0
    events_replayed: int = 0
    oracle_checked: int = 0
    oracle_mismatches: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "events_replayed": self.events_replayed,
            "oracle_checked": self.oracle_checked,
            "oracle_mismatches": self.oracle_mismatches,
            "ok": self.ok,
            "violations": list(self.violations),
        }


def run_fuzz(
    catalog: Catalog,
    seed: int,
    events_per_run: int,
    runs: int,
    loss_ladder: tuple[float, ...] = DEFAULT_LOSS_LADDER,
) -> FuzzReport:
    """Replay random behavior under each loss rate, checking every
    render decision against the priority, volume, and offset rules and
    every produced log against the exact-tiling and round-trip rules.
    The loss-0 rung runs over the identity network and additionally
    checks byte equivalence against the omniscient reference."""
    master = random.Random(seed)
    report = FuzzReport()
    for _ in range(runs):
        for loss in loss_ladder:
            net_seed = master.randrange(2**32)
            scn_seed = master.randrange(2**32)
            if loss == 0.0:
                network = NetworkModel(seed=net_seed)
            else:
                network = NetworkModel(
                    seed=net_seed,
                    latency_ms=(0, 100),
                    loss_prob=loss,
                    dup_prob=0.05,
                )
            scenario = generate_scenario(
                catalog,
                seed=scn_seed,
                n_events=events_per_run,
                n_devices=master.choice((2, 2, 3)),
                network=network,
            )
            report.runs += 1
            report.events_replayed += len(scenario.events)
            where = f"loss={loss} net_seed={net_seed} scenario_seed={scn_seed}"
            try:
                result = run_simulation(catalog, scenario, check_invariants=True)
                roundtrip_check(result.render_log.to_jsonl())
            except (InvariantViolation, RenderLogError) as exc:
                report.violations.append(f"{where}: {exc}")
                continue
            if network.is_identity:
                reference = run_oracle(catalog, scenario).to_jsonl()
                if result.render_log.to_jsonl() != reference:
                    report.oracle_mismatches += 1
                    report.violations.append(f"{where}: diverged from reference log")
                report.oracle_checked += 1
    return report


def roundtrip_check(log_jsonl: str) -> None:
    """Parsed-and-reserialized canonical JSONL must be byte-identical."""
    log = log_from_jsonl(log_jsonl)
    again = log.to_jsonl()
    if again != log_jsonl:
        raise RenderLogError("canonical JSONL did not round-trip")


@dataclass
class DecodeFuzzReport:
    attempts: int = 0
    decoded: int = 0
    rejected: int = 0
    crashes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.crashes

    def to_dict(self) -> dict:
        return {
            "attempts": self.attempts,
            "decoded": self.decoded,
            "rejected": self.rejected,
            "ok": self.ok,
            "crashes": self.crashes[:20],
        }


def fuzz_decode(seed: int, count: int) -> DecodeFuzzReport:
    """Feed the decoder garbage: pure noise, truncations, and bit flips
    of valid datagrams.  Anything but a message or a protocol error is
    recorded as a crash."""
    rng = random.Random(seed)
    report = DecodeFuzzReport()

    valid = [
        protocol.encode(protocol.Hello(1, 1, 0, 42)),
        protocol.encode(protocol.Start(1, 2, 1000, 10, 1000)),
        protocol.encode(protocol.Stop(2, 3, 2000, 8, 2000)),
        protocol.encode(protocol.Beacon(2, 4, 3000, True, 8, 1000)),
        protocol.encode(protocol.Beacon(1, 5, 4000, False, 0, 0)),
    ]

    for _ in range(count):
        roll = rng.random()
        if roll < 0.35:
            data = rng.randbytes(rng.randint(0, 40))
        elif roll < 0.60:
            base = bytearray(rng.choice(valid))
            for _ in range(rng.randint(1, 4)):
                base[rng.randrange(len(base))] ^= 1 << rng.randrange(8)
            data = bytes(base)
        elif roll < 0.80:
            base = rng.choice(valid)
            cut = rng.randint(0, len(base))
            data = base[:cut] if rng.random() < 0.5 else base + rng.randbytes(rng.randint(1, 8))
        else:
            data = rng.choice(valid)
        report.attempts += 1
        try:
            protocol.decode(data)
            report.decoded += 1
        except protocol.ProtocolError:
            report.rejected += 1
        except Exception as exc:  # noqa: BLE001 - the fuzzer's whole point
            report.crashes.append(f"{type(exc).__name__}: {exc!r} on {data.hex()}")
    return report
