"""Simulation driver: runs a scenario against a catalog.

Time is integer milliseconds.  The run advances through a merged stream
of boundary times (trace events, beacon ticks, datagram deliveries, and
clip natural ends); at each boundary everything due is applied in a
fixed order, then every device's render decision is observed by the
segment builder.  Nothing samples between boundaries, so the output is
exact, and every source of ordering is pinned, so a seed reproduces a
run bit for bit.

Per-boundary order of operations:

  1. datagrams due now are delivered and applied
  2. at t=0, every device announces itself (ascending device id)
  3. trace events at this time fire in file order
  4. on a beacon tick, every device beacons (ascending device id)
  5. datagrams that looped around with zero latency are applied
  6. render decisions are snapshotted

Sends draw network randomness in submission order, so steps 2-4 pin
the RNG stream as well.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from . import protocol
from .catalog import Catalog, Hit, hit_test
from .device import (
    DeviceState,
    Eavesdrop,
    Personal,
    RenderDecision,
    clip_offset,
    eavesdrop_gain,
    render_at,
)
from . import device as device_ops
from .metrics import Metrics, compute_metrics
from .netsim import Network, NetworkStats
from .renderlog import RenderLog, SegmentBuilder
from .scenario import (
    Scenario,
    ScenarioValidationError,
    Select,
    SetVolume,
    Stop,
    SwitchWall,
    Tap,
    TraceEvent,
    check_against_catalog,
)


class InvariantViolation(Exception):
    """The engine produced a render decision the rules forbid."""


@dataclass(frozen=True)
class TapTip:
    """A missed tap; the wall flashes every target outline for a while."""

    t_ms: int
    device_id: int
    wall_id: str
    target_ids: tuple[str, ...]
    tip_duration_ms: int


@dataclass(frozen=True)
class SentMessage:
    t_ms: int
    sender_id: int
    message: protocol.Message
    datagram: bytes


@dataclass(frozen=True)
class RunResult:
    render_log: RenderLog
    messages: tuple[SentMessage, ...]
    metrics: Metrics
    tap_tips: tuple[TapTip, ...]
    network_stats: NetworkStats


class _Boundaries:
    """Min-heap of pending snapshot times, deduplicated."""

    def __init__(self, times):
        self._seen = set(times)
        self._heap = list(self._seen)
        heapq.heapify(self._heap)

    def push(self, t: int) -> None:
        if t not in self._seen:
            self._seen.add(t)
            heapq.heappush(self._heap, t)

    def peek(self) -> int | None:
        return self._heap[0] if self._heap else None

    def pop_at(self, t: int) -> None:
        while self._heap and self._heap[0] == t:
            heapq.heappop(self._heap)


def _check_decision(
    state: DeviceState, catalog: Catalog, t: int, decision: RenderDecision
) -> None:
    """Assert the rendering rules the rest of the system relies on."""
    personal_active = False
    if state.personal is not None:
        clip = catalog.clips_by_id.get(state.personal.clip_id)
        if clip is not None:
            personal_active = clip_offset(state.personal, clip.duration_ms, t) is not None

    if personal_active:
        if not isinstance(decision, Personal):
            raise InvariantViolation(
                f"t={t} device {state.device_id}: own clip active but rendered {decision}"
            )
        if decision.clip_id != state.personal.clip_id:
            raise InvariantViolation(
                f"t={t} device {state.device_id}: rendered clip {decision.clip_id}, "
                f"own record says {state.personal.clip_id}"
            )
        expected = t - state.personal.start_ts_ms
        if decision.offset_ms != expected:
            raise InvariantViolation(
                f"t={t} device {state.device_id}: offset {decision.offset_ms}, expected {expected}"
            )
        return

    if isinstance(decision, Personal):
        raise InvariantViolation(
            f"t={t} device {state.device_id}: rendered personal audio with no active record"
        )
    if isinstance(decision, Eavesdrop):
        expected_gain = eavesdrop_gain(state.volume)
        if expected_gain is None:
            raise InvariantViolation(
                f"t={t} device {state.device_id}: eavesdropping with volume off"
            )
        if decision.gain != expected_gain:
            raise InvariantViolation(
                f"t={t} device {state.device_id}: eavesdrop gain {decision.gain}, "
                f"volume {state.volume.value} implies {expected_gain}"
            )
        if not decision.reverb:
            raise InvariantViolation(
                f"t={t} device {state.device_id}: eavesdropped audio must carry reverb"
            )
        record = state.companions.get(decision.from_device)
        if record is None or record.clip_id != decision.clip_id:
            raise InvariantViolation(
                f"t={t} device {state.device_id}: eavesdrops clip {decision.clip_id} from "
                f"device {decision.from_device}, which no companion record supports"
            )
        if decision.offset_ms != t - record.start_ts_ms:
            raise InvariantViolation(
                f"t={t} device {state.device_id}: eavesdrop offset {decision.offset_ms}, "
                f"expected {t - record.start_ts_ms}"
            )


def run_simulation(
    catalog: Catalog, scenario: Scenario, *, check_invariants: bool = False
) -> RunResult:
    """Execute a scenario and return everything observable about the run."""
    problems = check_against_catalog(scenario, catalog)
    if problems:
        raise ScenarioValidationError("; ".join(problems))

    duration = scenario.duration_ms
    states: dict[int, DeviceState] = {
        spec.device_id: DeviceState(
            device_id=spec.device_id,
            group_id=spec.group_id,
            volume=spec.initial_volume,
            current_wall=spec.initial_wall,
        )
        for spec in scenario.devices
    }
    device_ids = sorted(states)
    net = Network(scenario.network, {s.device_id: s.group_id for s in scenario.devices})

    events_at: dict[int, list[TraceEvent]] = {}
    for event in scenario.events:
        events_at.setdefault(event.t_ms, []).append(event)

    period = scenario.network.beacon_period_ms
    boundaries = _Boundaries(
        [0, duration, *events_at.keys(), *range(period, duration + 1, period)]
    )

    builder = SegmentBuilder(device_ids)
    messages: list[SentMessage] = []
    tap_tips: list[TapTip] = []

    def send_all(sender_id: int, t: int, msgs) -> None:
        for msg in msgs:
            datagram = protocol.encode(msg)
            messages.append(SentMessage(t, sender_id, msg, datagram))
            net.send(sender_id, datagram, t)

    def deliver(batch) -> None:
        for d in batch:
            if d.dest_id in states:
                msg = protocol.decode(d.datagram)
                states[d.dest_id] = device_ops.handle_message(states[d.dest_id], msg)

    def apply_event(event: TraceEvent, t: int) -> None:
        state = states[event.device_id]
        action = event.action
        if isinstance(action, Tap):
            wall = catalog.walls_by_id[action.wall_id]
            result = hit_test(wall, action.x, action.y, catalog.tap_tip_ms)
            if isinstance(result, Hit):
                state, out = device_ops.select_target(state, catalog, result.target_id, t)
                send_all(event.device_id, t, out)
            else:
                tap_tips.append(
                    TapTip(
                        t,
                        event.device_id,
                        action.wall_id,
                        result.outline_target_ids,
                        result.tip_duration_ms,
                    )
                )
        elif isinstance(action, Select):
            state, out = device_ops.select_target(state, catalog, action.target_id, t)
            send_all(event.device_id, t, out)
        elif isinstance(action, SetVolume):
            state = device_ops.set_eavesdrop_volume(state, action.level)
        elif isinstance(action, SwitchWall):
            state = device_ops.switch_wall(state, action.wall_id)
        elif isinstance(action, Stop):
            state, out = device_ops.stop_playback(state, catalog, t)
            send_all(event.device_id, t, out)
        states[event.device_id] = state

    def register_clip_ends(t: int) -> None:
        for state in states.values():
            records = list(state.companions.values())
            if state.personal is not None:
                records.append(state.personal)
            for record in records:
                clip = catalog.clips_by_id.get(record.clip_id)
                if clip is None:
                    continue
                end = record.start_ts_ms + clip.duration_ms
                if t < end < duration:
                    boundaries.push(end)

    while True:
        next_boundary = boundaries.peek()
        next_delivery = net.peek()
        candidates = [c for c in (next_boundary, next_delivery) if c is not None]
        if not candidates:
            break
        t = min(candidates)
        if t > duration:
            break
        boundaries.pop_at(t)

        deliver(net.advance(t))
        if t == 0:
            for device_id in device_ids:
                states[device_id], out = device_ops.hello(states[device_id], 0)
                send_all(device_id, 0, out)
        for event in events_at.get(t, ()):
            apply_event(event, t)
        if t > 0 and t % period == 0:
            for device_id in device_ids:
                states[device_id], out = device_ops.beacon(states[device_id], t)
                send_all(device_id, t, out)
        while net.peek() == t:
            deliver(net.advance(t))

        for device_id in device_ids:
            decision = render_at(states[device_id], catalog, t)
            if check_invariants:
                _check_decision(states[device_id], catalog, t, decision)
            builder.observe(t, device_id, decision)
        register_clip_ends(t)

    render_log = builder.finish(duration)
    return RunResult(
        render_log=render_log,
        messages=tuple(messages),
        metrics=compute_metrics(render_log, catalog),
        tap_tips=tuple(tap_tips),
        network_stats=net.stats,
    )
