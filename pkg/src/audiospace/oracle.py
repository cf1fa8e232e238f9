"""Brute-force reference renderer for equivalence testing.

This is a second, deliberately naive implementation of the audible
rules.  It never models devices, messages, sequence numbers, or the
network: it reads the scenario omnisciently, assumes every action is
known to everyone the instant it happens (an ideal network), and
recomputes every speaker's output from first principles.

The protocol engine must produce a byte-identical render log whenever
the simulated network is perfect.  Under a lossy network, the gap
between this ideal and the engine's output IS the cost of the network,
which is what the divergence checks measure.

Shared with the engine: the catalog (content and tap geometry) and the
render-log data types.  Not shared: state tracking, the priority and
volume rules, and segment merging, which are reimplemented here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog, Hit, hit_test
from .renderlog import RenderLog, Segment
from .scenario import (
    Scenario,
    ScenarioValidationError,
    Select,
    SetVolume,
    Stop,
    Tap,
    check_against_catalog,
)

# the audible rules, stated independently of the engine
_GAIN_BY_VOLUME = {"off": None, "quiet": 0.5, "loud": 1.0}
_PERSONAL_GAIN = 1.0


@dataclass(frozen=True)
class _Playing:
    clip_id: int
    start_ms: int
    end_ms: int  # natural end: start + clip duration


def _decision(
    device_id: int,
    t: int,
    playing: dict[int, _Playing | None],
    volume: dict[int, str],
    group_of: dict[int, int],
) -> tuple:
    """What this device emits at time t, as a comparable tuple.

    Shape: (source, clip, offset, gain, reverb, from_device).
    """
    own = playing[device_id]
    if own is not None and own.start_ms <= t < own.end_ms:
        return ("personal", own.clip_id, t - own.start_ms, _PERSONAL_GAIN, False, None)

    gain = _GAIN_BY_VOLUME[volume[device_id]]
    if gain is not None:
        best = None
        for other_id, rec in playing.items():
            if other_id == device_id or group_of[other_id] != group_of[device_id]:
                continue
            if rec is not None and rec.start_ms <= t < rec.end_ms:
                key = (rec.start_ms, other_id)
                if best is None or key < best[0]:
                    best = (key, other_id, rec)
        if best is not None:
            _, other_id, rec = best
            return ("eavesdrop", rec.clip_id, t - rec.start_ms, gain, True, other_id)
    return ("silence", None, None, None, False, None)


def run_oracle(catalog: Catalog, scenario: Scenario) -> RenderLog:
    """Render a scenario the slow, obvious way."""
    problems = check_against_catalog(scenario, catalog)
    if problems:
        raise ScenarioValidationError("; ".join(problems))

    duration = scenario.duration_ms
    device_ids = sorted(spec.device_id for spec in scenario.devices)
    group_of = {spec.device_id: spec.group_id for spec in scenario.devices}

    # per-device change lists, in event order: (t, field, value)
    playing_changes: dict[int, list[tuple[int, _Playing | None]]] = {d: [] for d in device_ids}
    volume_changes: dict[int, list[tuple[int, str]]] = {d: [] for d in device_ids}
    for spec in scenario.devices:
        volume_changes[spec.device_id].append((0, spec.initial_volume.value))

    boundaries = {0, duration}
    for event in scenario.events:
        t = event.t_ms
        action = event.action
        boundaries.add(t)
        clip_id = None
        if isinstance(action, Tap):
            wall = catalog.walls_by_id[action.wall_id]
            result = hit_test(wall, action.x, action.y, catalog.tap_tip_ms)
            if isinstance(result, Hit):
                clip_id = catalog.targets_by_id[result.target_id].clip_id
        elif isinstance(action, Select):
            clip_id = catalog.targets_by_id[action.target_id].clip_id
        elif isinstance(action, Stop):
            playing_changes[event.device_id].append((t, None))
        elif isinstance(action, SetVolume):
            volume_changes[event.device_id].append((t, action.level.value))
        if clip_id is not None:
            end = t + catalog.clips_by_id[clip_id].duration_ms
            playing_changes[event.device_id].append((t, _Playing(clip_id, t, end)))
            boundaries.add(min(end, duration))

    times = sorted(b for b in boundaries if 0 <= b <= duration)

    playing: dict[int, _Playing | None] = {d: None for d in device_ids}
    volume: dict[int, str] = {d: "quiet" for d in device_ids}
    pointers_p = {d: 0 for d in device_ids}
    pointers_v = {d: 0 for d in device_ids}

    open_seg: dict[int, tuple[int, tuple]] = {}  # device -> (t0, decision tuple)
    segments: list[Segment] = []

    def close(device: int, t1: int) -> None:
        t0, (source, clip, offset, gain, reverb, from_device) = open_seg[device]
        if t1 > t0:
            segments.append(
                Segment(device, t0, t1, source, clip, offset, gain, reverb, from_device)
            )

    def advances(old: tuple, old_t0: int, new: tuple, t: int) -> bool:
        """Is `new` at time t just `old` having played on undisturbed?"""
        if old[0] != new[0]:
            return False
        if old[0] == "silence":
            return True
        expected_offset = old[2] + (t - old_t0)
        return (
            old[1] == new[1]
            and new[2] == expected_offset
            and old[3] == new[3]
            and old[4] == new[4]
            and old[5] == new[5]
        )

    for t in times:
        for d in device_ids:  # apply every change due at t before deciding
            changes = playing_changes[d]
            while pointers_p[d] < len(changes) and changes[pointers_p[d]][0] <= t:
                playing[d] = changes[pointers_p[d]][1]
                pointers_p[d] += 1
            vchanges = volume_changes[d]
            while pointers_v[d] < len(vchanges) and vchanges[pointers_v[d]][0] <= t:
                volume[d] = vchanges[pointers_v[d]][1]
                pointers_v[d] += 1
        if t == duration:
            break
        for d in device_ids:
            dec = _decision(d, t, playing, volume, group_of)
            if d not in open_seg:
                open_seg[d] = (t, dec)
            else:
                t0, old = open_seg[d]
                if not advances(old, t0, dec, t):
                    close(d, t)
                    open_seg[d] = (t, dec)

    for d in device_ids:
        close(d, duration)

    ordered = tuple(sorted(segments, key=lambda s: (s.device, s.t0)))
    return RenderLog(duration, tuple(device_ids), ordered)
