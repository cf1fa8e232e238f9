"""Per-device playback state machine.

Each guidebook keeps a record of what it is playing and what it last
heard from every companion, and derives what its speaker should emit
from those records alone.  State is immutable; every operation returns
a new state plus the control messages it wants broadcast, which keeps
replays and equivalence checks trivial.

Rendering rules, in priority order:

  1. the device's own active clip, full volume, no effects
  2. one companion clip, chosen by earliest start (ties to the lowest
     device id), at the listener's eavesdrop volume, with reverb
  3. silence

Clips are never mixed.  A clip is active on [start, start + duration);
natural ends are computed from the clip duration by every party, so no
message marks them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Union

from .catalog import Catalog, resolve_clip
from .protocol import Beacon, Hello, Message, Start, Stop

logger = logging.getLogger(__name__)

DEFAULT_QUIET_GAIN = 0.5
PERSONAL_GAIN = 1.0


class VolumeLevel(str, Enum):
    """Receiver-side volume for eavesdropped audio; personal playback
    is always full volume."""

    OFF = "off"
    QUIET = "quiet"
    LOUD = "loud"


DEFAULT_VOLUME = VolumeLevel.QUIET


def eavesdrop_gain(level: VolumeLevel, quiet_gain: float = DEFAULT_QUIET_GAIN) -> float | None:
    """Gain multiplier for a volume level; None means render nothing."""
    if level is VolumeLevel.OFF:
        return None
    if level is VolumeLevel.QUIET:
        return quiet_gain
    return PERSONAL_GAIN  # loud is exactly the personal volume


@dataclass(frozen=True)
class PlaybackRecord:
    """A clip somebody started and has not explicitly stopped."""

    clip_id: int
    start_ts_ms: int


@dataclass(frozen=True)
class DeviceState:
    device_id: int
    group_id: int
    volume: VolumeLevel = DEFAULT_VOLUME
    current_wall: str | None = None
    personal: PlaybackRecord | None = None
    companions: dict[int, PlaybackRecord] = field(default_factory=dict)
    last_seq: dict[int, int] = field(default_factory=dict)
    next_seq: int = 1


@dataclass(frozen=True)
class Silence:
    source = "silence"
    reverb = False


@dataclass(frozen=True)
class Personal:
    clip_id: int
    offset_ms: int
    gain: float = PERSONAL_GAIN

    source = "personal"
    reverb = False


@dataclass(frozen=True)
class Eavesdrop:
    clip_id: int
    offset_ms: int
    gain: float
    from_device: int

    source = "eavesdrop"
    reverb = True  # effect applied to overheard audio only


RenderDecision = Union[Silence, Personal, Eavesdrop]


class DeviceError(Exception):
    pass


class FutureStartError(DeviceError):
    """A playback record starts after the time being rendered."""


def clip_offset(record: PlaybackRecord, duration_ms: int, now_ms: int) -> int | None:
    """Position inside the clip at now_ms, or None once it has ended.

    A mid-clip joiner computes its offset the same way: elapsed time
    since the original start, not since it learned about the clip.
    """
    if now_ms < record.start_ts_ms:
        raise FutureStartError(
            f"clip {record.clip_id} starts at {record.start_ts_ms}, asked about {now_ms}"
        )
    elapsed = now_ms - record.start_ts_ms
    if elapsed >= duration_ms:
        return None
    return elapsed


def _is_active(record: PlaybackRecord | None, catalog: Catalog, now_ms: int) -> bool:
    if record is None:
        return False
    clip = catalog.clips_by_id.get(record.clip_id)
    if clip is None:
        logger.warning("record references clip %d missing from catalog", record.clip_id)
        return False
    return clip_offset(record, clip.duration_ms, now_ms) is not None


def _emit(state: DeviceState, build) -> tuple[DeviceState, Message]:
    msg = build(state.next_seq)
    return replace(state, next_seq=state.next_seq + 1), msg


def hello(state: DeviceState, now_ms: int) -> tuple[DeviceState, list[Message]]:
    """Announce membership; sent once when a device joins the network."""
    state, msg = _emit(
        state, lambda seq: Hello(state.device_id, seq, now_ms, state.group_id)
    )
    return state, [msg]


def select_target(
    state: DeviceState, catalog: Catalog, target_id: str, now_ms: int
) -> tuple[DeviceState, list[Message]]:
    """Start the clip behind a target, interrupting any current clip.

    An interrupt announces the old clip's stop before the new start so
    companions never believe two clips run at once.
    """
    clip = resolve_clip(catalog, target_id)
    messages: list[Message] = []
    if _is_active(state.personal, catalog, now_ms):
        old = state.personal
        state, stop_msg = _emit(
            state, lambda seq: Stop(state.device_id, seq, now_ms, old.clip_id, now_ms)
        )
        messages.append(stop_msg)
    state, start_msg = _emit(
        state, lambda seq: Start(state.device_id, seq, now_ms, clip.clip_id, now_ms)
    )
    messages.append(start_msg)
    state = replace(state, personal=PlaybackRecord(clip.clip_id, now_ms))
    return state, messages


def stop_playback(
    state: DeviceState, catalog: Catalog, now_ms: int
) -> tuple[DeviceState, list[Message]]:
    """Stop the current clip; silently discards a clip that already ended."""
    if state.personal is None:
        return state, []
    if not _is_active(state.personal, catalog, now_ms):
        return replace(state, personal=None), []
    old = state.personal
    state, msg = _emit(
        state, lambda seq: Stop(state.device_id, seq, now_ms, old.clip_id, now_ms)
    )
    return replace(state, personal=None), [msg]


def set_eavesdrop_volume(state: DeviceState, level: VolumeLevel) -> DeviceState:
    """Local volume preference; nothing is announced to companions."""
    return replace(state, volume=level)


def switch_wall(state: DeviceState, wall_id: str) -> DeviceState:
    return replace(state, current_wall=wall_id)


def beacon(state: DeviceState, now_ms: int) -> tuple[DeviceState, list[Message]]:
    """Periodic full-state repeat; idempotent for receivers, so lost
    datagrams are healed by the next one."""
    if state.personal is not None:
        record = state.personal
        build = lambda seq: Beacon(
            state.device_id, seq, now_ms, True, record.clip_id, record.start_ts_ms
        )
    else:
        build = lambda seq: Beacon(state.device_id, seq, now_ms, False, 0, 0)
    state, msg = _emit(state, build)
    return state, [msg]


def handle_message(state: DeviceState, msg: Message) -> DeviceState:
    """Apply one received control message.

    Stale or repeated datagrams (seq at or below the last accepted for
    that sender) are dropped, so duplication and reordering on the wire
    cannot push a companion record backwards.
    """
    if msg.sender_id == state.device_id:
        return state
    if isinstance(msg, Hello) and msg.group_id != state.group_id:
        return state  # not one of ours
    last = state.last_seq.get(msg.sender_id)
    if last is not None and msg.seq <= last:
        return state
    last_seq = dict(state.last_seq)
    last_seq[msg.sender_id] = msg.seq
    state = replace(state, last_seq=last_seq)

    if isinstance(msg, Hello):
        return state  # membership only; playback untouched
    if isinstance(msg, Start):
        record = PlaybackRecord(msg.clip_id, msg.start_ts_ms)
        return replace(state, companions={**state.companions, msg.sender_id: record})
    if isinstance(msg, Stop):
        if msg.sender_id in state.companions:
            companions = dict(state.companions)
            del companions[msg.sender_id]
            return replace(state, companions=companions)
        return state
    if isinstance(msg, Beacon):
        if msg.playing:
            record = PlaybackRecord(msg.clip_id, msg.start_ts_ms)
            return replace(state, companions={**state.companions, msg.sender_id: record})
        if msg.sender_id in state.companions:
            companions = dict(state.companions)
            del companions[msg.sender_id]
            return replace(state, companions=companions)
        return state
    return state


def render_at(
    state: DeviceState,
    catalog: Catalog,
    now_ms: int,
    quiet_gain: float = DEFAULT_QUIET_GAIN,
) -> RenderDecision:
    """Decide what the device's speaker emits at now_ms.

    The listener's own clip always wins.  Otherwise the earliest-started
    companion clip is overheard (ties broken by lowest device id), at
    the eavesdrop volume, with reverb; volume off renders silence.
    """
    if state.personal is not None:
        clip = catalog.clips_by_id.get(state.personal.clip_id)
        if clip is None:
            logger.warning(
                "own record references clip %d missing from catalog", state.personal.clip_id
            )
        else:
            offset = clip_offset(state.personal, clip.duration_ms, now_ms)
            if offset is not None:
                return Personal(state.personal.clip_id, offset)

    gain = eavesdrop_gain(state.volume)
    candidates = []
    for device_id, record in state.companions.items():
        clip = catalog.clips_by_id.get(record.clip_id)
        if clip is None:
            logger.warning(
                "companion %d references clip %d missing from catalog", device_id, record.clip_id
            )
            continue
        offset = clip_offset(record, clip.duration_ms, now_ms)
        if offset is not None:
            candidates.append((record.start_ts_ms, device_id, record.clip_id, offset))
    if not candidates or gain is None:
        return Silence()
    start_ts, device_id, clip_id, offset = min(candidates)
    return Eavesdrop(clip_id, offset, gain, device_id)
