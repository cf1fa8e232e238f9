"""Render logs: what each speaker emitted, as piecewise-constant segments.

A log line covers [t0, t1) during which one device rendered one thing
at one gain.  Segments are only broken at state changes, never by
sampling, and a playback that merely advances (offset growing exactly
with the clock) extends the open segment rather than starting a new
one.  Per device, segments tile [0, duration) exactly.

The JSONL form is canonical: lines sorted by (device, t0), one compact
JSON object per line with a fixed key order, so two equivalent logs are
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .device import Eavesdrop, Personal, RenderDecision, Silence

_KEYS = ("device", "t0", "t1", "source", "clip", "offset0", "gain", "reverb", "from")


class RenderLogError(Exception):
    pass


@dataclass(frozen=True)
class Segment:
    device: int
    t0: int
    t1: int
    source: str  # silence | personal | eavesdrop
    clip: int | None = None
    offset0: int | None = None  # clip position at t0
    gain: float | None = None
    reverb: bool = False
    from_device: int | None = None

    def offset_at(self, t: int) -> int | None:
        """Clip position at absolute time t inside this segment."""
        if self.offset0 is None:
            return None
        return self.offset0 + (t - self.t0)

    def to_dict(self) -> dict:
        return {
            "device": self.device,
            "t0": self.t0,
            "t1": self.t1,
            "source": self.source,
            "clip": self.clip,
            "offset0": self.offset0,
            "gain": self.gain,
            "reverb": self.reverb,
            "from": self.from_device,
        }


@dataclass(frozen=True)
class RenderLog:
    duration_ms: int
    devices: tuple[int, ...]
    segments: tuple[Segment, ...]

    def segments_for(self, device: int) -> list[Segment]:
        return sorted(
            (s for s in self.segments if s.device == device), key=lambda s: s.t0
        )

    def to_jsonl(self) -> str:
        ordered = sorted(self.segments, key=lambda s: (s.device, s.t0))
        return "".join(
            json.dumps(s.to_dict(), separators=(",", ":")) + "\n" for s in ordered
        )


def _segment_from_dict(doc: dict, lineno: int) -> Segment:
    missing = [k for k in _KEYS if k not in doc]
    if missing:
        raise RenderLogError(f"line {lineno}: missing keys {missing}")
    return Segment(
        device=doc["device"],
        t0=doc["t0"],
        t1=doc["t1"],
        source=doc["source"],
        clip=doc["clip"],
        offset0=doc["offset0"],
        gain=doc["gain"],
        reverb=doc["reverb"],
        from_device=doc["from"],
    )


def log_from_jsonl(text: str) -> RenderLog:
    """Rebuild a log from its canonical JSONL form.

    The duration and device set are implied by the segments; every
    device's segments must tile [0, duration) with no gap or overlap.
    """
    segments = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RenderLogError(f"line {lineno}: not JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise RenderLogError(f"line {lineno}: expected object")
        segments.append(_segment_from_dict(doc, lineno))
    if not segments:
        raise RenderLogError("log has no segments")
    devices = tuple(sorted({s.device for s in segments}))
    duration = max(s.t1 for s in segments)
    log = RenderLog(duration, devices, tuple(segments))
    _check_coverage(log)
    return log


def _check_coverage(log: RenderLog) -> None:
    for device in log.devices:
        cursor = 0
        for seg in log.segments_for(device):
            if seg.t0 != cursor:
                raise RenderLogError(
                    f"device {device}: segment starts at {seg.t0}, expected {cursor}"
                )
            if seg.t1 <= seg.t0:
                raise RenderLogError(f"device {device}: empty segment at {seg.t0}")
            cursor = seg.t1
        if cursor != log.duration_ms:
            raise RenderLogError(
                f"device {device}: coverage ends at {cursor}, expected {log.duration_ms}"
            )


class SegmentBuilder:
    """Accumulates per-device render snapshots into merged segments.

    Feed it the render decision for every device at every boundary time
    (strictly increasing, each time at most once per device); it opens,
    extends, and closes segments so that only real state changes create
    new lines.
    """

    def __init__(self, devices: Iterable[int]):
        self._open: dict[int, Segment] = {}
        self._done: list[Segment] = []
        self._devices = tuple(sorted(devices))

    @staticmethod
    def _segment(device: int, t: int, decision: RenderDecision) -> Segment:
        if isinstance(decision, Personal):
            return Segment(
                device, t, t, "personal", decision.clip_id, decision.offset_ms, decision.gain
            )
        if isinstance(decision, Eavesdrop):
            return Segment(
                device,
                t,
                t,
                "eavesdrop",
                decision.clip_id,
                decision.offset_ms,
                decision.gain,
                reverb=True,
                from_device=decision.from_device,
            )
        return Segment(device, t, t, "silence")

    def _continues(self, open_seg: Segment, t: int, decision: RenderDecision) -> bool:
        if isinstance(decision, Silence):
            return open_seg.source == "silence"
        if isinstance(decision, Personal):
            return (
                open_seg.source == "personal"
                and open_seg.clip == decision.clip_id
                and open_seg.gain == decision.gain
                and open_seg.offset_at(t) == decision.offset_ms
            )
        return (
            open_seg.source == "eavesdrop"
            and open_seg.clip == decision.clip_id
            and open_seg.gain == decision.gain
            and open_seg.from_device == decision.from_device
            and open_seg.offset_at(t) == decision.offset_ms
        )

    def observe(self, t: int, device: int, decision: RenderDecision) -> None:
        open_seg = self._open.get(device)
        if open_seg is None:
            self._open[device] = self._segment(device, t, decision)
            return
        if self._continues(open_seg, t, decision):
            return
        if t > open_seg.t0:
            self._done.append(
                Segment(
                    open_seg.device,
                    open_seg.t0,
                    t,
                    open_seg.source,
                    open_seg.clip,
                    open_seg.offset0,
                    open_seg.gain,
                    open_seg.reverb,
                    open_seg.from_device,
                )
            )
        self._open[device] = self._segment(device, t, decision)

    def finish(self, duration_ms: int) -> RenderLog:
        for device in self._devices:
            open_seg = self._open.get(device)
            if open_seg is not None and duration_ms > open_seg.t0:
                self._done.append(
                    Segment(
                        open_seg.device,
                        open_seg.t0,
                        duration_ms,
                        open_seg.source,
                        open_seg.clip,
                        open_seg.offset0,
                        open_seg.gain,
                        open_seg.reverb,
                        open_seg.from_device,
                    )
                )
        segments = tuple(sorted(self._done, key=lambda s: (s.device, s.t0)))
        return RenderLog(duration_ms, self._devices, segments)
