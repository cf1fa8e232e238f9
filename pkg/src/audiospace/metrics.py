"""Listening metrics derived from a render log.

Per device: how long it rendered its own audio, overheard audio, and
silence, plus how often one personal clip cut off another.  Per pair:
how long the two actually heard the same clip at the same time, the
worst playback-position skew while doing so, and how many distinct
shared-listening episodes that time breaks into (a new episode starts
after a gap above the threshold).
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog
from .renderlog import RenderLog, Segment

DEFAULT_EPISODE_GAP_MS = 30000


@dataclass(frozen=True)
class DeviceMetrics:
    personal_ms: int
    eavesdrop_ms: int
    silence_ms: int
    interrupts: int


@dataclass(frozen=True)
class PairMetrics:
    mutual_ms: int
    mutual_fraction: float
    max_mutual_offset_skew_ms: int
    episodes: int


@dataclass(frozen=True)
class Metrics:
    duration_ms: int
    devices: dict[int, DeviceMetrics]
    pairs: dict[tuple[int, int], PairMetrics]

    def to_dict(self) -> dict:
        return {
            "duration_ms": self.duration_ms,
            "devices": {
                str(d): {
                    "personal_ms": m.personal_ms,
                    "eavesdrop_ms": m.eavesdrop_ms,
                    "silence_ms": m.silence_ms,
                    "interrupts": m.interrupts,
                }
                for d, m in sorted(self.devices.items())
            },
            "pairs": {
                f"{a}-{b}": {
                    "mutual_ms": m.mutual_ms,
                    "mutual_fraction": m.mutual_fraction,
                    "max_mutual_offset_skew_ms": m.max_mutual_offset_skew_ms,
                    "episodes": m.episodes,
                }
                for (a, b), m in sorted(self.pairs.items())
            },
        }


def _truncated(segment: Segment, catalog: Catalog) -> bool:
    """Did this playback segment end before the clip ran out?"""
    clip = catalog.clips_by_id.get(segment.clip)
    if clip is None:
        return True
    return segment.offset_at(segment.t1) < clip.duration_ms


def _device_metrics(segments: list[Segment], catalog: Catalog) -> DeviceMetrics:
    by_source = {"personal": 0, "eavesdrop": 0, "silence": 0}
    interrupts = 0
    for i, seg in enumerate(segments):
        by_source[seg.source] += seg.t1 - seg.t0
        if (
            i > 0
            and seg.source == "personal"
            and segments[i - 1].source == "personal"
            and segments[i - 1].t1 == seg.t0
            and _truncated(segments[i - 1], catalog)
        ):
            interrupts += 1
    return DeviceMetrics(
        personal_ms=by_source["personal"],
        eavesdrop_ms=by_source["eavesdrop"],
        silence_ms=by_source["silence"],
        interrupts=interrupts,
    )


def _overlap_intervals(a: list[Segment], b: list[Segment]):
    """Yield (lo, hi, seg_a, seg_b) where both devices are constant."""
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i].t0, b[j].t0)
        hi = min(a[i].t1, b[j].t1)
        if lo < hi:
            yield lo, hi, a[i], b[j]
        if a[i].t1 <= b[j].t1:
            i += 1
        else:
            j += 1


def _pair_metrics(
    a: list[Segment], b: list[Segment], duration_ms: int, gap_ms: int
) -> PairMetrics:
    mutual: list[tuple[int, int]] = []
    max_skew = 0
    for lo, hi, sa, sb in _overlap_intervals(a, b):
        if sa.source == "silence" or sb.source == "silence" or sa.clip != sb.clip:
            continue
        skew = abs(sa.offset_at(lo) - sb.offset_at(lo))
        max_skew = max(max_skew, skew)
        if mutual and mutual[-1][1] == lo:
            mutual[-1] = (mutual[-1][0], hi)
        else:
            mutual.append((lo, hi))

    mutual_ms = sum(hi - lo for lo, hi in mutual)
    episodes = 0
    prev_end = None
    for lo, hi in mutual:
        if prev_end is None or lo - prev_end > gap_ms:
            episodes += 1
        prev_end = hi
    return PairMetrics(
        mutual_ms=mutual_ms,
        mutual_fraction=mutual_ms / duration_ms if duration_ms else 0.0,
        max_mutual_offset_skew_ms=max_skew,
        episodes=episodes,
    )


def compute_metrics(
    log: RenderLog, catalog: Catalog, gap_ms: int = DEFAULT_EPISODE_GAP_MS
) -> Metrics:
    per_device = {
        device: _device_metrics(log.segments_for(device), catalog)
        for device in log.devices
    }
    pairs = {}
    for i, a in enumerate(log.devices):
        for b in log.devices[i + 1 :]:
            pairs[(a, b)] = _pair_metrics(
                log.segments_for(a), log.segments_for(b), log.duration_ms, gap_ms
            )
    return Metrics(duration_ms=log.duration_ms, devices=per_device, pairs=pairs)
