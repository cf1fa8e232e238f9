"""Structural comparison of two render logs.

Two logs are walked device by device over their common elementary
intervals and compared on what a listener would actually hear: source
kind, clip, gain, reverb, and exact clip position.  Which companion a
device happened to learn a clip from is presentation detail and is not
compared.  Contiguous disagreement is reported as one maximal interval
per device, so a divergence window has a well-defined start and length.
"""

from __future__ import annotations

from dataclasses import dataclass

from .renderlog import RenderLog, Segment


class LogDiffError(Exception):
    """The two logs describe different runs and cannot be compared."""


@dataclass(frozen=True)
class Mismatch:
    device: int
    t0: int
    t1: int
    a_desc: str
    b_desc: str

    @property
    def length_ms(self) -> int:
        return self.t1 - self.t0

    def to_dict(self) -> dict:
        return {
            "device": self.device,
            "t0": self.t0,
            "t1": self.t1,
            "length_ms": self.length_ms,
            "a": self.a_desc,
            "b": self.b_desc,
        }


@dataclass(frozen=True)
class DiffResult:
    mismatches: tuple[Mismatch, ...]

    @property
    def equal(self) -> bool:
        return not self.mismatches

    @property
    def total_mismatch_ms(self) -> int:
        return sum(m.length_ms for m in self.mismatches)

    @property
    def max_mismatch_ms(self) -> int:
        return max((m.length_ms for m in self.mismatches), default=0)

    def to_dict(self) -> dict:
        return {
            "equal": self.equal,
            "mismatch_count": len(self.mismatches),
            "total_mismatch_ms": self.total_mismatch_ms,
            "max_mismatch_ms": self.max_mismatch_ms,
            "mismatches": [m.to_dict() for m in self.mismatches],
        }


def _audible(seg: Segment, t: int) -> tuple:
    """What is heard at time t in this segment; from_device excluded."""
    if seg.source == "silence":
        return ("silence", None, None, None, False)
    return (seg.source, seg.clip, seg.offset_at(t), seg.gain, seg.reverb)


def _describe(seg: Segment, t: int) -> str:
    if seg.source == "silence":
        return "silence"
    return (
        f"{seg.source} clip={seg.clip} offset={seg.offset_at(t)} "
        f"gain={seg.gain} reverb={seg.reverb}"
    )


def diff_logs(a: RenderLog, b: RenderLog) -> DiffResult:
    """Compare two logs of the same run shape.

    Raises LogDiffError when the device sets or durations differ;
    that is an operator error, not a divergence.
    """
    if a.devices != b.devices:
        raise LogDiffError(f"device sets differ: {a.devices} vs {b.devices}")
    if a.duration_ms != b.duration_ms:
        raise LogDiffError(f"durations differ: {a.duration_ms} vs {b.duration_ms}")

    mismatches: list[Mismatch] = []
    for device in a.devices:
        segs_a = a.segments_for(device)
        segs_b = b.segments_for(device)
        open_mismatch: list = []  # [t0, t1, a_desc, b_desc]
        i = j = 0
        while i < len(segs_a) and j < len(segs_b):
            sa, sb = segs_a[i], segs_b[j]
            lo = max(sa.t0, sb.t0)
            hi = min(sa.t1, sb.t1)
            if lo < hi and _audible(sa, lo) != _audible(sb, lo):
                if open_mismatch and open_mismatch[1] == lo:
                    open_mismatch[1] = hi
                else:
                    if open_mismatch:
                        mismatches.append(Mismatch(device, *open_mismatch))
                    open_mismatch = [lo, hi, _describe(sa, lo), _describe(sb, lo)]
            if sa.t1 <= sb.t1:
                i += 1
            else:
                j += 1
        if open_mismatch:
            mismatches.append(Mismatch(device, *open_mismatch))
    return DiffResult(tuple(mismatches))
