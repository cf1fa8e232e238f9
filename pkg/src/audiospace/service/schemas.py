"""Request and response bodies for the HTTP service.

Catalog and scenario documents arrive as plain JSON objects and are
validated by the core loaders, which own those formats; the models here
describe the service envelope and the typed results going back out.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class HealthOut(BaseModel):
    status: str = "ok"
    version: str


class ValidateIn(BaseModel):
    catalog: dict
    scenario: dict | None = None


class CatalogSummaryOut(BaseModel):
    rooms: int
    walls: int
    targets: int
    clips: int
    orphan_clip_ids: list[int]


class ValidateOut(BaseModel):
    ok: bool
    problems: list[str]
    catalog: CatalogSummaryOut | None = None


class RunIn(BaseModel):
    catalog: dict
    scenario: dict
    oracle: bool = False
    include_messages: bool = False


class SegmentOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    device: int
    t0: int
    t1: int
    source: str
    clip: int | None
    offset0: int | None
    gain: float | None
    reverb: bool
    from_device: int | None = Field(default=None, alias="from")


class TapTipOut(BaseModel):
    t_ms: int
    device_id: int
    wall_id: str
    target_ids: list[str]
    tip_duration_ms: int


class MessageOut(BaseModel):
    t_ms: int
    sender_id: int
    type: str
    seq: int
    datagram_hex: str


class NetworkStatsOut(BaseModel):
    sends: int
    copies_offered: int
    copies_dropped: int
    copies_duplicated: int
    delivered: int


class MismatchOut(BaseModel):
    device: int
    t0: int
    t1: int
    length_ms: int
    a: str
    b: str


class DiffOut(BaseModel):
    equal: bool
    mismatch_count: int
    total_mismatch_ms: int
    max_mismatch_ms: int
    mismatches: list[MismatchOut]


class RunOut(BaseModel):
    duration_ms: int
    devices: list[int]
    segments: list[SegmentOut]
    metrics: dict
    tap_tips: list[TapTipOut]
    network: NetworkStatsOut
    messages: list[MessageOut] | None = None
    oracle: DiffOut | None = None


class DiffIn(BaseModel):
    log_a: str  # render log in canonical JSONL form
    log_b: str


class FuzzIn(BaseModel):
    catalog: dict
    seed: int = 0
    events: int = Field(default=100, ge=1, le=10_000)
    runs: int = Field(default=5, ge=1, le=1_000)


class FuzzOut(BaseModel):
    runs: int
    events_replayed: int
    oracle_checked: int
    oracle_mismatches: int
    ok: bool
    violations: list[str]
