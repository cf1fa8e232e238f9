"""Tour content model: rooms, wall imagemaps, tap targets, and audio clips.

A catalog is loaded once from JSON, validated, and then treated as
immutable; it is safe to share between any number of readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import IO, Any, Union

DEFAULT_TAP_TIP_MS = 1500

MAX_CLIP_ID = 0xFFFF  # clip ids travel as u16 on the wire


class CatalogError(Exception):
    """Base class for catalog loading and lookup failures."""


class CatalogParseError(CatalogError):
    """The document is not well-formed JSON or has the wrong shape."""


class CatalogValidationError(CatalogError):
    """A structural invariant is violated; `path` locates the offender."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnknownTargetError(CatalogError):
    def __init__(self, target_id: str):
        super().__init__(f"unknown target {target_id!r}")
        self.target_id = target_id


class PointOutOfBoundsError(CatalogError):
    def __init__(self, wall_id: str, x: int, y: int):
        super().__init__(f"point ({x}, {y}) outside wall {wall_id!r}")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned pixel rectangle; covers [x, x+w) x [y, y+h)."""

    x: int
    y: int
    w: int
    h: int

    def contains(self, px: int, py: int) -> bool:
        return self.x <= px < self.x + self.w and self.y <= py < self.y + self.h

    def overlaps(self, other: "Rect") -> bool:
        return (
            self.x < other.x + other.w
            and other.x < self.x + self.w
            and self.y < other.y + other.h
            and other.y < self.y + self.h
        )


@dataclass(frozen=True)
class Clip:
    clip_id: int
    duration_ms: int
    title: str | None = None


@dataclass(frozen=True)
class Target:
    target_id: str
    rect: Rect
    clip_id: int


@dataclass(frozen=True)
class Wall:
    wall_id: str
    room_id: str
    width_px: int
    height_px: int
    targets: tuple[Target, ...] = ()


@dataclass(frozen=True)
class Room:
    room_id: str
    wall_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Hit:
    target_id: str


@dataclass(frozen=True)
class Miss:
    outline_target_ids: tuple[str, ...]
    tip_duration_ms: int


HitResult = Union[Hit, Miss]


@dataclass(frozen=True)
class Catalog:
    rooms: tuple[Room, ...]
    walls: tuple[Wall, ...]
    clips: tuple[Clip, ...]
    tap_tip_ms: int = DEFAULT_TAP_TIP_MS

    @cached_property
    def clips_by_id(self) -> dict[int, Clip]:
        return {c.clip_id: c for c in self.clips}

    @cached_property
    def walls_by_id(self) -> dict[str, Wall]:
        return {w.wall_id: w for w in self.walls}

    @cached_property
    def targets_by_id(self) -> dict[str, Target]:
        return {t.target_id: t for w in self.walls for t in w.targets}

    @cached_property
    def orphan_clip_ids(self) -> tuple[int, ...]:
        """Clips no target references; legal content, worth a warning."""
        referenced = {t.clip_id for w in self.walls for t in w.targets}
        return tuple(c.clip_id for c in self.clips if c.clip_id not in referenced)

    def clip_duration(self, clip_id: int) -> int:
        return self.clips_by_id[clip_id].duration_ms


def resolve_clip(catalog: Catalog, target_id: str) -> Clip:
    """Return the clip a target plays; raises for unknown targets."""
    target = catalog.targets_by_id.get(target_id)
    if target is None:
        raise UnknownTargetError(target_id)
    return catalog.clips_by_id[target.clip_id]


def hit_test(wall: Wall, x: int, y: int, tip_ms: int = DEFAULT_TAP_TIP_MS) -> HitResult:
    """Resolve a tap at pixel (x, y) against a wall's targets.

    Containment is inclusive on the min edges and exclusive on the max
    edges, so adjacent targets never both claim a point.  A miss carries
    every target id on the wall so the caller can flash the outlines.
    """
    if not (0 <= x < wall.width_px and 0 <= y < wall.height_px):
        raise PointOutOfBoundsError(wall.wall_id, x, y)
    for target in wall.targets:
        if target.rect.contains(x, y):
            return Hit(target.target_id)
    return Miss(tuple(t.target_id for t in wall.targets), tip_ms)


# --- JSON ingestion ---------------------------------------------------------


def _require(doc: dict, key: str, path: str) -> Any:
    if key not in doc:
        raise CatalogParseError(f"{path}: missing key {key!r}")
    return doc[key]


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CatalogParseError(f"{path}: expected integer, got {value!r}")
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise CatalogParseError(f"{path}: expected string, got {value!r}")
    return value


def _as_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise CatalogParseError(f"{path}: expected list")
    return value


def catalog_from_dict(doc: dict) -> Catalog:
    """Build and fully validate a Catalog from a decoded JSON document."""
    if not isinstance(doc, dict):
        raise CatalogParseError("catalog: top level must be an object")

    rooms = []
    for i, rdoc in enumerate(_as_list(_require(doc, "rooms", "catalog"), "rooms")):
        path = f"rooms[{i}]"
        rooms.append(
            Room(
                room_id=_as_str(_require(rdoc, "room_id", path), f"{path}.room_id"),
                wall_ids=tuple(
                    _as_str(w, f"{path}.walls[{j}]")
                    for j, w in enumerate(_as_list(_require(rdoc, "walls", path), f"{path}.walls"))
                ),
            )
        )

    walls = []
    for i, wdoc in enumerate(_as_list(_require(doc, "walls", "catalog"), "walls")):
        path = f"walls[{i}]"
        targets = []
        for j, tdoc in enumerate(_as_list(_require(wdoc, "targets", path), f"{path}.targets")):
            tpath = f"{path}.targets[{j}]"
            rect = _as_list(_require(tdoc, "rect", tpath), f"{tpath}.rect")
            if len(rect) != 4:
                raise CatalogParseError(f"{tpath}.rect: expected [x, y, w, h]")
            targets.append(
                Target(
                    target_id=_as_str(_require(tdoc, "target_id", tpath), f"{tpath}.target_id"),
                    rect=Rect(*(_as_int(v, f"{tpath}.rect[{k}]") for k, v in enumerate(rect))),
                    clip_id=_as_int(_require(tdoc, "clip_id", tpath), f"{tpath}.clip_id"),
                )
            )
        walls.append(
            Wall(
                wall_id=_as_str(_require(wdoc, "wall_id", path), f"{path}.wall_id"),
                room_id=_as_str(_require(wdoc, "room_id", path), f"{path}.room_id"),
                width_px=_as_int(_require(wdoc, "width_px", path), f"{path}.width_px"),
                height_px=_as_int(_require(wdoc, "height_px", path), f"{path}.height_px"),
                targets=tuple(targets),
            )
        )

    clips = []
    for i, cdoc in enumerate(_as_list(_require(doc, "clips", "catalog"), "clips")):
        path = f"clips[{i}]"
        title = cdoc.get("title")
        if title is not None:
            title = _as_str(title, f"{path}.title")
        clips.append(
            Clip(
                clip_id=_as_int(_require(cdoc, "clip_id", path), f"{path}.clip_id"),
                duration_ms=_as_int(_require(cdoc, "duration_ms", path), f"{path}.duration_ms"),
                title=title,
            )
        )

    tap_tip_ms = doc.get("tap_tip_ms", DEFAULT_TAP_TIP_MS)
    tap_tip_ms = _as_int(tap_tip_ms, "tap_tip_ms")

    catalog = Catalog(tuple(rooms), tuple(walls), tuple(clips), tap_tip_ms)
    _validate(catalog)
    return catalog


def load_catalog(source: Union[bytes, str, IO]) -> Catalog:
    """Parse catalog JSON from bytes, text, or a readable file object."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CatalogParseError(f"malformed catalog document: {exc}") from exc
    return catalog_from_dict(doc)


def _validate(catalog: Catalog) -> None:
    if catalog.tap_tip_ms <= 0:
        raise CatalogValidationError("tap_tip_ms", "must be positive")

    seen_clips: set[int] = set()
    for i, clip in enumerate(catalog.clips):
        path = f"clips[{i}]"
        if not 0 <= clip.clip_id <= MAX_CLIP_ID:
            raise CatalogValidationError(path, f"clip_id {clip.clip_id} outside [0, {MAX_CLIP_ID}]")
        if clip.clip_id in seen_clips:
            raise CatalogValidationError(path, f"duplicate clip_id {clip.clip_id}")
        seen_clips.add(clip.clip_id)
        if clip.duration_ms <= 0:
            raise CatalogValidationError(path, f"duration_ms must be positive, got {clip.duration_ms}")

    seen_rooms: set[str] = set()
    room_of_wall: dict[str, str] = {}
    for i, room in enumerate(catalog.rooms):
        path = f"rooms[{i}]"
        if room.room_id in seen_rooms:
            raise CatalogValidationError(path, f"duplicate room_id {room.room_id!r}")
        seen_rooms.add(room.room_id)
        for wall_id in room.wall_ids:
            if wall_id in room_of_wall:
                raise CatalogValidationError(path, f"wall {wall_id!r} listed by more than one room")
            room_of_wall[wall_id] = room.room_id

    seen_walls: set[str] = set()
    seen_targets: set[str] = set()
    for i, wall in enumerate(catalog.walls):
        path = f"walls[{i}]"
        if wall.wall_id in seen_walls:
            raise CatalogValidationError(path, f"duplicate wall_id {wall.wall_id!r}")
        seen_walls.add(wall.wall_id)
        if wall.width_px <= 0 or wall.height_px <= 0:
            raise CatalogValidationError(path, "imagemap dimensions must be positive")
        if room_of_wall.get(wall.wall_id) != wall.room_id:
            raise CatalogValidationError(
                path, f"wall {wall.wall_id!r} must be listed by its room {wall.room_id!r}"
            )
        for j, target in enumerate(wall.targets):
            tpath = f"{path}.targets[{j}]"
            r = target.rect
            if target.target_id in seen_targets:
                raise CatalogValidationError(tpath, f"duplicate target_id {target.target_id!r}")
            seen_targets.add(target.target_id)
            if r.w <= 0 or r.h <= 0:
                raise CatalogValidationError(tpath, f"target {target.target_id!r} has empty rect")
            if r.x < 0 or r.y < 0 or r.x + r.w > wall.width_px or r.y + r.h > wall.height_px:
                raise CatalogValidationError(
                    tpath,
                    f"target {target.target_id!r} rect extends beyond the "
                    f"{wall.width_px}x{wall.height_px} imagemap",
                )
            if target.clip_id not in catalog.clips_by_id:
                raise CatalogValidationError(
                    tpath, f"target {target.target_id!r} references unknown clip {target.clip_id}"
                )
            for prev in wall.targets[:j]:
                if r.overlaps(prev.rect):
                    raise CatalogValidationError(
                        tpath,
                        f"target {target.target_id!r} overlaps target {prev.target_id!r}",
                    )

    for wall_id in room_of_wall:
        if wall_id not in seen_walls:
            raise CatalogValidationError("rooms", f"room lists unknown wall {wall_id!r}")


# --- serialization ----------------------------------------------------------


def catalog_to_dict(catalog: Catalog) -> dict:
    return {
        "rooms": [{"room_id": r.room_id, "walls": list(r.wall_ids)} for r in catalog.rooms],
        "walls": [
            {
                "wall_id": w.wall_id,
                "room_id": w.room_id,
                "width_px": w.width_px,
                "height_px": w.height_px,
                "targets": [
                    {
                        "target_id": t.target_id,
                        "rect": [t.rect.x, t.rect.y, t.rect.w, t.rect.h],
                        "clip_id": t.clip_id,
                    }
                    for t in w.targets
                ],
            }
            for w in catalog.walls
        ],
        "clips": [
            {"clip_id": c.clip_id, "duration_ms": c.duration_ms}
            | ({"title": c.title} if c.title is not None else {})
            for c in catalog.clips
        ],
        "tap_tip_ms": catalog.tap_tip_ms,
    }


def catalog_to_json(catalog: Catalog, indent: int | None = None) -> str:
    return json.dumps(catalog_to_dict(catalog), indent=indent)
