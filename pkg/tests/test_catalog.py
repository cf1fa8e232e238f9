from __future__ import annotations

import random

import pytest

from audiospace.catalog import (
    Catalog,
    CatalogParseError,
    CatalogValidationError,
    Clip,
    Hit,
    Miss,
    PointOutOfBoundsError,
    Rect,
    Room,
    Target,
    UnknownTargetError,
    Wall,
    catalog_from_dict,
    catalog_to_dict,
    catalog_to_json,
    hit_test,
    load_catalog,
    resolve_clip,
)


def test_round_trip_through_json(tiny_catalog):
    doc = catalog_to_json(tiny_catalog)
    assert load_catalog(doc) == tiny_catalog
    assert load_catalog(doc.encode("utf-8")) == tiny_catalog


def test_demo_catalog_round_trip(demo_catalog):
    assert catalog_from_dict(catalog_to_dict(demo_catalog)) == demo_catalog


def test_malformed_json_is_a_parse_error():
    with pytest.raises(CatalogParseError):
        load_catalog("{not json")
    with pytest.raises(CatalogParseError):
        load_catalog('["top level must be an object"]')
    with pytest.raises(CatalogParseError):
        catalog_from_dict({"rooms": []})  # walls and clips missing


def _doc(tiny_catalog) -> dict:
    return catalog_to_dict(tiny_catalog)


def test_duplicate_clip_id_rejected(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["clips"].append({"clip_id": 1, "duration_ms": 100})
    with pytest.raises(CatalogValidationError, match="duplicate clip_id"):
        catalog_from_dict(doc)


def test_nonpositive_duration_rejected(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["clips"][0]["duration_ms"] = 0
    with pytest.raises(CatalogValidationError, match="duration_ms"):
        catalog_from_dict(doc)


def test_clip_id_must_fit_the_wire(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["clips"][0]["clip_id"] = 0x10000  # one past the u16 ceiling
    with pytest.raises(CatalogValidationError, match="outside"):
        catalog_from_dict(doc)


def test_overlapping_targets_rejected(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["walls"][0]["targets"].append(
        {"target_id": "tc", "rect": [5, 5, 10, 10], "clip_id": 2}
    )
    with pytest.raises(CatalogValidationError, match="overlaps"):
        catalog_from_dict(doc)


def test_target_beyond_wall_rejected(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["walls"][0]["targets"][0]["rect"] = [95, 95, 10, 10]
    with pytest.raises(CatalogValidationError, match="beyond"):
        catalog_from_dict(doc)


def test_unknown_clip_reference_rejected(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["walls"][0]["targets"][0]["clip_id"] = 99
    with pytest.raises(CatalogValidationError, match="unknown clip"):
        catalog_from_dict(doc)


def test_wall_must_belong_to_its_room(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["walls"][0]["room_id"] = "elsewhere"
    with pytest.raises(CatalogValidationError):
        catalog_from_dict(doc)


def test_room_listing_unknown_wall_rejected(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["rooms"][0]["walls"].append("ghost")
    with pytest.raises(CatalogValidationError, match="unknown wall"):
        catalog_from_dict(doc)


def test_duplicate_target_id_rejected(tiny_catalog):
    doc = _doc(tiny_catalog)
    doc["walls"][1]["targets"].append(
        {"target_id": "ta", "rect": [0, 0, 5, 5], "clip_id": 2}
    )
    with pytest.raises(CatalogValidationError, match="duplicate target_id"):
        catalog_from_dict(doc)


def test_orphan_clips_are_reported_not_rejected(tiny_catalog):
    assert tiny_catalog.orphan_clip_ids == (3,)


def test_resolve_clip(tiny_catalog):
    assert resolve_clip(tiny_catalog, "ta").clip_id == 1
    assert resolve_clip(tiny_catalog, "tb").duration_ms == 5_000
    with pytest.raises(UnknownTargetError):
        resolve_clip(tiny_catalog, "nope")


def test_hit_edges_min_inclusive_max_exclusive(tiny_catalog):
    wall = tiny_catalog.walls_by_id["w"]
    assert hit_test(wall, 0, 0) == Hit("ta")
    assert hit_test(wall, 9, 9) == Hit("ta")
    assert isinstance(hit_test(wall, 10, 0), Miss)  # max edge excluded
    assert isinstance(hit_test(wall, 0, 10), Miss)
    assert hit_test(wall, 20, 0) == Hit("tb")


def test_miss_lists_every_target_on_the_wall(tiny_catalog):
    wall = tiny_catalog.walls_by_id["w"]
    miss = hit_test(wall, 50, 50, tip_ms=900)
    assert miss == Miss(("ta", "tb"), 900)


def test_out_of_bounds_tap_raises(tiny_catalog):
    wall = tiny_catalog.walls_by_id["w"]
    for x, y in ((-1, 0), (0, -1), (100, 0), (0, 100)):
        with pytest.raises(PointOutOfBoundsError):
            hit_test(wall, x, y)


def test_hit_matches_naive_containment(demo_catalog):
    # random points agree with a direct scan of every rect
    rng = random.Random(7)
    for _ in range(2000):
        wall = demo_catalog.walls[rng.randrange(len(demo_catalog.walls))]
        x, y = rng.randrange(wall.width_px), rng.randrange(wall.height_px)
        expected = [
            t.target_id
            for t in wall.targets
            if t.rect.x <= x < t.rect.x + t.rect.w and t.rect.y <= y < t.rect.y + t.rect.h
        ]
        result = hit_test(wall, x, y)
        if expected:
            assert result == Hit(expected[0])
        else:
            assert result == Miss(tuple(t.target_id for t in wall.targets), 1500)


def test_demo_catalog_shape(demo_catalog):
    assert len(demo_catalog.rooms) == 3
    assert len(demo_catalog.clips) == 51
    assert len(demo_catalog.targets_by_id) == 51
    durations = sorted(c.duration_ms for c in demo_catalog.clips)
    assert durations[-1] == 59_000
    assert all(5_500 <= d <= 27_000 for d in durations[:-1])
    assert demo_catalog.orphan_clip_ids == ()


def test_indexes_are_consistent(demo_catalog):
    for target_id, target in demo_catalog.targets_by_id.items():
        assert target.target_id == target_id
        assert target.clip_id in demo_catalog.clips_by_id
    assert demo_catalog.clip_duration(51) == 59_000


def test_rect_overlap_detection():
    a = Rect(0, 0, 10, 10)
    assert a.overlaps(Rect(9, 9, 5, 5))
    assert not a.overlaps(Rect(10, 0, 5, 5))  # touching edges do not overlap
    assert not a.overlaps(Rect(0, 10, 5, 5))


def test_tap_tip_default_and_override():
    room = Room("r", ("w",))
    wall = Wall("w", "r", 10, 10, (Target("t", Rect(0, 0, 5, 5), 1),))
    catalog = Catalog((room,), (wall,), (Clip(1, 1000),))
    assert catalog.tap_tip_ms == 1500
    doc = catalog_to_dict(catalog)
    doc["tap_tip_ms"] = 800
    assert catalog_from_dict(doc).tap_tip_ms == 800
