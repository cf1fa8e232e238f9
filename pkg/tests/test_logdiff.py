from __future__ import annotations

import pytest

from audiospace.logdiff import LogDiffError, diff_logs
from audiospace.renderlog import RenderLog, Segment


def _silence(device, t0, t1):
    return Segment(device, t0, t1, "silence")


def test_identical_logs_are_equal():
    log = RenderLog(10, (1,), (_silence(1, 0, 10),))
    result = diff_logs(log, log)
    assert result.equal
    assert result.max_mismatch_ms == 0


def test_from_device_is_not_audible():
    a = RenderLog(10, (1,), (Segment(1, 0, 10, "eavesdrop", 5, 0, 0.5, True, 2),))
    b = RenderLog(10, (1,), (Segment(1, 0, 10, "eavesdrop", 5, 0, 0.5, True, 3),))
    assert diff_logs(a, b).equal


def test_gain_difference_is_audible():
    a = RenderLog(10, (1,), (Segment(1, 0, 10, "eavesdrop", 5, 0, 0.5, True, 2),))
    b = RenderLog(10, (1,), (Segment(1, 0, 10, "eavesdrop", 5, 0, 1.0, True, 2),))
    result = diff_logs(a, b)
    assert [(m.t0, m.t1, m.device) for m in result.mismatches] == [(0, 10, 1)]


def test_offset_compared_exactly():
    a = RenderLog(10, (1,), (Segment(1, 0, 10, "personal", 5, 0, 1.0),))
    b = RenderLog(10, (1,), (Segment(1, 0, 10, "personal", 5, 1, 1.0),))
    assert not diff_logs(a, b).equal


def test_mismatch_windows_merge_across_segment_boundaries():
    a = RenderLog(
        30,
        (1,),
        (
            _silence(1, 0, 10),
            Segment(1, 10, 20, "personal", 5, 0, 1.0),
            Segment(1, 20, 30, "personal", 5, 10, 1.0),  # same audio, split line
        ),
    )
    b = RenderLog(30, (1,), (_silence(1, 0, 30),))
    result = diff_logs(a, b)
    # the two differing segments fuse into one maximal window
    assert [(m.t0, m.t1) for m in result.mismatches] == [(10, 30)]
    assert result.max_mismatch_ms == 20
    assert result.total_mismatch_ms == 20


def test_disjoint_windows_stay_separate():
    a = RenderLog(
        30,
        (1,),
        (
            Segment(1, 0, 5, "personal", 1, 0, 1.0),
            _silence(1, 5, 20),
            Segment(1, 20, 30, "personal", 2, 0, 1.0),
        ),
    )
    b = RenderLog(30, (1,), (_silence(1, 0, 30),))
    result = diff_logs(a, b)
    assert [(m.t0, m.t1) for m in result.mismatches] == [(0, 5), (20, 30)]


def test_split_points_alone_do_not_mismatch():
    a = RenderLog(
        20,
        (1,),
        (Segment(1, 0, 10, "personal", 5, 0, 1.0), Segment(1, 10, 20, "personal", 5, 10, 1.0)),
    )
    b = RenderLog(20, (1,), (Segment(1, 0, 20, "personal", 5, 0, 1.0),))
    assert diff_logs(a, b).equal  # same audio, different segmentation


def test_device_set_must_match():
    a = RenderLog(10, (1,), (_silence(1, 0, 10),))
    b = RenderLog(10, (1, 2), (_silence(1, 0, 10), _silence(2, 0, 10)))
    with pytest.raises(LogDiffError, match="device sets"):
        diff_logs(a, b)


def test_duration_must_match():
    a = RenderLog(10, (1,), (_silence(1, 0, 10),))
    b = RenderLog(20, (1,), (_silence(1, 0, 20),))
    with pytest.raises(LogDiffError, match="durations"):
        diff_logs(a, b)


def test_to_dict_shape():
    a = RenderLog(10, (1,), (Segment(1, 0, 10, "personal", 5, 0, 1.0),))
    b = RenderLog(10, (1,), (_silence(1, 0, 10),))
    doc = diff_logs(a, b).to_dict()
    assert doc["equal"] is False
    assert doc["mismatch_count"] == 1
    assert doc["mismatches"][0]["a"].startswith("personal clip=5")
    assert doc["mismatches"][0]["b"] == "silence"
