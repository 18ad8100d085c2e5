from __future__ import annotations

import numpy as np
import pytest

from omra.core.errors import ConfigError, DataError
from omra.core.frame import Frame
from omra.motion.field import FlowField
from omra.motion.resample import (
    bilinear_upsample,
    box_halve,
    check_scale,
    downsample_frame,
    log2_scale,
    round_half_away,
    scale_from_log2,
    upsample_flow,
    upsample_frame,
)

from tests.conftest import noise_frame


def test_box_halve_rounds():
    assert box_halve(np.array([[10, 20], [30, 40]]))[0, 0] == 25
    assert box_halve(np.array([[0, 0], [0, 2]]))[0, 0] == 1
    assert box_halve(np.array([[0, 0], [0, 1]]))[0, 0] == 0


def test_downsample_constant_and_identity():
    frame = Frame.constant(93, 64, 64)
    low = downsample_frame(frame, 8)
    assert low.dims == (8, 8)
    assert np.all(low.planes == 93)
    assert downsample_frame(frame, 1) is frame


def test_downsample_tracks_true_size():
    frame = noise_frame(100, 50)
    low = downsample_frame(frame, 4)
    assert low.dims == (32, 16)
    assert (low.width, low.height) == (25, 13)


def test_bilinear_phase():
    row = bilinear_upsample(np.array([[0, 100]]), 2)
    assert row.shape == (2, 4)
    assert np.allclose(row[0], [0, 25, 75, 100])


def test_upsample_frame_constant():
    frame = Frame.constant(17, 64, 64)
    low = downsample_frame(frame, 4)
    up = upsample_frame(low, 4, frame.dims)
    assert np.array_equal(up.planes, frame.planes)


def test_upsample_frame_target_mismatch():
    low = Frame.constant(0, 16, 16, multiple=16)
    with pytest.raises(DataError):
        upsample_frame(low, 2, (64, 64))


def test_upsample_flow_scales_vectors():
    flow = FlowField.constant(3, -2, 8, 8)
    up = upsample_flow(flow, 2, (16, 16))
    assert up.dims == (16, 16)
    assert np.all(up.dx == 6)
    assert np.all(up.dy == -4)


def test_upsample_flow_rounding_is_symmetric():
    flow = FlowField(np.array([[1, 2]] * 2, dtype=np.int32), np.zeros((2, 2), dtype=np.int32))
    up = upsample_flow(flow, 2, (4, 4))
    down = upsample_flow(-flow, 2, (4, 4))
    assert np.array_equal(up.dx, -down.dx)


def test_round_half_away():
    assert list(round_half_away(np.array([-2.5, -0.5, 0.5, 1.49, 2.5]))) == [-3, -1, 1, 1, 3]


def test_scale_codes():
    assert [log2_scale(s) for s in (1, 2, 4, 8)] == [0, 1, 2, 3]
    assert [scale_from_log2(c) for c in range(4)] == [1, 2, 4, 8]
    with pytest.raises(ConfigError):
        check_scale(3)
    with pytest.raises(ConfigError):
        scale_from_log2(4)


def test_downsampling_composes_and_keeps_the_mean():
    frame = noise_frame(64, 64, seed=30)
    assert np.array_equal(downsample_frame(frame, 4).planes, downsample_frame(downsample_frame(frame, 2), 2).planes)
    assert np.array_equal(downsample_frame(frame, 8).planes, downsample_frame(downsample_frame(frame, 4), 2).planes)
    for s in (2, 4, 8):
        # 每次 2× 取整最多带来 +0.125 的平均偏差
        low = downsample_frame(frame, s)
        assert abs(low.planes.mean() - frame.planes.mean()) <= 0.6
