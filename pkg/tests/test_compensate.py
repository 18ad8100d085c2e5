from __future__ import annotations

import numpy as np
import pytest

from omra.core.errors import DataError
from omra.core.frame import Frame
from omra.motion.compensate import synthesize_predictor, warp
from omra.motion.field import FlowField

from tests.conftest import noise_frame


def _row(values) -> Frame:
    planes = np.array([[values]] * 3, dtype=np.uint8)
    return Frame(planes, len(values), 1)


def test_zero_flow_is_identity():
    ref = noise_frame(64, 64, seed=1)
    out, mask = warp(ref, FlowField.zeros(64, 64))
    assert np.array_equal(out.planes, ref.planes)
    assert mask.all()


def test_quarter_pel_interpolation():
    ref = _row([0, 100, 200])
    out, mask = warp(ref, FlowField.constant(2, 0, 3, 1))
    assert out.planes[0, 0].tolist() == [50, 150, 200]
    assert mask[0].tolist() == [True, True, False]


def test_whole_pixel_shift():
    ref = noise_frame(64, 64, seed=2)
    out, mask = warp(ref, FlowField.constant(4, 0, 64, 64))
    assert np.array_equal(out.planes[:, :, :-1], ref.planes[:, :, 1:])
    assert not mask[:, -1].any()
    assert mask[:, :-1].all()


def test_warp_dimension_mismatch():
    with pytest.raises(DataError):
        warp(noise_frame(64, 64), FlowField.zeros(32, 32))


def test_identical_references_with_zero_flow():
    ref = noise_frame(64, 64, seed=3)
    zero = FlowField.zeros(64, 64)
    assert np.array_equal(synthesize_predictor(ref, ref, zero, zero).planes, ref.planes)


def test_average_of_both_references():
    past, future = Frame.constant(100, 64, 64), Frame.constant(200, 64, 64)
    zero = FlowField.zeros(64, 64)
    assert np.all(synthesize_predictor(past, future, zero, zero).planes == 150)
    past, future = Frame.constant(100, 64, 64), Frame.constant(201, 64, 64)
    assert np.all(synthesize_predictor(past, future, zero, zero).planes == 151)


def test_only_valid_reference_is_used():
    past, future = Frame.constant(100, 64, 64), Frame.constant(200, 64, 64)
    outside = FlowField.constant(4 * 64, 0, 64, 64)
    zero = FlowField.zeros(64, 64)
    assert np.all(synthesize_predictor(past, future, outside, zero).planes == 200)
    assert np.all(synthesize_predictor(past, future, zero, outside).planes == 100)
    # 两路都越界时取钳位样本均值
    assert np.all(synthesize_predictor(past, future, outside, outside).planes == 150)


def test_blending_is_symmetric_in_the_references(rng):
    past, future = noise_frame(64, 64, seed=4), noise_frame(64, 64, seed=5)
    flows = [FlowField(rng.integers(-80, 81, (64, 64)), rng.integers(-80, 81, (64, 64))) for _ in range(2)]
    forward = synthesize_predictor(past, future, flows[0], flows[1])
    swapped = synthesize_predictor(future, past, flows[1], flows[0])
    assert np.array_equal(forward.planes, swapped.planes)
