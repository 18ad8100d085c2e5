from __future__ import annotations

import numpy as np
import pytest

from omra.cli.synth import SynthSpec, synth
from omra.core.errors import ConfigError


def test_static_frames_are_identical():
    seq = synth(SynthSpec(64, 48, 4, (0.0, 0.0), texture_seed=1))
    for frame in seq:
        assert np.array_equal(frame.planes, seq[0].planes)


def test_static_motion_ignores_velocity():
    seq = synth(SynthSpec(64, 48, 3, (5.0, 1.0), texture_seed=1, motion="static"))
    assert np.array_equal(seq[2].planes, seq[0].planes)


def test_pan_is_a_circular_shift():
    seq = synth(SynthSpec(64, 64, 5, (3.0, 0.0), texture_seed=2))
    first = seq[0].to_rgb()
    for t in range(5):
        assert np.array_equal(seq[t].to_rgb(), np.roll(first, 3 * t, axis=1))


def test_deterministic():
    spec = SynthSpec(80, 40, 3, (1.5, -0.5), texture_seed=3, noise_sigma=2.0)
    a, b = synth(spec), synth(spec)
    for x, y in zip(a, b):
        assert np.array_equal(x.planes, y.planes)
    other = synth(SynthSpec(80, 40, 3, (1.5, -0.5), texture_seed=4, noise_sigma=2.0))
    assert not np.array_equal(a[0].planes, other[0].planes)


def test_texture_range_and_padding():
    seq = synth(SynthSpec(100, 50, 1))
    rgb = seq[0].to_rgb()
    assert rgb.shape == (50, 100, 3)
    assert rgb.min() >= 16 and rgb.max() <= 240
    assert seq[0].dims == (128, 64)


@pytest.mark.parametrize(
    "kwargs",
    [dict(width=0), dict(frame_count=0), dict(noise_sigma=-1.0), dict(motion="zoom")],
)
def test_invalid_spec(kwargs):
    with pytest.raises(ConfigError):
        SynthSpec(**kwargs)
