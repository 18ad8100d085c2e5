from __future__ import annotations

import numpy as np
import pytest

from omra.cli.synth import SynthSpec, synth
from omra.core.frame import Frame, Sequence


def noise_rgb(width: int, height: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 256, size=(height, width, 3), dtype=np.uint8)


def noise_frame(width: int, height: int, seed: int = 0) -> Frame:
    return Frame.from_rgb(noise_rgb(width, height, seed))


def noise_sequence(width: int, height: int, frames: int, seed: int = 0) -> Sequence:
    return Sequence.of(noise_frame(width, height, seed * 1000 + t) for t in range(frames))


def pan_sequence(
    width: int = 64,
    height: int = 64,
    frames: int = 5,
    velocity: tuple[float, float] = (3.0, 0.0),
    seed: int = 0,
    noise: float = 0.0,
) -> Sequence:
    return synth(SynthSpec(width, height, frames, velocity, seed, noise))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_pan() -> Sequence:
    return pan_sequence(64, 64, 5, (2.0, 1.0), seed=3)


@pytest.fixture(autouse=True)
def _isolated_config(tmp_path, monkeypatch):
    """测试不读写真实用户配置。"""
    monkeypatch.setenv("OMRA_CONFIG", str(tmp_path / "omra-config.yaml"))
    monkeypatch.setenv("LANG", "en_US.UTF-8")
