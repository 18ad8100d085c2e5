"""确定性合成测试序列：多倍频程随机纹理，循环平移，加性高斯噪声。"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from omra.core.errors import ConfigError
from omra.core.frame import Frame, Sequence

logger = logging.getLogger(__name__)

MOTIONS = ("pan_wrap", "static")
# (格子尺寸, 幅度)：粗尺度保证金字塔顶层也有可匹配的结构
_OCTAVES = ((32, 1.0), (16, 0.6), (8, 0.35), (4, 0.2))


@dataclass(frozen=True)
class SynthSpec:
    width: int = 256
    height: int = 256
    frame_count: int = 33
    velocity: tuple[float, float] = (3.0, 0.0)
    texture_seed: int = 0
    noise_sigma: float = 0.0
    motion: str = "pan_wrap"

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0 or self.frame_count <= 0:
            raise ConfigError(f"invalid synth geometry {self.width}x{self.height}x{self.frame_count}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise sigma must be >= 0, got {self.noise_sigma}")
        if self.motion not in MOTIONS:
            raise ConfigError(f"unknown motion {self.motion!r}, expected one of {', '.join(MOTIONS)}")
        object.__setattr__(self, "velocity", (float(self.velocity[0]), float(self.velocity[1])))


def _texture(width: int, height: int, seed: int) -> np.ndarray:
    """(H, W, 3) float64 周期纹理，取值约在 [16, 240]。"""
    rng = np.random.default_rng(seed)
    out = np.zeros((height, width, 3), dtype=np.float64)
    for cell, amp in _OCTAVES:
        gh, gw = max(1, -(-height // cell)), max(1, -(-width // cell))
        for c in range(3):
            grid = rng.standard_normal((gh, gw))
            up = ndimage.zoom(grid, (height / gh, width / gw), order=1, mode="grid-wrap", grid_mode=True)
            out[..., c] += amp * up[:height, :width]
    lo, hi = out.min(), out.max()
    if hi - lo < 1e-12:
        return np.full_like(out, 128.0)
    return 16.0 + (out - lo) * (224.0 / (hi - lo))


def _shift(base: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """内容向 (+dx, +dy) 循环平移；整数位移用 roll，非整数用双线性。"""
    if float(dx).is_integer() and float(dy).is_integer():
        return np.roll(base, (int(dy), int(dx)), axis=(0, 1))
    return ndimage.shift(base, (dy, dx, 0.0), order=1, mode="grid-wrap")


def synth(spec: SynthSpec) -> Sequence:
    base = _texture(spec.width, spec.height, spec.texture_seed)
    vx, vy = spec.velocity if spec.motion == "pan_wrap" else (0.0, 0.0)
    frames = []
    for t in range(spec.frame_count):
        img = _shift(base, vx * t, vy * t)
        if spec.noise_sigma > 0:
            rng = np.random.default_rng([spec.texture_seed, t])
            img = img + rng.normal(0.0, spec.noise_sigma, img.shape)
        rgb = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)
        frames.append(Frame.from_rgb(rgb))
    logger.debug(
        "Synthesized %d frames %dx%d (%s, v=%s, sigma=%.2f)",
        spec.frame_count,
        spec.width,
        spec.height,
        spec.motion,
        spec.velocity,
        spec.noise_sigma,
    )
    return Sequence.of(frames)


__all__ = ["MOTIONS", "SynthSpec", "synth"]
