"""空间重采样：2× 盒式下采样迭代、半像素相位对齐的双线性上采样，以及运动场上采样（矢量 ×s）。"""
from __future__ import annotations

import numpy as np

from omra.core.errors import ConfigError, DataError
from omra.core.frame import Frame
from omra.motion.field import FlowField

SCALE_FACTORS = (1, 2, 4, 8)


def check_scale(s: int) -> int:
    s = int(s)
    if s not in SCALE_FACTORS:
        raise ConfigError(f"scale factor must be one of {SCALE_FACTORS}, got {s}")
    return s


def log2_scale(s: int) -> int:
    return check_scale(s).bit_length() - 1


def scale_from_log2(code: int) -> int:
    if not 0 <= code <= 3:
        raise ConfigError(f"log2 scale out of range: {code}")
    return 1 << code


def box_halve(arr: np.ndarray) -> np.ndarray:
    """最后两维做一次 2×2 均值，四舍五入（样本非负，half 远离零即 +2 后整除）。奇数尺寸先边缘复制。"""
    h, w = arr.shape[-2:]
    if h % 2 or w % 2:
        pad = [(0, 0)] * (arr.ndim - 2) + [(0, h % 2), (0, w % 2)]
        arr = np.pad(arr, pad, mode="edge")
    a = arr.astype(np.int32)
    total = a[..., 0::2, 0::2] + a[..., 1::2, 0::2] + a[..., 0::2, 1::2] + a[..., 1::2, 1::2]
    return (total + 2) // 4


def downsample_frame(frame: Frame, s: int) -> Frame:
    s = check_scale(s)
    if s == 1:
        return frame
    if frame.padded_width % s or frame.padded_height % s:
        raise DataError(f"frame {frame.padded_width}x{frame.padded_height} not divisible by {s}")
    planes = frame.planes
    width, height = frame.width, frame.height
    for _ in range(log2_scale(s)):
        planes = box_halve(planes)
        width, height = -(-width // 2), -(-height // 2)
    return Frame(planes.astype(np.uint8), width, height)


def _axis_weights(n_in: int, s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # 输出 i 采样输入 (i + 0.5)/s − 0.5，越界钳位到边缘
    pos = (np.arange(n_in * s) + 0.5) / s - 0.5
    pos = np.clip(pos, 0.0, n_in - 1)
    i0 = np.floor(pos).astype(np.intp)
    i1 = np.minimum(i0 + 1, n_in - 1)
    return i0, i1, pos - i0


def bilinear_upsample(arr: np.ndarray, s: int) -> np.ndarray:
    """最后两维放大 s 倍，返回 float64（未取整）。"""
    h, w = arr.shape[-2:]
    y0, y1, fy = _axis_weights(h, s)
    x0, x1, fx = _axis_weights(w, s)
    a = arr.astype(np.float64)
    rows = a[..., y0, :] * (1.0 - fy)[:, None] + a[..., y1, :] * fy[:, None]
    return rows[..., x0] * (1.0 - fx) + rows[..., x1] * fx


def round_half_away(v: np.ndarray) -> np.ndarray:
    return np.sign(v) * np.floor(np.abs(v) + 0.5)


def _check_target(src: tuple[int, int], s: int, target: tuple[int, int]) -> None:
    if (src[0] * s, src[1] * s) != tuple(target):
        raise DataError(f"target {target[0]}x{target[1]} != {s} x {src[0]}x{src[1]}")


def upsample_frame(frame: Frame, s: int, target: tuple[int, int]) -> Frame:
    """target 为 (宽, 高) 平面尺寸，必须等于 s 倍输入。"""
    s = check_scale(s)
    _check_target(frame.dims, s, target)
    if s == 1:
        return frame
    up = np.clip(np.floor(bilinear_upsample(frame.planes, s) + 0.5), 0, 255).astype(np.uint8)
    return Frame(up, min(frame.width * s, target[0]), min(frame.height * s, target[1]))


def upsample_flow(flow: FlowField, s: int, target: tuple[int, int]) -> FlowField:
    """双线性插值后每个矢量乘以 s：低分辨率下 d 像素即原分辨率下 s·d 像素。"""
    s = check_scale(s)
    _check_target(flow.dims, s, target)
    if s == 1:
        return flow
    dx = round_half_away(bilinear_upsample(flow.dx, s) * s)
    dy = round_half_away(bilinear_upsample(flow.dy, s) * s)
    return FlowField(dx.astype(np.int32), dy.astype(np.int32))


__all__ = [
    "SCALE_FACTORS",
    "check_scale",
    "log2_scale",
    "scale_from_log2",
    "box_halve",
    "downsample_frame",
    "bilinear_upsample",
    "round_half_away",
    "upsample_frame",
    "upsample_flow",
]
