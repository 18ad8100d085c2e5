"""稠密运动场（1/4 像素整数单位）与块格点 ↔ 稠密场的互转。

格点锚定在每个 g×g 块内像素 (g/2, g/2)；稠密场为格点间的整数精确双线性插值，
因此在锚点处采样稠密场恰好得到格点本身。
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from omra.core.errors import BitstreamError, DataError

QPEL = 4  # 存储值 q 表示 q/4 像素
_DUMP_HEADER = struct.Struct("<HH")


@dataclass(frozen=True, eq=False)
class FlowField:
    """后向运动场：dx, dy 形状 (H, W)，int32，1/4 像素单位。"""

    dx: np.ndarray
    dy: np.ndarray

    def __post_init__(self) -> None:
        if self.dx.shape != self.dy.shape or self.dx.ndim != 2:
            raise DataError(f"flow components mismatch: {self.dx.shape} vs {self.dy.shape}")
        for name in ("dx", "dy"):
            arr = getattr(self, name)
            if arr.dtype != np.int32:
                object.__setattr__(self, name, arr.astype(np.int32))
            getattr(self, name).flags.writeable = False

    @property
    def width(self) -> int:
        return int(self.dx.shape[1])

    @property
    def height(self) -> int:
        return int(self.dx.shape[0])

    @property
    def dims(self) -> tuple[int, int]:
        return self.width, self.height

    @classmethod
    def zeros(cls, width: int, height: int) -> "FlowField":
        z = np.zeros((height, width), dtype=np.int32)
        return cls(z, z.copy())

    @classmethod
    def constant(cls, qx: int, qy: int, width: int, height: int) -> "FlowField":
        return cls(
            np.full((height, width), qx, dtype=np.int32),
            np.full((height, width), qy, dtype=np.int32),
        )

    def __neg__(self) -> "FlowField":
        return FlowField(-self.dx, -self.dy)

    def equals(self, other: "FlowField") -> bool:
        return np.array_equal(self.dx, other.dx) and np.array_equal(self.dy, other.dy)

    def max_abs(self) -> int:
        if self.dx.size == 0:
            return 0
        return int(max(np.abs(self.dx).max(), np.abs(self.dy).max()))

    def to_bytes(self) -> bytes:
        """头部 (width, height)，随后 dx 平面、dy 平面，小端 int16。"""
        return (
            _DUMP_HEADER.pack(self.width, self.height)
            + self.dx.astype("<i2").tobytes()
            + self.dy.astype("<i2").tobytes()
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "FlowField":
        if len(data) < _DUMP_HEADER.size:
            raise BitstreamError("flow dump truncated (header)")
        width, height = _DUMP_HEADER.unpack_from(data)
        plane = 2 * width * height
        body = data[_DUMP_HEADER.size :]
        if len(body) < 2 * plane:
            raise BitstreamError(f"flow dump truncated ({len(body)} of {2 * plane} bytes)")
        dx = np.frombuffer(body[:plane], dtype="<i2").reshape(height, width)
        dy = np.frombuffer(body[plane : 2 * plane], dtype="<i2").reshape(height, width)
        return cls(dx.astype(np.int32), dy.astype(np.int32))


def _round_div(num: np.ndarray, den: int) -> np.ndarray:
    """整数除法，四舍五入且 half 远离零（对取负对称）。"""
    mag = (2 * np.abs(num) + den) // (2 * den)
    return np.where(num < 0, -mag, mag)


def _axis_taps(length: int, grid: int, nodes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """每个输出位置的 (左节点, 右节点, 右节点权重 0..grid)。"""
    pos = np.arange(length) - grid // 2
    i0 = np.floor_divide(pos, grid)
    frac = pos - i0 * grid
    below = i0 < 0
    above = i0 >= nodes - 1
    i0 = np.clip(i0, 0, nodes - 1)
    frac = np.where(below | above, 0, frac)
    i1 = np.minimum(i0 + 1, nodes - 1)
    return i0, i1, frac


def densify_lattice(lattice: np.ndarray, grid: int, width: int, height: int) -> np.ndarray:
    """(nby, nbx) 格点 → (height, width) 稠密分量，整数精确。"""
    nby, nbx = lattice.shape
    y0, y1, fy = _axis_taps(height, grid, nby)
    x0, x1, fx = _axis_taps(width, grid, nbx)
    lat = lattice.astype(np.int64)
    # 先行后列，权重和为 grid²
    rows = lat[y0, :] * (grid - fy)[:, None] + lat[y1, :] * fy[:, None]
    dense = rows[:, x0] * (grid - fx)[None, :] + rows[:, x1] * fx[None, :]
    return _round_div(dense, grid * grid).astype(np.int32)


def sample_lattice(component: np.ndarray, grid: int) -> np.ndarray:
    """在每块锚点处采样稠密分量。"""
    h, w = component.shape
    if h % grid or w % grid:
        raise DataError(f"flow dims {w}x{h} not divisible by grid {grid}")
    return np.ascontiguousarray(component[grid // 2 :: grid, grid // 2 :: grid])


def flow_from_lattice(lat_dx: np.ndarray, lat_dy: np.ndarray, grid: int, width: int, height: int) -> FlowField:
    return FlowField(
        densify_lattice(lat_dx, grid, width, height),
        densify_lattice(lat_dy, grid, width, height),
    )


__all__ = [
    "QPEL",
    "FlowField",
    "densify_lattice",
    "sample_lattice",
    "flow_from_lattice",
]
