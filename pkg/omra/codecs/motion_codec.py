"""条件运动编码：块格点上 矢量 − 预测矢量，再按行做左邻差分，se 码按光栅顺序写出。

平面顺序 past.dx, past.dy, future.dx, future.dy。格点层面无损，有损只来自格点子采样。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from omra.codecs.entropy import BitSink, BitSource
from omra.core.errors import BitstreamError, DataError
from omra.motion.field import FlowField, flow_from_lattice, sample_lattice

logger = logging.getLogger(__name__)

MOTION_GRID = 8


@dataclass(frozen=True)
class MotionPayload:
    data: bytes
    bit_count: int
    zero_residual: bool = False

    @property
    def serialized(self) -> bytes:
        """写入码流的字节；残差全零时为空，解码端按全零残差处理。"""
        return b"" if self.zero_residual else self.data


def _left_diff(r: np.ndarray) -> np.ndarray:
    d = r.copy()
    d[:, 1:] = r[:, 1:] - r[:, :-1]
    return d


def _check_dims(fields: tuple[FlowField, ...], grid: int) -> tuple[int, int]:
    dims = fields[0].dims
    for f in fields[1:]:
        if f.dims != dims:
            raise DataError(f"flow dimension mismatch: {f.dims} vs {dims}")
    if dims[0] % grid or dims[1] % grid:
        raise DataError(f"flow dims {dims[0]}x{dims[1]} not divisible by grid {grid}")
    return dims


def encode_flows(
    m_past: FlowField,
    m_future: FlowField,
    mp_past: FlowField,
    mp_future: FlowField,
    grid: int = MOTION_GRID,
) -> tuple[MotionPayload, FlowField, FlowField]:
    """返回 (payload, m̂_past, m̂_future)；m̂ 与解码端逐位一致。"""
    width, height = _check_dims((m_past, m_future, mp_past, mp_future), grid)
    sink = BitSink()
    lattices: list[np.ndarray] = []
    nonzero = False
    for m, mp in ((m_past, mp_past), (m_future, mp_future)):
        for comp in ("dx", "dy"):
            lat = sample_lattice(getattr(m, comp), grid)
            pred = sample_lattice(getattr(mp, comp), grid)
            diffs = _left_diff(lat.astype(np.int64) - pred)
            nonzero = nonzero or bool(diffs.any())
            for v in diffs.ravel().tolist():
                sink.se_write(v)
            lattices.append(lat)
    payload = MotionPayload(sink.getvalue(), sink.bit_count, zero_residual=not nonzero)
    logger.debug("motion payload %d bits for %dx%d lattice", payload.bit_count, width // grid, height // grid)
    m_hat_past = flow_from_lattice(lattices[0], lattices[1], grid, width, height)
    m_hat_future = flow_from_lattice(lattices[2], lattices[3], grid, width, height)
    return payload, m_hat_past, m_hat_future


def decode_flows(
    payload: MotionPayload | bytes,
    mp_past: FlowField,
    mp_future: FlowField,
    dims: tuple[int, int],
    grid: int = MOTION_GRID,
    limit: int | None = None,
) -> tuple[FlowField, FlowField]:
    """limit 为解码矢量分量的最大幅值（1/4 像素单位）；超出视为码流损坏。空 payload 表示残差全零。"""
    data = payload.data if isinstance(payload, MotionPayload) else payload
    width, height = dims
    _check_dims((mp_past, mp_future), grid)
    if mp_past.dims != (width, height):
        raise DataError(f"predictor dims {mp_past.dims} != {dims}")
    nby, nbx = height // grid, width // grid
    source = BitSource(data)
    lattices: list[np.ndarray] = []
    for mp in (mp_past, mp_future):
        for comp in ("dx", "dy"):
            if data:
                diffs = np.array([source.se_read() for _ in range(nby * nbx)], dtype=np.int64).reshape(nby, nbx)
            else:
                diffs = np.zeros((nby, nbx), dtype=np.int64)
            residual = np.cumsum(diffs, axis=1)
            lat = residual + sample_lattice(getattr(mp, comp), grid)
            if limit is not None and lat.size and int(np.abs(lat).max()) > limit:
                raise BitstreamError(f"motion vector magnitude {int(np.abs(lat).max())} exceeds {limit}")
            lattices.append(lat.astype(np.int32))
    return (
        flow_from_lattice(lattices[0], lattices[1], grid, width, height),
        flow_from_lattice(lattices[2], lattices[3], grid, width, height),
    )


__all__ = ["MOTION_GRID", "MotionPayload", "encode_flows", "decode_flows"]
