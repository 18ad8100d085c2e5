"""后向 warp 与双向时域预测合成。"""
from __future__ import annotations

import numpy as np

from omra.core.errors import DataError
from omra.core.frame import Frame
from omra.motion.field import QPEL, FlowField


def _taps(q_pos: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """1/4 像素坐标 → (i0, i1, 右权重 0..3, 是否在帧内)。越界坐标钳位到边缘。"""
    valid = (q_pos >= 0) & (q_pos <= QPEL * (size - 1))
    q_pos = np.clip(q_pos, 0, QPEL * (size - 1))
    i0 = q_pos // QPEL
    frac = q_pos - i0 * QPEL
    i1 = np.minimum(i0 + 1, size - 1)
    return i0, i1, frac, valid


def warp(ref: Frame, flow: FlowField) -> tuple[Frame, np.ndarray]:
    """在 p + flow(p) 处双线性采样 ref；返回 (warp 结果, 有效掩码)。"""
    if ref.dims != flow.dims:
        raise DataError(f"dimension mismatch: frame {ref.dims} vs flow {flow.dims}")
    width, height = ref.dims
    gy, gx = np.mgrid[0:height, 0:width]
    y0, y1, fy, vy = _taps(QPEL * gy + flow.dy, height)
    x0, x1, fx, vx = _taps(QPEL * gx + flow.dx, width)
    p = ref.planes.astype(np.int32)
    acc = (
        p[:, y0, x0] * ((QPEL - fy) * (QPEL - fx))
        + p[:, y0, x1] * ((QPEL - fy) * fx)
        + p[:, y1, x0] * (fy * (QPEL - fx))
        + p[:, y1, x1] * (fy * fx)
    )
    out = (acc + QPEL * QPEL // 2) // (QPEL * QPEL)
    return Frame(out.astype(np.uint8), ref.width, ref.height), vy & vx


def synthesize_predictor(
    ref_past: Frame,
    ref_future: Frame,
    flow_past: FlowField,
    flow_future: FlowField,
) -> Frame:
    """两路 warp 按有效性混合：都有效取均值，仅一路有效取该路，都无效取钳位样本均值。"""
    if ref_past.dims != ref_future.dims:
        raise DataError(f"dimension mismatch: {ref_past.dims} vs {ref_future.dims}")
    w_p, m_p = warp(ref_past, flow_past)
    w_f, m_f = warp(ref_future, flow_future)
    a = w_p.planes.astype(np.int32)
    b = w_f.planes.astype(np.int32)
    out = (a + b + 1) // 2
    out = np.where((m_p & ~m_f)[None], a, out)
    out = np.where((m_f & ~m_p)[None], b, out)
    return Frame(out.astype(np.uint8), ref_past.width, ref_past.height)


__all__ = ["warp", "synthesize_predictor"]
