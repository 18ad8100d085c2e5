"""残差 / 帧内纹理编码：8×8 正交 DCT-II、均匀量化、zigzag (run, level) 指数哥伦布码。

每块：ue(非零数)，随后每个非零系数 ue(前置零游程)、se(level)。无块结束符。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from omra.codecs.entropy import BitSink, BitSource
from omra.core.errors import BitstreamError, DataError
from omra.core.frame import Frame
from omra.core.gop import FrameKind

logger = logging.getLogger(__name__)

BLOCK = 8
LEVEL_STEP = 1.2  # 每深一个时间层级量化步长 ×1.2；非参考 B 帧再 ×1.2
INTRA_PREDICTOR = 128


def _zigzag_order(n: int = BLOCK) -> np.ndarray:
    cells = [(r, c) for r in range(n) for c in range(n)]
    cells.sort(key=lambda rc: (rc[0] + rc[1], rc[0] if (rc[0] + rc[1]) % 2 else -rc[0]))
    return np.array([r * n + c for r, c in cells], dtype=np.intp)


ZIGZAG = _zigzag_order()
UNZIGZAG = np.argsort(ZIGZAG)


@dataclass(frozen=True)
class QuantParams:
    q_base: float
    temporal_level: int = 0
    kind: FrameKind = FrameKind.INTRA

    @property
    def step(self) -> float:
        """Δ = q_base · 1.2^level（非参考 B 帧再 ×1.2），不小于 1。"""
        delta = self.q_base * LEVEL_STEP ** self.temporal_level
        if self.kind is FrameKind.NON_REF_B:
            delta *= LEVEL_STEP
        return max(1.0, float(delta))


@dataclass(frozen=True)
class TexturePayload:
    data: bytes
    bit_count: int


def dct8_forward(block: np.ndarray) -> np.ndarray:
    """最后两维 8×8 正交 DCT-II，前置维度批量处理。"""
    return dctn(np.asarray(block, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def dct8_inverse(coefs: np.ndarray) -> np.ndarray:
    return idctn(np.asarray(coefs, dtype=np.float64), type=2, norm="ortho", axes=(-2, -1))


def _to_blocks(planes: np.ndarray) -> np.ndarray:
    c, h, w = planes.shape
    return planes.reshape(c, h // BLOCK, BLOCK, w // BLOCK, BLOCK).transpose(0, 1, 3, 2, 4)


def _from_blocks(blocks: np.ndarray) -> np.ndarray:
    c, nby, nbx = blocks.shape[:3]
    return blocks.transpose(0, 1, 3, 2, 4).reshape(c, nby * BLOCK, nbx * BLOCK)


def _check(x: Frame, predictor: Frame) -> None:
    if x.dims != predictor.dims:
        raise DataError(f"dimension mismatch: {x.dims} vs {predictor.dims}")
    if x.padded_width % BLOCK or x.padded_height % BLOCK:
        raise DataError(f"frame {x.padded_width}x{x.padded_height} not a multiple of {BLOCK}")


def _quantize(residual: np.ndarray, step: float) -> np.ndarray:
    """残差平面 → (C, nby, nbx, 64) zigzag 顺序量化级。"""
    coefs = dct8_forward(_to_blocks(residual))
    scaled = coefs / step
    levels = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    c, nby, nbx = levels.shape[:3]
    return levels.reshape(c, nby, nbx, BLOCK * BLOCK)[..., ZIGZAG].astype(np.int64)


def _reconstruct(levels: np.ndarray, predictor: Frame, step: float) -> Frame:
    c, nby, nbx = levels.shape[:3]
    coefs = (levels[..., UNZIGZAG] * step).reshape(c, nby, nbx, BLOCK, BLOCK)
    residual = _from_blocks(dct8_inverse(coefs))
    out = np.clip(np.floor(predictor.planes + residual + 0.5), 0, 255).astype(np.uint8)
    return Frame(out, predictor.width, predictor.height)


def _write_levels(levels: np.ndarray) -> TexturePayload:
    sink = BitSink()
    flat = levels.reshape(-1, BLOCK * BLOCK)
    counts = np.count_nonzero(flat, axis=1)
    prev = -1
    for idx in np.flatnonzero(counts).tolist():
        # 中间的全零块各写 ue(0)
        sink.write_ones(idx - prev - 1)
        row = flat[idx]
        nz = np.flatnonzero(row).tolist()
        sink.ue_write(len(nz))
        last = -1
        for pos, level in zip(nz, row[nz].tolist()):
            sink.ue_write(pos - last - 1)
            sink.se_write(level)
            last = pos
        prev = idx
    sink.write_ones(flat.shape[0] - prev - 1)
    return TexturePayload(sink.getvalue(), sink.bit_count)


def _read_levels(data: bytes, shape: tuple[int, int, int]) -> np.ndarray:
    c, nby, nbx = shape
    total = c * nby * nbx
    flat = np.zeros((total, BLOCK * BLOCK), dtype=np.int64)
    source = BitSource(data)
    for idx in range(total):
        n = source.ue_read()
        if n == 0:
            continue
        if n > BLOCK * BLOCK:
            raise BitstreamError(f"block {idx}: {n} nonzero coefficients")
        pos = -1
        for _ in range(n):
            pos += source.ue_read() + 1
            if pos >= BLOCK * BLOCK:
                raise BitstreamError(f"block {idx}: zigzag overrun at index {pos}")
            flat[idx, pos] = source.se_read()
    return flat.reshape(c, nby, nbx, BLOCK * BLOCK)


def encode_residual(x: Frame, predictor: Frame, qp: QuantParams) -> tuple[TexturePayload, Frame]:
    """返回 (payload, x̂)；x̂ 与解码端逐位一致。"""
    _check(x, predictor)
    residual = x.planes.astype(np.int32) - predictor.planes.astype(np.int32)
    step = qp.step
    levels = _quantize(residual, step)
    payload = _write_levels(levels)
    recon = _reconstruct(levels, predictor, step)
    return payload, Frame(recon.planes, x.width, x.height)


def decode_residual(
    payload: TexturePayload | bytes,
    predictor: Frame,
    qp: QuantParams,
    dims: tuple[int, int] | None = None,
) -> Frame:
    data = payload.data if isinstance(payload, TexturePayload) else payload
    if dims is not None and tuple(dims) != predictor.dims:
        raise DataError(f"dimension mismatch: {dims} vs predictor {predictor.dims}")
    width, height = predictor.dims
    if width % BLOCK or height % BLOCK:
        raise DataError(f"frame {width}x{height} not a multiple of {BLOCK}")
    levels = _read_levels(data, (3, height // BLOCK, width // BLOCK))
    return _reconstruct(levels, predictor, qp.step)


def intra_params(q_base: float) -> QuantParams:
    return QuantParams(q_base, 0, FrameKind.INTRA)


def intra_predictor(width: int, height: int, padded: tuple[int, int]) -> Frame:
    planes = np.full((3, padded[1], padded[0]), INTRA_PREDICTOR, dtype=np.uint8)
    return Frame(planes, width, height)


def encode_intra(x: Frame, qp: QuantParams) -> tuple[TexturePayload, Frame]:
    """预测为常数 128 的同一流程；时间层级按 0 计。"""
    return encode_residual(x, intra_predictor(x.width, x.height, x.dims), intra_params(qp.q_base))


def decode_intra(payload: TexturePayload | bytes, qp: QuantParams, width: int, height: int, dims: tuple[int, int]) -> Frame:
    return decode_residual(payload, intra_predictor(width, height, dims), intra_params(qp.q_base))


__all__ = [
    "BLOCK",
    "ZIGZAG",
    "QuantParams",
    "TexturePayload",
    "dct8_forward",
    "dct8_inverse",
    "encode_residual",
    "decode_residual",
    "encode_intra",
    "decode_intra",
    "intra_params",
]
