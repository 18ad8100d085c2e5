"""解码器：由码流头重建 GOP 计划与编码参数，按编码顺序逐帧重建。

运动场预测只依赖已解码参考帧，解码端重跑估计器即可得到与编码端一致的预测。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from omra.codecs import decode_flows, decode_intra, decode_residual
from omra.core.errors import BitstreamError, ConfigError
from omra.core.frame import PAD_MULTIPLE, Frame, Sequence, crop
from omra.core.gop import FrameKind, GopPlan, build_plan
from omra.core.metrics import bits_per_pixel
from omra.engine.container import Bitstream, BitstreamHeader, FrameRecord, Variant
from omra.engine.encoder import EncoderConfig, quant_params
from omra.engine.prediction import ReferencePair, coded_scale, compensate, vector_limit
from omra.motion import scale_from_log2

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecodedFrameInfo:
    coding_index: int
    display_index: int
    kind: FrameKind
    temporal_level: int
    scale: int
    motion_bits: int
    texture_bits: int
    total_bits: int


@dataclass
class DecodeResult:
    header: BitstreamHeader
    config: EncoderConfig
    plan: GopPlan
    frames: list[Frame]
    infos: list[DecodedFrameInfo]
    total_bits: int

    @property
    def bpp(self) -> float:
        return bits_per_pixel(self.total_bits, self.header.width, self.header.height, self.header.frame_count)

    def by_display(self) -> list[DecodedFrameInfo]:
        return sorted(self.infos, key=lambda i: i.display_index)

    def sequence(self) -> Sequence:
        """裁剪到头部真实尺寸的显示顺序序列。"""
        return Sequence.of(crop(f) for f in self.frames)


def _setup(header: BitstreamHeader) -> tuple[EncoderConfig, GopPlan]:
    if header.width == 0 or header.height == 0 or header.frame_count == 0:
        raise BitstreamError(f"empty geometry {header.width}x{header.height}x{header.frame_count}")
    try:
        cfg = EncoderConfig.from_header(header)
        plan = build_plan(header.frame_count, header.intra_period)
    except ConfigError as e:
        raise BitstreamError(f"invalid sequence header: {e}") from e
    return cfg, plan


def _decode_b(
    record: FrameRecord,
    cfg: EncoderConfig,
    refs: ReferencePair,
    s: int,
) -> Frame:
    variant = cfg.variant
    if variant is Variant.FIXED and s != cfg.fixed_scale:
        raise BitstreamError(f"frame signals s={s} in a fixed:{cfg.fixed_scale} stream")
    cs = coded_scale(variant, s)
    mp_past, mp_future = refs.predictors(cs)
    try:
        m_past, m_future = decode_flows(
            record.motion,
            mp_past,
            mp_future,
            mp_past.dims,
            limit=vector_limit(variant, s, cfg.estimator),
        )
    except ValueError as e:
        raise BitstreamError(f"corrupt motion payload: {e}") from e
    return compensate(variant, s, refs, m_past, m_future).predictor


def decode_stream(data: bytes) -> DecodeResult:
    """返回填充尺寸的重建帧（显示顺序）以及逐帧类型、s 与码率。"""
    bitstream = Bitstream.from_bytes(data)
    header = bitstream.header
    cfg, plan = _setup(header)
    dims = (-(-header.width // PAD_MULTIPLE) * PAD_MULTIPLE, -(-header.height // PAD_MULTIPLE) * PAD_MULTIPLE)
    recon: dict[int, Frame] = {}
    infos: list[DecodedFrameInfo] = []
    for coding_index, (entry, record) in enumerate(zip(plan, bitstream.records)):
        if record.kind is not entry.kind:
            raise BitstreamError(
                f"frame {entry.display_index}: kind {record.kind.short} does not match plan ({entry.kind.short})"
            )
        qp = quant_params(cfg, entry)
        if entry.kind is FrameKind.INTRA:
            if record.motion or record.log2_s:
                raise BitstreamError(f"frame {entry.display_index}: intra frame carries motion data")
            s = 1
            frame = decode_intra(record.texture, qp, header.width, header.height, dims)
        else:
            s = scale_from_log2(record.log2_s)
            refs = ReferencePair(recon[entry.ref_past], recon[entry.ref_future], cfg.estimator)
            predictor = _decode_b(record, cfg, refs, s)
            frame = decode_residual(record.texture, predictor, qp)
        recon[entry.display_index] = Frame(frame.planes, header.width, header.height)
        infos.append(
            DecodedFrameInfo(
                coding_index=coding_index,
                display_index=entry.display_index,
                kind=entry.kind,
                temporal_level=entry.temporal_level,
                scale=s,
                motion_bits=8 * len(record.motion),
                texture_bits=8 * len(record.texture),
                total_bits=record.total_bits,
            )
        )
    total_bits = 8 * len(data)
    logger.info(
        "Decoded %d frames (%dx%d, %s): %d bits",
        header.frame_count,
        header.width,
        header.height,
        cfg.label,
        total_bits,
    )
    return DecodeResult(header, cfg, plan, [recon[i] for i in range(header.frame_count)], infos, total_bits)


def decode_sequence(data: bytes) -> Sequence:
    return decode_stream(data).sequence()


__all__ = ["DecodedFrameInfo", "DecodeResult", "decode_stream", "decode_sequence"]
