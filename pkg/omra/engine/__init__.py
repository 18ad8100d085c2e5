"""OMRA 编解码引擎：码流容器、RD 搜索编码器、解码器。"""
from __future__ import annotations

from omra.engine.container import Bitstream, BitstreamHeader, FrameRecord, Variant
from omra.engine.decoder import DecodedFrameInfo, DecodeResult, decode_sequence, decode_stream
from omra.engine.encoder import (
    EncodeResult,
    EncoderConfig,
    FrameReport,
    RdCandidate,
    encode_bframe_at_scale,
    encode_sequence,
    parse_scales,
    parse_variant,
    select_scale,
)

__all__ = [
    "Bitstream",
    "BitstreamHeader",
    "FrameRecord",
    "Variant",
    "EncoderConfig",
    "RdCandidate",
    "FrameReport",
    "EncodeResult",
    "encode_bframe_at_scale",
    "select_scale",
    "encode_sequence",
    "parse_variant",
    "parse_scales",
    "DecodedFrameInfo",
    "DecodeResult",
    "decode_stream",
    "decode_sequence",
]
