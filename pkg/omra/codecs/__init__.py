"""运动与纹理载荷编解码，基于指数哥伦布比特流。"""
from __future__ import annotations

from omra.codecs.entropy import BitSink, BitSource
from omra.codecs.motion_codec import MOTION_GRID, MotionPayload, decode_flows, encode_flows
from omra.codecs.texture_codec import (
    QuantParams,
    TexturePayload,
    decode_intra,
    decode_residual,
    encode_intra,
    encode_residual,
)

__all__ = [
    "BitSink",
    "BitSource",
    "MOTION_GRID",
    "MotionPayload",
    "encode_flows",
    "decode_flows",
    "QuantParams",
    "TexturePayload",
    "encode_residual",
    "decode_residual",
    "encode_intra",
    "decode_intra",
]
