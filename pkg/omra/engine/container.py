"""码流容器（小端）：序列头 + 按编码顺序的帧记录。

序列头：magic "OMRA"、version u8、variant u8、fixed_s u8（log2）、width u16、height u16、
frame_count u16、intra_period u8、q_base u16（0.1 单位）、lambda u32（0.01 单位），
以及估计器参数 pyramid_levels / block / search_radius 各 u8（解码端需重跑运动场预测）。
帧记录：帧头 u8（bits 7–6 类型，bits 5–4 log2 s），LEB128 运动字节数、运动字节，LEB128 纹理字节数、纹理字节。
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum

from omra.core.errors import BitstreamError
from omra.core.gop import FrameKind

MAGIC = b"OMRA"
VERSION = 1
_HEADER = struct.Struct("<4sBBBHHHBHIBBB")


class Variant(IntEnum):
    OMRA = 0
    VARIANT_A = 1
    VARIANT_B = 2
    FIXED = 3

    @property
    def label(self) -> str:
        return {0: "omra", 1: "a", 2: "b", 3: "fixed"}[int(self)]


def leb128_encode(value: int) -> bytes:
    if value < 0:
        raise ValueError("LEB128 value must be non-negative")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def leb128_decode(data: bytes, pos: int) -> tuple[int, int]:
    """返回 (值, 新位置)。"""
    value = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise BitstreamError("truncated LEB128 length")
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7
        if shift > 63:
            raise BitstreamError("LEB128 length too long")


def frame_header_byte(kind: FrameKind, log2_s: int) -> int:
    return (int(kind) << 6) | ((log2_s & 0x3) << 4)


def parse_frame_header(byte: int) -> tuple[FrameKind, int]:
    if byte & 0x0F:
        raise BitstreamError(f"reserved frame header bits set: {byte:#04x}")
    kind_code = byte >> 6
    if kind_code > 2:
        raise BitstreamError(f"invalid frame kind {kind_code}")
    return FrameKind(kind_code), (byte >> 4) & 0x3


def frame_overhead_bits(motion_len: int, texture_len: int) -> int:
    """帧头与两个长度字段的比特数。"""
    return 8 * (1 + len(leb128_encode(motion_len)) + len(leb128_encode(texture_len)))


@dataclass(frozen=True)
class BitstreamHeader:
    variant: Variant
    fixed_log2_s: int
    width: int
    height: int
    frame_count: int
    intra_period: int
    q_base_tenths: int
    lambda_hundredths: int
    pyramid_levels: int
    block: int
    search_radius: int
    magic: bytes = MAGIC
    version: int = VERSION

    def pack(self) -> bytes:
        try:
            return _HEADER.pack(
                self.magic,
                self.version,
                int(self.variant),
                self.fixed_log2_s,
                self.width,
                self.height,
                self.frame_count,
                self.intra_period,
                self.q_base_tenths,
                self.lambda_hundredths,
                self.pyramid_levels,
                self.block,
                self.search_radius,
            )
        except struct.error as e:
            raise BitstreamError(f"header field out of range: {e}") from e

    @classmethod
    def unpack(cls, data: bytes) -> "BitstreamHeader":
        if len(data) < 4 or data[:4] != MAGIC:
            raise BitstreamError("bad magic: not an OMRA bitstream")
        if len(data) < _HEADER.size:
            raise BitstreamError("truncated sequence header")
        fields = _HEADER.unpack_from(data)
        if fields[1] != VERSION:
            raise BitstreamError(f"unsupported version {fields[1]}")
        try:
            variant = Variant(fields[2])
        except ValueError as e:
            raise BitstreamError(f"unknown variant code {fields[2]}") from e
        return cls(
            variant=variant,
            fixed_log2_s=fields[3],
            width=fields[4],
            height=fields[5],
            frame_count=fields[6],
            intra_period=fields[7],
            q_base_tenths=fields[8],
            lambda_hundredths=fields[9],
            pyramid_levels=fields[10],
            block=fields[11],
            search_radius=fields[12],
        )


@dataclass(frozen=True)
class FrameRecord:
    kind: FrameKind
    log2_s: int
    motion: bytes
    texture: bytes

    @property
    def total_bits(self) -> int:
        return frame_overhead_bits(len(self.motion), len(self.texture)) + 8 * (len(self.motion) + len(self.texture))

    def pack(self) -> bytes:
        return b"".join((
            bytes([frame_header_byte(self.kind, self.log2_s)]),
            leb128_encode(len(self.motion)),
            self.motion,
            leb128_encode(len(self.texture)),
            self.texture,
        ))


@dataclass
class Bitstream:
    header: BitstreamHeader
    records: list[FrameRecord] = field(default_factory=list)

    def to_bytes(self) -> bytes:
        return self.header.pack() + b"".join(r.pack() for r in self.records)

    @property
    def total_bits(self) -> int:
        return 8 * len(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "Bitstream":
        header = BitstreamHeader.unpack(data)
        pos = _HEADER.size
        records: list[FrameRecord] = []
        for i in range(header.frame_count):
            if pos >= len(data):
                raise BitstreamError(f"frame {i} (coding order): truncated stream")
            kind, log2_s = parse_frame_header(data[pos])
            pos += 1
            chunks = []
            for _ in range(2):
                n, pos = leb128_decode(data, pos)
                if pos + n > len(data):
                    raise BitstreamError(f"frame {i} (coding order): truncated payload")
                chunks.append(bytes(data[pos : pos + n]))
                pos += n
            records.append(FrameRecord(kind, log2_s, chunks[0], chunks[1]))
        if pos != len(data):
            raise BitstreamError(f"{len(data) - pos} trailing bytes after last frame")
        return cls(header, records)


__all__ = [
    "MAGIC",
    "VERSION",
    "Variant",
    "leb128_encode",
    "leb128_decode",
    "frame_header_byte",
    "parse_frame_header",
    "frame_overhead_bits",
    "BitstreamHeader",
    "FrameRecord",
    "Bitstream",
]
