from __future__ import annotations

import numpy as np
import pytest

from omra.core.errors import BitstreamError
from omra.core.frame import Frame, Sequence
from omra.engine.container import Variant
from omra.engine.decoder import decode_sequence, decode_stream
from omra.engine.encoder import EncoderConfig, encode_sequence, parse_variant

from tests.conftest import noise_rgb, noise_sequence, pan_sequence

# (宽, 高, 帧数, intra_period, 内容, 变体)
CASES = [
    (64, 64, 3, 2, "noise", "omra"),
    (72, 40, 5, 4, "pan", "omra"),
    (100, 50, 5, 4, "pan", "a"),
    (33, 17, 3, 2, "noise", "b"),
    (128, 64, 5, 4, "pan", "fixed:2"),
    (64, 128, 5, 2, "pan", "omra"),
    (96, 96, 9, 8, "pan", "omra"),
    (65, 65, 3, 2, "noise", "a"),
    (130, 20, 5, 4, "noise", "fixed:8"),
    (48, 80, 5, 4, "pan", "b"),
    (64, 64, 9, 4, "pan", "fixed:1"),
    (17, 90, 3, 2, "pan", "omra"),
    (120, 72, 5, 4, "noise", "omra"),
    (80, 48, 5, 4, "pan", "fixed:4"),
    (64, 64, 17, 16, "pan", "omra"),
    (100, 100, 3, 2, "pan", "a"),
    (40, 40, 5, 4, "noise", "b"),
    (128, 128, 5, 4, "pan", "omra"),
    (70, 30, 3, 2, "pan", "b"),
    (64, 64, 5, 4, "noise", "a"),
]


def _sequence(width, height, frames, content, seed) -> Sequence:
    if content == "noise":
        return noise_sequence(width, height, frames, seed)
    velocity = (1.0 + seed % 4, float(seed % 3) - 1.0)
    return pan_sequence(width, height, frames, velocity, seed=seed, noise=1.0)


@pytest.mark.parametrize("case", range(len(CASES)))
def test_decoder_reproduces_encoder(case):
    width, height, frames, period, content, variant = CASES[case]
    seq = _sequence(width, height, frames, content, case)
    kind, fixed = parse_variant(variant)
    result = encode_sequence(seq, EncoderConfig(q_base=8 + case, intra_period=period, variant=kind, fixed_scale=fixed))
    decoded = decode_stream(result.data)
    for mine, theirs in zip(result.reconstructions, decoded.frames):
        assert np.array_equal(mine.planes, theirs.planes)
        assert (theirs.width, theirs.height) == (width, height)
    signaled = {i.display_index: i.scale for i in decoded.infos}
    for report in result.reports:
        assert signaled[report.display_index] == report.scale
        if report.kind.is_b and variant in ("omra", "a", "b"):
            assert report.candidate_costs[report.scale] <= report.candidate_costs[1]
    assert decoded.total_bits == result.total_bits


def test_dominance_over_full_resolution(small_pan):
    result = encode_sequence(small_pan, EncoderConfig(intra_period=4))
    for report in result.reports:
        if report.kind.is_b:
            assert report.candidate_costs[report.scale] <= report.candidate_costs[1]


def test_single_frame():
    seq = Sequence.of([Frame.from_rgb(noise_rgb(50, 30, seed=3))])
    result = encode_sequence(seq, EncoderConfig())
    decoded = decode_sequence(result.data)
    assert len(decoded) == 1
    assert np.array_equal(decoded[0].to_rgb(), result.reconstructions[0].to_rgb())


def test_decoded_sequence_is_cropped():
    seq = pan_sequence(100, 50, 3, (1.0, 0.0))
    decoded = decode_sequence(encode_sequence(seq, EncoderConfig(intra_period=2)).data)
    assert (decoded.width, decoded.height) == (100, 50)
    assert decoded[0].dims == (128, 64)


def test_corrupted_magic():
    data = bytearray(encode_sequence(pan_sequence(64, 64, 3), EncoderConfig(intra_period=2)).data)
    data[1] ^= 0xFF
    with pytest.raises(BitstreamError, match="magic"):
        decode_stream(bytes(data))


def test_frame_kind_must_follow_plan():
    data = bytearray(encode_sequence(pan_sequence(64, 64, 3), EncoderConfig(intra_period=2)).data)
    data[23] = 0x40
    with pytest.raises(BitstreamError, match="kind"):
        decode_stream(bytes(data))


def test_invalid_header_parameters():
    data = bytearray(encode_sequence(pan_sequence(64, 64, 3), EncoderConfig(intra_period=2)).data)
    data[13] = 3
    with pytest.raises(BitstreamError, match="header"):
        decode_stream(bytes(data))


def test_truncated_stream():
    data = encode_sequence(pan_sequence(64, 64, 3), EncoderConfig(intra_period=2)).data
    with pytest.raises(BitstreamError):
        decode_stream(data[: len(data) - 5])


def test_fixed_stream_rejects_other_scales():
    seq = pan_sequence(64, 64, 3)
    result = encode_sequence(seq, EncoderConfig(intra_period=2, variant=Variant.FIXED, fixed_scale=2))
    data = bytearray(result.data)
    pos = 23
    for record in result.bitstream.records[:2]:
        pos += len(record.pack())
    assert data[pos] >> 4 & 0x3 == 1
    data[pos] = (data[pos] & 0xC0) | (2 << 4)
    with pytest.raises(BitstreamError, match="fixed"):
        decode_stream(bytes(data))
