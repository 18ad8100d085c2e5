from __future__ import annotations

import numpy as np
import pytest

from omra.codecs.entropy import BitSink, BitSource
from omra.codecs.texture_codec import (
    ZIGZAG,
    QuantParams,
    dct8_forward,
    dct8_inverse,
    decode_intra,
    decode_residual,
    encode_intra,
    encode_residual,
)
from omra.core.errors import BitstreamError
from omra.core.frame import Frame, mse
from omra.core.gop import FrameKind

from tests.conftest import noise_frame


def test_dc_of_constant_block():
    coefs = dct8_forward(np.full((8, 8), 10.0))
    assert coefs[0, 0] == pytest.approx(80.0)
    coefs[0, 0] = 0.0
    assert np.abs(coefs).max() < 1e-9


def test_transform_is_orthonormal(rng):
    block = rng.normal(size=(8, 8))
    coefs = dct8_forward(block)
    assert np.allclose(dct8_inverse(coefs), block)
    assert np.sum(coefs**2) == pytest.approx(np.sum(block**2))


def test_zigzag_prefix():
    assert ZIGZAG[:6].tolist() == [0, 1, 8, 16, 9, 2]
    assert sorted(ZIGZAG.tolist()) == list(range(64))


def test_quant_step():
    assert QuantParams(10, 0).step == pytest.approx(10.0)
    assert QuantParams(10, 2, FrameKind.REF_B).step == pytest.approx(14.4)
    assert QuantParams(10, 5, FrameKind.NON_REF_B).step == pytest.approx(10 * 1.2**6)
    assert QuantParams(0.5).step == 1.0


def test_zero_residual_costs_one_bit_per_block():
    frame = noise_frame(64, 64, seed=1)
    payload, recon = encode_residual(frame, frame, QuantParams(12))
    assert payload.bit_count == 3 * 8 * 8
    assert payload.data == b"\xff" * 24
    assert np.array_equal(recon.planes, frame.planes)


def test_single_basis_function():
    step = 20.0
    coefs = np.zeros((8, 8))
    coefs[0, 1] = step
    planes = np.full((3, 64, 64), 128.0)
    planes[0, :8, :8] += dct8_inverse(coefs)
    x = Frame(np.floor(planes + 0.5).astype(np.uint8), 64, 64)
    payload, _ = encode_residual(x, Frame.constant(128, 64, 64), QuantParams(step))
    source = BitSource(payload.data)
    assert source.ue_read() == 1
    assert source.ue_read() == 1
    assert source.se_read() == 1
    assert payload.bit_count == 9 + 191


def test_decoder_matches_encoder():
    x, pred = noise_frame(64, 128, seed=2), noise_frame(64, 128, seed=3)
    qp = QuantParams(12, 3, FrameKind.NON_REF_B)
    payload, recon = encode_residual(x, pred, qp)
    assert np.array_equal(decode_residual(payload, pred, qp).planes, recon.planes)


@pytest.mark.parametrize("q_base", [1, 8, 27])
def test_distortion_bound(q_base):
    x, pred = noise_frame(64, 64, seed=4), noise_frame(64, 64, seed=5)
    qp = QuantParams(q_base)
    _, recon = encode_residual(x, pred, qp)
    assert mse(x, recon) <= (qp.step / 2 + 0.5) ** 2


def test_intra_constant_frames():
    flat = Frame.constant(128, 64, 64)
    payload, recon = encode_intra(flat, QuantParams(12))
    assert payload.data == b"\xff" * 24
    assert np.array_equal(recon.planes, flat.planes)
    bright = Frame.constant(200, 64, 64)
    payload, recon = encode_intra(bright, QuantParams(1))
    assert np.array_equal(recon.planes, bright.planes)
    decoded = decode_intra(payload, QuantParams(1), 64, 64, (64, 64))
    assert np.array_equal(decoded.planes, bright.planes)


def test_truncated_payload():
    x, pred = noise_frame(64, 64, seed=6), Frame.constant(128, 64, 64)
    qp = QuantParams(4)
    payload, _ = encode_residual(x, pred, qp)
    with pytest.raises(BitstreamError):
        decode_residual(payload.data[: len(payload.data) // 3], pred, qp)


def test_coarser_step_never_costs_more(rng):
    pred = Frame.constant(128, 64, 64)
    planes = np.clip(128 + rng.normal(0, 40, size=(3, 64, 64)), 0, 255).astype(np.uint8)
    x = Frame(planes, 64, 64)
    sizes = [encode_residual(x, pred, QuantParams(q))[0] for q in (2, 4, 8, 16, 32)]
    for finer, coarser in zip(sizes, sizes[1:]):
        assert coarser.bit_count <= finer.bit_count
        assert len(coarser.data) <= len(finer.data)


@pytest.mark.parametrize(
    "symbols",
    [
        [("ue", 1), ("ue", 64)],
        [("ue", 2), ("ue", 10), ("se", 3), ("ue", 53)],
        [("ue", 65)],
    ],
    ids=["run-past-block", "second-run-past-block", "too-many-coefficients"],
)
def test_malformed_block_is_rejected(symbols):
    sink = BitSink()
    for kind, value in symbols:
        if kind == "ue":
            sink.ue_write(value)
        else:
            sink.se_write(value)
    sink.write_ones(64)
    with pytest.raises(BitstreamError):
        decode_residual(sink.getvalue(), Frame.constant(128, 64, 64), QuantParams(12))
