from __future__ import annotations

import csv
import io

import pytest

from omra.cli.reports import (
    FRAME_FIELDS,
    SCALE_HIST_FIELDS,
    rows_from_decode,
    rows_from_encode,
    rows_to_csv,
    scale_frequencies,
)
from omra.engine import EncoderConfig, decode_stream, encode_sequence

from tests.conftest import pan_sequence


def _rows(scales_by_index: dict[int, int]) -> list[dict]:
    return [{"display_index": i, "scale": s} for i, s in scales_by_index.items()]


def test_frequencies_sum_to_one():
    rows = _rows({0: 1, 1: 2, 2: 4, 3: 1, 4: 1, 5: 8, 6: 4, 7: 4, 8: 1})
    table = scale_frequencies(rows, 4)
    assert [r["position"] for r in table] == [0, 1, 2, 3]
    for row in table:
        assert sum(row[f"s{s}"] for s in (1, 2, 4, 8)) == pytest.approx(1.0, abs=1e-9)
    assert table[0]["frames"] == 3
    assert table[0]["s1"] == 1.0
    assert table[1]["s2"] == 0.5
    assert table[2]["s4"] == 1.0


def test_empty_positions_are_skipped():
    table = scale_frequencies(_rows({0: 1, 2: 2}), 4)
    assert [r["position"] for r in table] == [0, 2]


def test_encode_and_decode_rows_agree():
    result = encode_sequence(pan_sequence(64, 64, 5), EncoderConfig(intra_period=4))
    encoded = rows_from_encode(result)
    decoded = rows_from_decode(decode_stream(result.data))
    assert [r["display_index"] for r in encoded] == [0, 1, 2, 3, 4]
    for a, b in zip(encoded, decoded):
        for key in ("display_index", "kind", "scale", "motion_bits", "texture_bits", "total_bits"):
            assert a[key] == b[key]
        assert b["psnr"] == ""


def test_decode_rows_with_source():
    seq = pan_sequence(64, 64, 3)
    result = encode_sequence(seq, EncoderConfig(intra_period=2))
    rows = rows_from_decode(decode_stream(result.data), seq)
    for row, report in zip(rows, result.by_display()):
        assert row["psnr"] == pytest.approx(report.psnr)


def test_csv_layout(tmp_path):
    path = tmp_path / "reports" / "frames.csv"
    text = rows_to_csv([{"display_index": 0, "psnr": float("inf"), "scale": 1}], path=path)
    assert path.read_text(encoding="utf-8") == text
    row = next(csv.DictReader(io.StringIO(text)))
    assert list(row) == list(FRAME_FIELDS)
    assert row["psnr"] == "inf"
    hist = rows_to_csv(scale_frequencies(_rows({0: 1}), 2), SCALE_HIST_FIELDS)
    assert hist.splitlines()[0] == "position,frames,s1,s2,s4,s8"
