from __future__ import annotations

import csv
import io
import sys

import pytest
from typer.testing import CliRunner

from omra.cli.main import app, main
from omra.core.frame import PNG_NAME
from omra.core.metrics import RdCurve, write_curve_csv
from omra.motion import FlowField

runner = CliRunner()


def _ok(args: list[str]):
    result = runner.invoke(app, [str(a) for a in args])
    assert result.exit_code == 0, result.output
    return result


def _csv(path) -> list[dict]:
    return list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))


@pytest.fixture
def clip(tmp_path):
    frames = tmp_path / "clip"
    _ok(["synth", "--out", frames, "--width", 64, "--height", 64, "--frames", 5, "--velocity", "2,1", "--seed", 4])
    return frames


GEOMETRY = ["--width", 64, "--height", 64, "--frames", 5]


def test_synth_writes_frames(clip):
    assert sorted(p.name for p in clip.iterdir()) == [PNG_NAME.format(i) for i in range(5)]


def test_encode_decode_profile(clip, tmp_path):
    stream, report, profile = tmp_path / "clip.omra", tmp_path / "encode.csv", tmp_path / "profile.csv"
    result = _ok(["encode", "-i", clip, *GEOMETRY, "-p", 4, "--out", stream, "--report", report])
    assert "bpp" in result.output
    assert stream.read_bytes()[:4] == b"OMRA"

    decoded = tmp_path / "decoded"
    _ok(["decode", "--in", stream, "--out", decoded])
    assert len(list(decoded.glob("*.png"))) == 5

    _ok(["profile", "--from-stream", stream, "--report", profile])
    encoded_rows, profile_rows = _csv(report), _csv(profile)
    assert len(encoded_rows) == len(profile_rows) == 5
    for a, b in zip(encoded_rows, profile_rows):
        for key in ("display_index", "kind", "scale", "motion_bits", "texture_bits", "total_bits"):
            assert a[key] == b[key]


def test_profile_with_source_fills_psnr(clip, tmp_path):
    profile = tmp_path / "profile.csv"
    _ok(["profile", "-i", clip, *GEOMETRY, "-p", 4, "--report", profile])
    rows = _csv(profile)
    assert all(float(r["psnr"]) > 20 for r in rows)
    assert rows[2]["cost_s1"] != ""


def test_scale_hist(clip, tmp_path):
    out = tmp_path / "hist.csv"
    _ok(["scale-hist", "-i", clip, *GEOMETRY, "-p", 4, "--out", out])
    rows = _csv(out)
    assert [r["position"] for r in rows] == ["0", "1", "2", "3"]
    for row in rows:
        assert sum(float(row[f"s{s}"]) for s in (1, 2, 4, 8)) == pytest.approx(1.0, abs=1e-9)


def test_rd_sweep_then_bd_rate(clip, tmp_path):
    out = tmp_path / "curve.csv"
    args = ["rd-sweep", "-i", clip, *GEOMETRY, "-p", 4, "--out", out, "--variants", "omra,fixed:1", "--no-svg"]
    _ok(args)
    omra_curve, fixed_curve = tmp_path / "curve_omra.csv", tmp_path / "curve_fixed1.csv"
    assert len(_csv(omra_curve)) == 4
    result = _ok(["bd-rate", "--anchor", fixed_curve, "--test", omra_curve])
    assert "curve_omra vs curve_fixed1" in result.output


def test_bd_rate_command(tmp_path):
    anchor = RdCurve.of([(0.05, 30.0), (0.1, 33.0), (0.2, 36.0), (0.4, 38.5)])
    write_curve_csv(anchor, tmp_path / "anchor.csv")
    write_curve_csv(RdCurve.of([(p.bpp * 1.1, p.psnr) for p in anchor.points]), tmp_path / "slow.csv")
    result = _ok(["bd-rate", "--anchor", tmp_path / "anchor.csv", "--test", tmp_path / "slow.csv"])
    assert "+10.000%" in result.output


def test_plan_command(tmp_path):
    result = _ok(["plan", "-n", 5, "-p", 4])
    assert "2,2,RefB,0,4,1" in result.output
    out = tmp_path / "plan.csv"
    _ok(["plan", "-n", 33, "--out", out])
    assert len(out.read_text(encoding="utf-8").splitlines()) == 34


def test_flow_dump_and_predictor(clip, tmp_path):
    flows = tmp_path / "flows"
    _ok(["flow-dump", "-i", clip, *GEOMETRY, "-p", 4, "--index", 2, "--scale", 2, "--out", flows])
    past = FlowField.from_bytes((flows / "flow_00002_s2_past.bin").read_bytes())
    assert past.dims == (32, 32)
    assert (flows / "flow_00002_s2_future.bin").is_file()

    pred = tmp_path / "pred"
    _ok(["predictor", "-i", clip, *GEOMETRY, "-p", 4, "--index", 1, "--scale", 4, "--variant", "b", "--out", pred])
    assert {p.name for p in pred.iterdir()} == {"00001_s4_mc.png", "00001_s4_warped_past.png", "00001_s4_warped_future.png"}


def test_predictor_rejects_intra_frame(clip, tmp_path):
    result = runner.invoke(app, ["predictor", "-i", str(clip), "--width", "64", "--height", "64", "--frames", "5", "-p", "4", "--index", "4", "--out", str(tmp_path / "p")])
    assert result.exit_code == 1


def test_config_set_and_get(tmp_path):
    _ok(["config", "set", "encoder.scales", "1,2"])
    _ok(["config", "set", "encoder.q_base", "18"])
    assert _ok(["config", "get", "encoder.q_base"]).output.strip() == "18.0"
    assert (tmp_path / "omra-config.yaml").is_file()
    path = _ok(["config", "path"]).output.strip()
    assert path.endswith("omra-config.yaml")


def test_config_rejects_invalid_values(tmp_path):
    result = runner.invoke(app, ["config", "set", "encoder.intra_period", "5"])
    assert result.exit_code == 1
    assert not (tmp_path / "omra-config.yaml").exists()
    result = runner.invoke(app, ["config", "get", "encoder.nothing"])
    assert result.exit_code == 1


def test_config_file_drives_encoder(clip, tmp_path):
    _ok(["config", "set", "encoder.variant", "fixed:2"])
    stream = tmp_path / "fixed.omra"
    _ok(["encode", "-i", clip, *GEOMETRY, "-p", 4, "--out", stream])
    assert stream.read_bytes()[5] == 3


def test_exit_codes(tmp_path):
    missing = runner.invoke(app, ["encode", "-i", str(tmp_path / "nope"), "--width", "64", "--height", "64", "--frames", "2", "--out", str(tmp_path / "x.omra")])
    assert missing.exit_code == 2
    garbage = tmp_path / "garbage.omra"
    garbage.write_bytes(b"not a stream at all")
    corrupt = runner.invoke(app, ["decode", "--in", str(garbage), "--out", str(tmp_path / "out")])
    assert corrupt.exit_code == 3
    bad_period = runner.invoke(app, ["plan", "-n", "5", "-p", "3"])
    assert bad_period.exit_code == 1


def test_main_maps_usage_errors(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["omra", "encode"])
    with pytest.raises(SystemExit) as exc:
        main()
    assert exc.value.code == 1


def test_main_maps_library_errors(monkeypatch, tmp_path):
    garbage = tmp_path / "garbage.omra"
    garbage.write_bytes(b"OMRA")
    monkeypatch.setattr(sys, "argv", ["omra", "decode", "--in", str(garbage), "--out", str(tmp_path / "out")])
    with pytest.raises(SystemExit) as exc:
        main()
    assert exc.value.code == 3
