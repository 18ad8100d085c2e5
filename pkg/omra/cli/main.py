"""omra CLI：以 Typer + Path 传参为主，编码参数来自用户目录 YAML/JSON；仅配置路径用环境变量 OMRA_CONFIG。

退出码：0 成功，1 用法/配置，2 数据，3 码流。
"""
from __future__ import annotations

import json
import logging
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional

import typer

try:  # typer>=0.26 vendors its own click copy
    from typer._click import exceptions as click_exceptions
except ImportError:  # pragma: no cover
    from click import exceptions as click_exceptions
from dotenv import load_dotenv

from omra.cli.reports import (
    SCALE_HIST_FIELDS,
    plot_svg,
    rows_from_decode,
    rows_from_encode,
    rows_to_csv,
    scale_frequencies,
)
from omra.cli.synth import MOTIONS, SynthSpec, synth
from omra.core.config import (
    coerce_config_value,
    get_config_file_path,
    get_nested,
    load_config,
    resolve_encoder_config,
    save_config,
    set_nested,
)
from omra.core.errors import EXIT_USAGE, ConfigError, DataError, OmraError
from omra.core.frame import Frame, Sequence, load_sequence, save_sequence
from omra.core.gop import GopEntry, build_plan, reference_distance
from omra.core.i18n import cli_t
from omra.core.metrics import RdCurve, bd_psnr, bd_rate, read_curve_csv, write_curve_csv
from omra.engine import EncoderConfig, Variant, decode_stream, encode_sequence, parse_variant
from omra.engine.encoder import Q_BASE_LADDER, encode_bframe_at_scale, quant_params
from omra.motion import check_scale, downsample_frame, estimate_flow

load_dotenv()

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="omra",
    help=cli_t("cli_help"),
    no_args_is_help=True,
)


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """库异常 → 一行诊断 + 对应退出码。"""
    try:
        yield
    except OmraError as e:
        typer.echo(cli_t("err_prefix", msg=str(e)), err=True)
        raise typer.Exit(e.exit_code) from e


@app.callback()
def _root(
    config: Optional[Path] = typer.Option(None, "--config", "-c", path_type=Path, help=cli_t("opt_config")),
    verbose: bool = typer.Option(False, "--verbose", "-v", help=cli_t("opt_verbose")),
) -> None:
    if config is not None:
        os.environ["OMRA_CONFIG"] = str(config.expanduser().resolve())
    _setup_logging(verbose)


# 各命令共用的选项
_INPUT = typer.Option(..., "--input", "-i", path_type=Path, help=cli_t("opt_input"))
_FORMAT = typer.Option("png_dir", "--format", "-f", help=cli_t("opt_format"))
_WIDTH = typer.Option(..., "--width", help=cli_t("opt_width"))
_HEIGHT = typer.Option(..., "--height", help=cli_t("opt_height"))
_FRAMES = typer.Option(..., "--frames", "-n", help=cli_t("opt_frames"))
_INTRA_PERIOD = typer.Option(None, "--intra-period", "-p", help=cli_t("opt_intra_period"))
_Q_BASE = typer.Option(None, "--q-base", "-q", help=cli_t("opt_q_base"))
_LAMBDA = typer.Option(None, "--lambda", help=cli_t("opt_lambda"))
_VARIANT = typer.Option(None, "--variant", help=cli_t("opt_variant"))
_SCALES = typer.Option(None, "--scales", help=cli_t("opt_scales"))
_PRESET = typer.Option(None, "--preset", help=cli_t("opt_preset"))
_WORKERS = typer.Option(None, "--workers", "-j", help=cli_t("opt_workers"))


def _encoder_config(
    q_base: Optional[float] = None,
    rd_lambda: Optional[float] = None,
    intra_period: Optional[int] = None,
    variant: Optional[str] = None,
    scales: Optional[str] = None,
    preset: Optional[str] = None,
    workers: Optional[int] = None,
) -> EncoderConfig:
    return resolve_encoder_config(
        load_config(),
        q_base=q_base,
        rd_lambda=rd_lambda,
        intra_period=intra_period,
        variant=variant,
        scales=scales,
        preset=preset,
        workers=workers,
    )


def _svg_default() -> bool:
    return bool(get_nested(load_config(), "report.svg"))


def _parse_floats(text: str, name: str, count: Optional[int] = None) -> list[float]:
    try:
        values = [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as e:
        raise ConfigError(f"invalid {name}: {text!r}") from e
    if not values or (count is not None and len(values) != count):
        raise ConfigError(f"invalid {name}: {text!r}")
    return values


def _safe_label(label: str) -> str:
    return label.replace(":", "")


@app.command("encode", help=cli_t("encode_help"))
def encode_cmd(
    input_path: Path = _INPUT,
    fmt: str = _FORMAT,
    width: int = _WIDTH,
    height: int = _HEIGHT,
    frames: int = _FRAMES,
    out: Path = typer.Option(..., "--out", "-o", path_type=Path, help=cli_t("opt_out")),
    report: Optional[Path] = typer.Option(None, "--report", path_type=Path, help=cli_t("opt_report")),
    intra_period: Optional[int] = _INTRA_PERIOD,
    q_base: Optional[float] = _Q_BASE,
    rd_lambda: Optional[float] = _LAMBDA,
    variant: Optional[str] = _VARIANT,
    scales: Optional[str] = _SCALES,
    preset: Optional[str] = _PRESET,
    workers: Optional[int] = _WORKERS,
) -> None:
    with _exit_on_error():
        cfg = _encoder_config(q_base, rd_lambda, intra_period, variant, scales, preset, workers)
        seq = load_sequence(input_path, fmt, width, height, frames)
        result = encode_sequence(seq, cfg)
        out = out.expanduser()
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(result.data)
        if report is not None:
            rows_to_csv(rows_from_encode(result), path=report)
            typer.echo(cli_t("report_written", path=str(report)))
    typer.echo(cli_t("encode_done", frames=len(seq), bits=result.total_bits, bpp=result.bpp, psnr=result.psnr, path=str(out)))


@app.command("decode", help=cli_t("decode_help"))
def decode_cmd(
    stream: Path = typer.Option(..., "--in", path_type=Path, help=cli_t("opt_stream")),
    out: Path = typer.Option(..., "--out", "-o", path_type=Path, help=cli_t("opt_out")),
    fmt: str = _FORMAT,
) -> None:
    with _exit_on_error():
        data = _read_stream(stream)
        seq = decode_stream(data).sequence()
        save_sequence(seq, out, fmt)
    typer.echo(cli_t("decode_done", frames=len(seq), path=str(out)))


def _read_stream(path: Path) -> bytes:
    path = path.expanduser()
    if not path.is_file():
        raise DataError(f"bitstream not found: {path}")
    return path.read_bytes()


@app.command("rd-sweep", help=cli_t("rd_sweep_help"))
def rd_sweep_cmd(
    input_path: Path = _INPUT,
    fmt: str = _FORMAT,
    width: int = _WIDTH,
    height: int = _HEIGHT,
    frames: int = _FRAMES,
    out: Path = typer.Option(..., "--out", "-o", path_type=Path, help=cli_t("opt_out")),
    q_base_list: str = typer.Option(",".join(f"{q:g}" for q in Q_BASE_LADDER), "--q-base-list", help=cli_t("opt_q_base_list")),
    variants: Optional[str] = typer.Option(None, "--variants", help=cli_t("opt_variants")),
    intra_period: Optional[int] = _INTRA_PERIOD,
    variant: Optional[str] = _VARIANT,
    scales: Optional[str] = _SCALES,
    preset: Optional[str] = _PRESET,
    workers: Optional[int] = _WORKERS,
    svg: Optional[bool] = typer.Option(None, "--svg/--no-svg", help=cli_t("opt_svg")),
) -> None:
    with _exit_on_error():
        base = _encoder_config(None, None, intra_period, variant, scales, preset, workers)
        q_values = _parse_floats(q_base_list, "q-base list")
        seq = load_sequence(input_path, fmt, width, height, frames)
        configs = [base]
        if variants:
            configs = [base.with_variant(*parse_variant(v)) for v in variants.split(",") if v.strip()]
        out = out.expanduser()
        series = {}
        for cfg in configs:
            points = []
            for q in q_values:
                result = encode_sequence(seq, cfg.with_q_base(q))
                points.append((result.bpp, result.psnr))
            curve = RdCurve.of(points, cfg.label)
            path = out if len(configs) == 1 else out.with_name(f"{out.stem}_{_safe_label(cfg.label)}{out.suffix or '.csv'}")
            write_curve_csv(curve, path)
            series[cfg.label] = (curve.bpps.tolist(), curve.psnrs.tolist())
            typer.echo(cli_t("curve_written", label=cfg.label, path=str(path)))
        want_svg = svg if svg is not None else _svg_default()
        if want_svg:
            plot = plot_svg(series, out.with_suffix(".svg"), "bpp", "PSNR (dB)")
            typer.echo(cli_t("plot_written", path=str(plot)))


@app.command("bd-rate", help=cli_t("bd_rate_help"))
def bd_rate_cmd(
    anchor: Path = typer.Option(..., "--anchor", path_type=Path, help=cli_t("opt_anchor")),
    test: List[Path] = typer.Option(..., "--test", path_type=Path, help=cli_t("opt_test")),
) -> None:
    with _exit_on_error():
        anchor_curve = read_curve_csv(anchor)
        lines = []
        for path in test:
            curve = read_curve_csv(path)
            rate = bd_rate(anchor_curve, curve)
            dpsnr = bd_psnr(anchor_curve, curve)
            lines.append(cli_t("bd_rate_line", test=curve.label, anchor=anchor_curve.label, rate=rate, dpsnr=dpsnr))
    for line in lines:
        typer.echo(line)


def _stream_or_encode(
    from_stream: Optional[Path],
    input_path: Optional[Path],
    fmt: str,
    width: Optional[int],
    height: Optional[int],
    frames: Optional[int],
    cfg_args: dict,
):
    """返回 (rows, intra_period, encode 结果或 None, 序列或 None)。"""
    seq: Optional[Sequence] = None
    if input_path is not None:
        if width is None or height is None or frames is None:
            raise ConfigError("--width, --height and --frames are required with --input")
        seq = load_sequence(input_path, fmt, width, height, frames)
    if from_stream is not None:
        decoded = decode_stream(_read_stream(from_stream))
        return rows_from_decode(decoded, seq), decoded.header.intra_period, None, seq
    if seq is None:
        raise ConfigError("either --input or --from-stream is required")
    result = encode_sequence(seq, _encoder_config(**cfg_args))
    return rows_from_encode(result), result.config.intra_period, result, seq


@app.command("profile", help=cli_t("profile_help"))
def profile_cmd(
    input_path: Optional[Path] = typer.Option(None, "--input", "-i", path_type=Path, help=cli_t("opt_input")),
    fmt: str = _FORMAT,
    width: Optional[int] = typer.Option(None, "--width", help=cli_t("opt_width")),
    height: Optional[int] = typer.Option(None, "--height", help=cli_t("opt_height")),
    frames: Optional[int] = typer.Option(None, "--frames", "-n", help=cli_t("opt_frames")),
    from_stream: Optional[Path] = typer.Option(None, "--from-stream", path_type=Path, help=cli_t("opt_from_stream")),
    report: Optional[Path] = typer.Option(None, "--report", "--out", "-o", path_type=Path, help=cli_t("opt_report")),
    compare_fixed: bool = typer.Option(False, "--compare-fixed", help=cli_t("opt_compare_fixed")),
    svg: Optional[bool] = typer.Option(None, "--svg/--no-svg", help=cli_t("opt_svg")),
    intra_period: Optional[int] = _INTRA_PERIOD,
    q_base: Optional[float] = _Q_BASE,
    rd_lambda: Optional[float] = _LAMBDA,
    variant: Optional[str] = _VARIANT,
    scales: Optional[str] = _SCALES,
    preset: Optional[str] = _PRESET,
    workers: Optional[int] = _WORKERS,
) -> None:
    cfg_args = dict(
        q_base=q_base,
        rd_lambda=rd_lambda,
        intra_period=intra_period,
        variant=variant,
        scales=scales,
        preset=preset,
        workers=workers,
    )
    with _exit_on_error():
        rows, _, result, seq = _stream_or_encode(from_stream, input_path, fmt, width, height, frames, cfg_args)
        text = rows_to_csv(rows, path=report)
        if report is None:
            typer.echo(text, nl=False)
        else:
            typer.echo(cli_t("report_written", path=str(report)))
        if compare_fixed and result is not None and seq is not None:
            fixed_cfg = result.config.with_variant(Variant.FIXED, 1)
            t0 = time.perf_counter()
            encode_sequence(seq, fixed_cfg)
            t_fixed = time.perf_counter() - t0
            ratio = result.elapsed / t_fixed if t_fixed > 0 else float("inf")
            logger.info("Encode wall-clock ratio %s / fixed:1 = %.3f", result.config.label, ratio)
            typer.echo(cli_t("profile_ratio", label=result.config.label, t=result.elapsed, t_fixed=t_fixed, ratio=ratio), err=True)
        want_svg = svg if svg is not None else _svg_default()
        if report is not None and want_svg:
            xs = [r["display_index"] for r in rows]
            bits = plot_svg({"bits": (xs, [r["total_bits"] for r in rows])}, report.with_name(f"{report.stem}_bits.svg"), "frame", "bits")
            typer.echo(cli_t("plot_written", path=str(bits)))
            if all(r["psnr"] != "" for r in rows):
                psnr = plot_svg(
                    {"psnr": (xs, [min(float(r["psnr"]), 100.0) for r in rows])},
                    report.with_name(f"{report.stem}_psnr.svg"),
                    "frame",
                    "PSNR (dB)",
                )
                typer.echo(cli_t("plot_written", path=str(psnr)))


@app.command("scale-hist", help=cli_t("scale_hist_help"))
def scale_hist_cmd(
    input_path: Optional[Path] = typer.Option(None, "--input", "-i", path_type=Path, help=cli_t("opt_input")),
    fmt: str = _FORMAT,
    width: Optional[int] = typer.Option(None, "--width", help=cli_t("opt_width")),
    height: Optional[int] = typer.Option(None, "--height", help=cli_t("opt_height")),
    frames: Optional[int] = typer.Option(None, "--frames", "-n", help=cli_t("opt_frames")),
    from_stream: Optional[Path] = typer.Option(None, "--from-stream", path_type=Path, help=cli_t("opt_from_stream")),
    out: Optional[Path] = typer.Option(None, "--out", "-o", path_type=Path, help=cli_t("opt_out")),
    intra_period: Optional[int] = _INTRA_PERIOD,
    q_base: Optional[float] = _Q_BASE,
    variant: Optional[str] = _VARIANT,
    scales: Optional[str] = _SCALES,
    preset: Optional[str] = _PRESET,
    workers: Optional[int] = _WORKERS,
) -> None:
    cfg_args = dict(
        q_base=q_base,
        intra_period=intra_period,
        variant=variant,
        scales=scales,
        preset=preset,
        workers=workers,
    )
    with _exit_on_error():
        rows, period, _, _ = _stream_or_encode(from_stream, input_path, fmt, width, height, frames, cfg_args)
        text = rows_to_csv(scale_frequencies(rows, period), SCALE_HIST_FIELDS, path=out)
    if out is None:
        typer.echo(text, nl=False)
    else:
        typer.echo(cli_t("report_written", path=str(out)))


@app.command("synth", help=cli_t("synth_help"))
def synth_cmd(
    out: Path = typer.Option(..., "--out", "-o", path_type=Path, help=cli_t("opt_out")),
    fmt: str = _FORMAT,
    width: int = typer.Option(256, "--width", help=cli_t("opt_width")),
    height: int = typer.Option(256, "--height", help=cli_t("opt_height")),
    frames: int = typer.Option(33, "--frames", "-n", help=cli_t("opt_frames")),
    velocity: str = typer.Option("3,0", "--velocity", help=cli_t("opt_velocity")),
    seed: int = typer.Option(0, "--seed", help=cli_t("opt_seed")),
    noise: float = typer.Option(0.0, "--noise", help=cli_t("opt_noise")),
    motion: str = typer.Option("pan_wrap", "--motion", help=cli_t("opt_motion") + f" ({', '.join(MOTIONS)})"),
) -> None:
    with _exit_on_error():
        vx, vy = _parse_floats(velocity, "velocity", 2)
        spec = SynthSpec(width, height, frames, (vx, vy), seed, noise, motion)
        save_sequence(synth(spec), out, fmt)
    typer.echo(cli_t("synth_done", frames=frames, width=width, height=height, path=str(out)))


@app.command("plan", help=cli_t("plan_help"))
def plan_cmd(
    frames: int = typer.Option(..., "--frames", "-n", help=cli_t("opt_frames")),
    intra_period: int = typer.Option(32, "--intra-period", "-p", help=cli_t("opt_intra_period")),
    out: Optional[Path] = typer.Option(None, "--out", "-o", path_type=Path, help=cli_t("opt_out")),
) -> None:
    with _exit_on_error():
        text = build_plan(frames, intra_period).to_csv()
    if out is None:
        typer.echo(text, nl=False)
        return
    out = out.expanduser()
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    typer.echo(cli_t("plan_written", path=str(out)))


def _b_frame_triple(seq: Sequence, index: int, intra_period: int) -> tuple[Frame, Frame, Frame, GopEntry]:
    plan = build_plan(len(seq), intra_period)
    try:
        entry = plan.entry_for(index)
    except KeyError as e:
        raise DataError(f"frame {index} is outside the sequence") from e
    if not entry.kind.is_b:
        raise ConfigError(cli_t("not_b_frame", index=index))
    reference_distance(entry)
    return seq[index], seq[entry.ref_past], seq[entry.ref_future], entry


@app.command("flow-dump", help=cli_t("flow_dump_help"))
def flow_dump_cmd(
    input_path: Path = _INPUT,
    fmt: str = _FORMAT,
    width: int = _WIDTH,
    height: int = _HEIGHT,
    frames: int = _FRAMES,
    index: int = typer.Option(..., "--index", "-t", help=cli_t("opt_frame_index")),
    scale: int = typer.Option(1, "--scale", "-s", help=cli_t("opt_scale")),
    out: Path = typer.Option(..., "--out", "-o", path_type=Path, help=cli_t("opt_out")),
    intra_period: Optional[int] = _INTRA_PERIOD,
    preset: Optional[str] = _PRESET,
) -> None:
    with _exit_on_error():
        s = check_scale(scale)
        cfg = _encoder_config(intra_period=intra_period, preset=preset)
        seq = load_sequence(input_path, fmt, width, height, frames)
        x_t, past, future, _ = _b_frame_triple(seq, index, cfg.intra_period)
        x_low = downsample_frame(x_t, s)
        out = out.expanduser()
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for name, ref in (("past", past), ("future", future)):
            flow = estimate_flow(x_low, downsample_frame(ref, s), cfg.estimator)
            path = out / f"flow_{index:05d}_s{s}_{name}.bin"
            path.write_bytes(flow.to_bytes())
            paths.append(path)
    typer.echo(cli_t("flow_dump_done", past=str(paths[0]), future=str(paths[1])))


@app.command("predictor", help=cli_t("predictor_help"))
def predictor_cmd(
    input_path: Path = _INPUT,
    fmt: str = _FORMAT,
    width: int = _WIDTH,
    height: int = _HEIGHT,
    frames: int = _FRAMES,
    index: int = typer.Option(..., "--index", "-t", help=cli_t("opt_frame_index")),
    scale: int = typer.Option(1, "--scale", "-s", help=cli_t("opt_scale")),
    out: Path = typer.Option(..., "--out", "-o", path_type=Path, help=cli_t("opt_out")),
    intra_period: Optional[int] = _INTRA_PERIOD,
    q_base: Optional[float] = _Q_BASE,
    variant: Optional[str] = _VARIANT,
    preset: Optional[str] = _PRESET,
) -> None:
    """参考帧取原始帧（非闭环重建），仅用于直观比较不同 s 的预测质量。"""
    from PIL import Image

    with _exit_on_error():
        s = check_scale(scale)
        cfg = _encoder_config(q_base=q_base, intra_period=intra_period, variant=variant, preset=preset)
        seq = load_sequence(input_path, fmt, width, height, frames)
        x_t, past, future, entry = _b_frame_triple(seq, index, cfg.intra_period)
        cand = encode_bframe_at_scale(x_t, past, future, s, quant_params(cfg, entry), cfg)
        warped_past, warped_future = cand.compensation.warped()
        out = out.expanduser()
        out.mkdir(parents=True, exist_ok=True)
        stem = f"{index:05d}_s{s}"
        for name, frame in (("mc", cand.compensation.predictor), ("warped_past", warped_past), ("warped_future", warped_future)):
            Image.fromarray(frame.to_rgb()).save(out / f"{stem}_{name}.png")
    typer.echo(cli_t("predictor_done", path=str(out / f"{stem}_mc.png")))


config_app = typer.Typer(help=cli_t("config_help"))
app.add_typer(config_app, name="config")


@config_app.callback()
def config_callback(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", "-c", path_type=Path, help=cli_t("opt_config")),
) -> None:
    ctx.obj = ctx.obj or {}
    ctx.obj["config_file"] = config.expanduser().resolve() if config else None


def _config_file_from_ctx(ctx: typer.Context) -> Path | None:
    """config 子命令的 -c；全局 --config 已写入 OMRA_CONFIG。"""
    if ctx.parent and ctx.parent.obj:
        return ctx.parent.obj.get("config_file")
    return None


@config_app.command("path", help=cli_t("config_path_help"))
def config_path_cmd(ctx: typer.Context) -> None:
    cf = _config_file_from_ctx(ctx)
    typer.echo(str(cf if cf else get_config_file_path()))


@config_app.command("get", help=cli_t("config_get_help"))
def config_get(
    ctx: typer.Context,
    key: Optional[str] = typer.Argument(None, help="Dot key, e.g. encoder.q_base (omit to show all)."),
) -> None:
    cfg = load_config(_config_file_from_ctx(ctx))
    if not key:
        typer.echo(json.dumps(cfg, indent=2, ensure_ascii=False))
        return
    val = get_nested(cfg, key)
    if val is None:
        typer.echo(cli_t("config_key_missing", key=key), err=True)
        raise typer.Exit(EXIT_USAGE)
    if isinstance(val, (list, dict)):
        typer.echo(json.dumps(val, indent=2, ensure_ascii=False))
    else:
        typer.echo(val)


@config_app.command("set", help=cli_t("config_set_help"))
def config_set(
    ctx: typer.Context,
    key: str = typer.Argument(..., help="Dot key, e.g. encoder.q_base, encoder.scales"),
    value: str = typer.Argument(..., help="Value (comma-separated for scales)."),
) -> None:
    cf = _config_file_from_ctx(ctx)
    path = cf if cf else get_config_file_path()
    cfg = load_config(cf)
    set_nested(cfg, key, coerce_config_value(key, value))
    with _exit_on_error():
        if key.startswith(("encoder.", "estimator.")):
            resolve_encoder_config(cfg)
    saved = save_config(cfg, path)
    typer.echo(cli_t("config_saved", path=str(saved)))


def main() -> None:
    """入口：click 用法错误统一退出码 1，库异常按类型映射。"""
    try:
        rv = app(standalone_mode=False)
    except click_exceptions.UsageError as e:
        e.show()
        sys.exit(EXIT_USAGE)
    except click_exceptions.Abort:
        typer.echo("Aborted!", err=True)
        sys.exit(EXIT_USAGE)
    except OmraError as e:
        typer.echo(cli_t("err_prefix", msg=str(e)), err=True)
        sys.exit(e.exit_code)
    sys.exit(rv if isinstance(rv, int) else 0)


if __name__ == "__main__":
    main()
