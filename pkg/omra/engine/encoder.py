"""OMRA 编码器：每个 B 帧在候选下采样因子上做穷举 RD 搜索，闭环编码整个序列。

代价 L(s) = λ · MSE(x_t, x̂_t(s)) + 码率(s)，码率按实际序列化的字节加帧头与长度字段计。
"""
from __future__ import annotations

import logging
import math
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

from omra.codecs import MotionPayload, QuantParams, encode_flows, encode_intra, encode_residual
from omra.core.errors import ConfigError, DataError
from omra.core.frame import Frame, Sequence, mse
from omra.core.gop import INTRA_PERIODS, FrameKind, GopEntry, GopPlan, build_plan
from omra.core.metrics import bits_per_pixel, psnr_from_mse
from omra.engine.container import Bitstream, BitstreamHeader, FrameRecord, Variant, frame_overhead_bits
from omra.engine.prediction import Compensation, ReferencePair, coded_scale, compensate
from omra.motion import (
    SCALE_FACTORS,
    EstimatorConfig,
    FlowField,
    check_scale,
    downsample_frame,
    estimate_flow,
    log2_scale,
    upsample_flow,
)

logger = logging.getLogger(__name__)

DEFAULT_Q_BASE = 12.0
DEFAULT_LAMBDA_SCALE = 0.85
DEFAULT_INTRA_PERIOD = 32
Q_BASE_LADDER = (8.0, 12.0, 18.0, 27.0)
_U16 = 0xFFFF
_U32 = 0xFFFFFFFF


def parse_variant(text: str) -> tuple[Variant, int]:
    """'omra' | 'a' | 'b' | 'fixed:S' → (Variant, fixed_scale)。"""
    key = (text or "").strip().lower()
    names = {"omra": Variant.OMRA, "a": Variant.VARIANT_A, "b": Variant.VARIANT_B}
    if key in names:
        return names[key], 1
    if key.startswith("fixed"):
        _, _, num = key.partition(":")
        try:
            return Variant.FIXED, check_scale(int(num or 1))
        except ValueError as e:
            raise ConfigError(f"invalid fixed scale in {text!r}") from e
    raise ConfigError(f"unknown variant {text!r}, expected omra, a, b or fixed:S")


def variant_label(variant: Variant, fixed_scale: int = 1) -> str:
    return f"fixed:{fixed_scale}" if variant is Variant.FIXED else variant.label


def parse_scales(text: str | list | tuple) -> tuple[int, ...]:
    if isinstance(text, str):
        items = [t for t in text.replace(" ", "").split(",") if t]
    else:
        items = list(text)
    try:
        scales = tuple(sorted({check_scale(int(v)) for v in items}))
    except ValueError as e:
        raise ConfigError(f"invalid scale list {text!r}") from e
    if not scales:
        raise ConfigError("scale set must not be empty")
    return scales


def _quantize(value: float, unit: int, limit: int, name: str) -> float:
    code = int(math.floor(value * unit + 0.5))
    if code <= 0 or code > limit:
        raise ConfigError(f"{name} {value} out of range for the bitstream header")
    return code / unit


@dataclass(frozen=True)
class EncoderConfig:
    """q_base 与 λ 在构造时量化到码流头精度（0.1 / 0.01），编解码两端取值一致。"""

    q_base: float = DEFAULT_Q_BASE
    rd_lambda: Optional[float] = None
    lambda_scale: float = DEFAULT_LAMBDA_SCALE
    intra_period: int = DEFAULT_INTRA_PERIOD
    variant: Variant = Variant.OMRA
    fixed_scale: int = 1
    scales: tuple[int, ...] = SCALE_FACTORS
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    workers: int = 1

    def __post_init__(self) -> None:
        q = _quantize(float(self.q_base), 10, _U16, "q_base")
        object.__setattr__(self, "q_base", q)
        if self.lambda_scale <= 0:
            raise ConfigError(f"lambda_scale must be > 0, got {self.lambda_scale}")
        lam = self.rd_lambda if self.rd_lambda is not None else self.lambda_scale * q * q
        object.__setattr__(self, "rd_lambda", _quantize(float(lam), 100, _U32, "lambda"))
        if self.intra_period not in INTRA_PERIODS:
            raise ConfigError(f"intra_period must be one of {INTRA_PERIODS}, got {self.intra_period}")
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "fixed_scale", check_scale(self.fixed_scale))
        object.__setattr__(self, "scales", parse_scales(self.scales))
        if self.variant is Variant.OMRA and 1 not in self.scales:
            raise ConfigError("the OMRA scale set must contain 1")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    @property
    def label(self) -> str:
        return variant_label(self.variant, self.fixed_scale)

    @property
    def candidate_scales(self) -> tuple[int, ...]:
        if self.variant is Variant.FIXED:
            return (self.fixed_scale,)
        return self.scales

    def with_q_base(self, q_base: float) -> "EncoderConfig":
        """换一个工作点；λ 按 lambda_scale·q² 重新推导。"""
        return replace(self, q_base=q_base, rd_lambda=None)

    def with_variant(self, variant: Variant, fixed_scale: int = 1) -> "EncoderConfig":
        return replace(self, variant=variant, fixed_scale=fixed_scale)

    def header(self, width: int, height: int, frame_count: int) -> BitstreamHeader:
        for name, value in (("width", width), ("height", height), ("frame_count", frame_count)):
            if not 0 < value <= _U16:
                raise DataError(f"{name} {value} does not fit the bitstream header")
        return BitstreamHeader(
            variant=self.variant,
            fixed_log2_s=log2_scale(self.fixed_scale) if self.variant is Variant.FIXED else 0,
            width=width,
            height=height,
            frame_count=frame_count,
            intra_period=self.intra_period,
            q_base_tenths=int(round(self.q_base * 10)),
            lambda_hundredths=int(round(self.rd_lambda * 100)),
            pyramid_levels=self.estimator.pyramid_levels,
            block=self.estimator.block,
            search_radius=self.estimator.search_radius,
        )

    @classmethod
    def from_header(cls, header: BitstreamHeader) -> "EncoderConfig":
        return cls(
            q_base=header.q_base_tenths / 10,
            rd_lambda=header.lambda_hundredths / 100,
            intra_period=header.intra_period,
            variant=header.variant,
            fixed_scale=1 << header.fixed_log2_s,
            estimator=EstimatorConfig(header.pyramid_levels, header.block, header.search_radius),
        )


def quant_params(cfg: EncoderConfig, entry: GopEntry) -> QuantParams:
    return QuantParams(cfg.q_base, entry.temporal_level, entry.kind)


@dataclass(frozen=True, eq=False)
class RdCandidate:
    s: int
    reconstruction: Frame
    motion: bytes
    texture: bytes
    distortion: float
    cost: float
    compensation: Optional[Compensation] = None

    @property
    def motion_bits(self) -> int:
        return 8 * len(self.motion)

    @property
    def texture_bits(self) -> int:
        return 8 * len(self.texture)

    @property
    def header_bits(self) -> int:
        return frame_overhead_bits(len(self.motion), len(self.texture))

    @property
    def bits(self) -> int:
        return self.motion_bits + self.texture_bits + self.header_bits


def select_motion(
    x_t: Frame,
    s: int,
    refs: ReferencePair,
    cfg: EncoderConfig,
    m_past: FlowField,
    m_future: FlowField,
) -> tuple[MotionPayload, Compensation]:
    """编码估计的运动场，或直接沿用预测运动场（残差全零，载荷为空）。

    按 λ · MSE(x_t, mc_t) + 运动码率 取较小者，相等时取预测。解码端只看载荷，两种选择对其透明。
    """
    variant = cfg.variant
    mp_past, mp_future = refs.predictors(coded_scale(variant, s))
    coded, mh_past, mh_future = encode_flows(m_past, m_future, mp_past, mp_future)
    coded_comp = compensate(variant, s, refs, mh_past, mh_future)
    if coded.zero_residual:
        return coded, coded_comp
    skip, sp_past, sp_future = encode_flows(mp_past, mp_future, mp_past, mp_future)
    skip_comp = compensate(variant, s, refs, sp_past, sp_future)
    coded_cost = cfg.rd_lambda * mse(x_t, coded_comp.predictor) + 8 * len(coded.serialized)
    skip_cost = cfg.rd_lambda * mse(x_t, skip_comp.predictor) + 8 * len(skip.serialized)
    logger.debug("s=%d motion: coded %.1f, predicted %.1f", s, coded_cost, skip_cost)
    if skip_cost <= coded_cost:
        return skip, skip_comp
    return coded, coded_comp


def encode_bframe_at_scale(
    x_t: Frame,
    ref_past: Frame,
    ref_future: Frame,
    s: int,
    qp: QuantParams,
    cfg: EncoderConfig,
    refs: Optional[ReferencePair] = None,
) -> RdCandidate:
    """在下采样因子 s 下完整编码一帧 B 帧（运动 + 残差），返回带精确码率的候选。"""
    s = check_scale(s)
    if not (x_t.dims == ref_past.dims == ref_future.dims):
        raise DataError(f"dimension mismatch: {x_t.dims}, {ref_past.dims}, {ref_future.dims}")
    refs = refs or ReferencePair(ref_past, ref_future, cfg.estimator)
    variant = cfg.variant
    low_past, low_future = refs.at_scale(s)
    x_low = downsample_frame(x_t, s)
    m_past = estimate_flow(x_low, low_past, cfg.estimator)
    m_future = estimate_flow(x_low, low_future, cfg.estimator)
    if variant is Variant.VARIANT_A and s > 1:
        m_past = upsample_flow(m_past, s, x_t.dims)
        m_future = upsample_flow(m_future, s, x_t.dims)
    motion, comp = select_motion(x_t, s, refs, cfg, m_past, m_future)
    texture, recon = encode_residual(x_t, comp.predictor, qp)
    distortion = mse(x_t, recon)
    motion_bytes = motion.serialized
    bits = 8 * (len(motion_bytes) + len(texture.data)) + frame_overhead_bits(len(motion_bytes), len(texture.data))
    cost = cfg.rd_lambda * distortion + bits
    logger.debug("s=%d mse=%.3f bits=%d cost=%.2f", s, distortion, bits, cost)
    return RdCandidate(s, recon, motion_bytes, texture.data, distortion, cost, comp)


def select_scale(candidates: list[RdCandidate]) -> RdCandidate:
    """最小代价；代价相同取较小的 s。"""
    if not candidates:
        raise ConfigError("no scale candidates to select from")
    return min(candidates, key=lambda c: (c.cost, c.s))


@dataclass
class FrameReport:
    coding_index: int
    display_index: int
    kind: FrameKind
    temporal_level: int
    scale: int
    motion_bits: int
    texture_bits: int
    total_bits: int
    distortion: float
    candidate_costs: dict[int, float] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def psnr(self) -> float:
        return psnr_from_mse(self.distortion)


@dataclass
class EncodeResult:
    config: EncoderConfig
    plan: GopPlan
    bitstream: Bitstream
    data: bytes
    reports: list[FrameReport]
    reconstructions: list[Frame]
    elapsed: float

    @property
    def width(self) -> int:
        return self.bitstream.header.width

    @property
    def height(self) -> int:
        return self.bitstream.header.height

    @property
    def frame_count(self) -> int:
        return self.bitstream.header.frame_count

    @property
    def total_bits(self) -> int:
        return 8 * len(self.data)

    @property
    def bpp(self) -> float:
        return bits_per_pixel(self.total_bits, self.width, self.height, self.frame_count)

    @property
    def mean_mse(self) -> float:
        return sum(r.distortion for r in self.reports) / len(self.reports)

    @property
    def psnr(self) -> float:
        """序列 PSNR：由全部帧的平均 MSE 计算。"""
        return psnr_from_mse(self.mean_mse)

    def by_display(self) -> list[FrameReport]:
        return sorted(self.reports, key=lambda r: r.display_index)

    def scale_histogram(self) -> dict[int, int]:
        counts = Counter(r.scale for r in self.reports if r.kind.is_b)
        return {s: counts.get(s, 0) for s in SCALE_FACTORS}


def _evaluate(
    x_t: Frame,
    refs: ReferencePair,
    qp: QuantParams,
    cfg: EncoderConfig,
    pool: Optional[ThreadPoolExecutor],
) -> list[RdCandidate]:
    def one(s: int) -> RdCandidate:
        return encode_bframe_at_scale(x_t, refs.past, refs.future, s, qp, cfg, refs)

    scales = cfg.candidate_scales
    if pool is None or len(scales) == 1:
        return [one(s) for s in scales]
    return list(pool.map(one, scales))


def encode_sequence(seq: Sequence, cfg: EncoderConfig) -> EncodeResult:
    """按编码顺序闭环编码；参考帧为编码端自己的重建帧。"""
    start = time.perf_counter()
    plan = build_plan(len(seq), cfg.intra_period)
    header = cfg.header(seq.width, seq.height, len(seq))
    recon: dict[int, Frame] = {}
    records: list[FrameRecord] = []
    reports: list[FrameReport] = []
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for coding_index, entry in enumerate(plan):
            t0 = time.perf_counter()
            x_t = seq[entry.display_index]
            qp = quant_params(cfg, entry)
            if entry.kind is FrameKind.INTRA:
                texture, frame = encode_intra(x_t, qp)
                record = FrameRecord(FrameKind.INTRA, 0, b"", texture.data)
                costs: dict[int, float] = {}
                scale, motion_bits = 1, 0
                distortion = mse(x_t, frame)
            else:
                refs = ReferencePair(recon[entry.ref_past], recon[entry.ref_future], cfg.estimator)
                candidates = _evaluate(x_t, refs, qp, cfg, pool)
                best = select_scale(candidates)
                costs = {c.s: c.cost for c in candidates}
                frame, scale, motion_bits, distortion = best.reconstruction, best.s, best.motion_bits, best.distortion
                record = FrameRecord(entry.kind, log2_scale(best.s), best.motion, best.texture)
                logger.debug(
                    "frame %d (%s, level %d): s=%d costs=%s",
                    entry.display_index,
                    entry.kind.short,
                    entry.temporal_level,
                    scale,
                    {k: round(v, 1) for k, v in costs.items()},
                )
            recon[entry.display_index] = frame
            records.append(record)
            reports.append(
                FrameReport(
                    coding_index=coding_index,
                    display_index=entry.display_index,
                    kind=entry.kind,
                    temporal_level=entry.temporal_level,
                    scale=scale,
                    motion_bits=motion_bits,
                    texture_bits=8 * len(record.texture),
                    total_bits=record.total_bits,
                    distortion=distortion,
                    candidate_costs=costs,
                    elapsed=time.perf_counter() - t0,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    bitstream = Bitstream(header, records)
    result = EncodeResult(
        config=cfg,
        plan=plan,
        bitstream=bitstream,
        data=bitstream.to_bytes(),
        reports=reports,
        reconstructions=[recon[i] for i in range(len(seq))],
        elapsed=time.perf_counter() - start,
    )
    logger.info(
        "Encoded %d frames (%s, q_base %.1f): %d bits, %.4f bpp, %.3f dB, %.2fs, scales %s",
        result.frame_count,
        cfg.label,
        cfg.q_base,
        result.total_bits,
        result.bpp,
        result.psnr,
        result.elapsed,
        result.scale_histogram(),
    )
    return result


__all__ = [
    "DEFAULT_Q_BASE",
    "DEFAULT_LAMBDA_SCALE",
    "DEFAULT_INTRA_PERIOD",
    "Q_BASE_LADDER",
    "parse_variant",
    "variant_label",
    "parse_scales",
    "EncoderConfig",
    "quant_params",
    "RdCandidate",
    "select_motion",
    "encode_bframe_at_scale",
    "select_scale",
    "FrameReport",
    "EncodeResult",
    "encode_sequence",
]
