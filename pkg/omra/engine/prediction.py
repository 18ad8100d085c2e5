"""编码端与解码端共用的时域预测流水线：参考帧下采样缓存、运动场预测、按变体做运动补偿。

三种顺序（s 为下采样因子）：
  OMRA / FIXED  Compress → Up_Flow → Warp：低分辨率编码运动，上采样运动场，在原分辨率参考帧上 warp
  VARIANT_A     Up_Flow → Compress → Warp：先上采样运动场，在原分辨率编码运动
  VARIANT_B     Compress → Warp → Up_MC：低分辨率 warp，再上采样合成的预测帧
"""
from __future__ import annotations

from dataclasses import dataclass

from omra.core.frame import Frame
from omra.engine.container import Variant
from omra.motion import (
    QPEL,
    EstimatorConfig,
    FlowField,
    downsample_frame,
    predict_flows,
    synthesize_predictor,
    upsample_flow,
    upsample_frame,
    warp,
)


def coded_scale(variant: Variant, s: int) -> int:
    """运动场被编码时所处分辨率相对原分辨率的缩小倍数。"""
    return 1 if variant is Variant.VARIANT_A else s


def vector_limit(variant: Variant, s: int, estimator: EstimatorConfig) -> int:
    """编码运动矢量分量的最大幅值（1/4 像素）。"""
    limit = QPEL * estimator.cap
    return limit * s if variant is Variant.VARIANT_A else limit


class ReferencePair:
    """一帧 B 帧的两个已重建参考帧，按 s 缓存下采样结果与运动场预测。

    并发评估不同 s 时同一键可能被重复计算，结果相同。
    """

    def __init__(self, past: Frame, future: Frame, estimator: EstimatorConfig) -> None:
        self.past = past
        self.future = future
        self.estimator = estimator
        self._frames: dict[int, tuple[Frame, Frame]] = {1: (past, future)}
        self._predictors: dict[int, tuple[FlowField, FlowField]] = {}

    @property
    def dims(self) -> tuple[int, int]:
        return self.past.dims

    def at_scale(self, s: int) -> tuple[Frame, Frame]:
        pair = self._frames.get(s)
        if pair is None:
            pair = (downsample_frame(self.past, s), downsample_frame(self.future, s))
            self._frames[s] = pair
        return pair

    def predictors(self, s: int) -> tuple[FlowField, FlowField]:
        """mp_past, mp_future，由下采样 s 倍的参考帧估计。"""
        pair = self._predictors.get(s)
        if pair is None:
            pair = predict_flows(*self.at_scale(s), self.estimator)
            self._predictors[s] = pair
        return pair


@dataclass(frozen=True, eq=False)
class Compensation:
    """合成的时域预测帧 mc_t 以及 warp 时实际使用的参考帧与运动场。"""

    predictor: Frame
    refs: tuple[Frame, Frame]
    flows: tuple[FlowField, FlowField]
    upsample: int = 1

    def warped(self) -> tuple[Frame, Frame]:
        """两路 warp 结果（原分辨率）。"""
        out = []
        for ref, flow in zip(self.refs, self.flows):
            frame, _ = warp(ref, flow)
            if self.upsample > 1:
                frame = upsample_frame(frame, self.upsample, self.predictor.dims)
            out.append(Frame(frame.planes, self.predictor.width, self.predictor.height))
        return out[0], out[1]


def compensate(
    variant: Variant,
    s: int,
    refs: ReferencePair,
    flow_past: FlowField,
    flow_future: FlowField,
) -> Compensation:
    """flow_* 为已重建（与解码端一致）的运动场，所处分辨率见 coded_scale。"""
    past, future = refs.past, refs.future
    if variant is Variant.VARIANT_B and s > 1:
        low_past, low_future = refs.at_scale(s)
        low = synthesize_predictor(low_past, low_future, flow_past, flow_future)
        up = upsample_frame(low, s, refs.dims)
        return Compensation(
            Frame(up.planes, past.width, past.height),
            (low_past, low_future),
            (flow_past, flow_future),
            upsample=s,
        )
    if variant is not Variant.VARIANT_A and s > 1:
        flow_past = upsample_flow(flow_past, s, refs.dims)
        flow_future = upsample_flow(flow_future, s, refs.dims)
    mc = synthesize_predictor(past, future, flow_past, flow_future)
    return Compensation(mc, (past, future), (flow_past, flow_future))


__all__ = ["coded_scale", "vector_limit", "ReferencePair", "Compensation", "compensate"]
