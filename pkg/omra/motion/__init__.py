"""运动：重采样、光流估计 / 预测、warp 与预测合成。"""
from __future__ import annotations

from omra.motion.compensate import synthesize_predictor, warp
from omra.motion.field import QPEL, FlowField
from omra.motion.flow import ESTIMATOR_PRESETS, EstimatorConfig, estimate_flow, predict_flows
from omra.motion.resample import (
    SCALE_FACTORS,
    check_scale,
    downsample_frame,
    log2_scale,
    scale_from_log2,
    upsample_flow,
    upsample_frame,
)

__all__ = [
    "QPEL",
    "FlowField",
    "ESTIMATOR_PRESETS",
    "EstimatorConfig",
    "estimate_flow",
    "predict_flows",
    "warp",
    "synthesize_predictor",
    "SCALE_FACTORS",
    "check_scale",
    "log2_scale",
    "scale_from_log2",
    "downsample_frame",
    "upsample_frame",
    "upsample_flow",
]
