"""能力受限的金字塔块匹配光流估计，以及由两参考帧推出的运动场预测。

估计器的最大位移 CAP = search_radius · (2^pyramid_levels − 1) 像素；超出 CAP 的真实运动无法恢复，
这正是在低分辨率下做运动估计的意义所在。
最粗层位移不超过 search_radius 时（默认 ≤ 16 px）平移总能逐层命中；更大位移要靠最粗层搜索在窗口边缘饱和，
取决于纹理的低频结构。白噪声在粗层上相关性很弱，不保证命中。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from omra.core.errors import ConfigError, DataError
from omra.core.frame import Frame
from omra.motion.field import QPEL, FlowField, densify_lattice
from omra.motion.resample import box_halve

logger = logging.getLogger(__name__)

# 预设：spy 为默认轻量估计器；pwc 更深一层，能力上限更大
ESTIMATOR_PRESETS: dict[str, dict[str, int]] = {
    "spy": {"pyramid_levels": 3, "block": 8, "search_radius": 4},
    "pwc": {"pyramid_levels": 4, "block": 8, "search_radius": 4},
}


@dataclass(frozen=True)
class EstimatorConfig:
    pyramid_levels: int = 3
    block: int = 8
    search_radius: int = 4

    def __post_init__(self) -> None:
        if self.pyramid_levels < 1:
            raise ConfigError(f"pyramid_levels must be >= 1, got {self.pyramid_levels}")
        if self.block < 2 or self.block % 2:
            raise ConfigError(f"block must be an even size >= 2, got {self.block}")
        if self.search_radius < 1:
            raise ConfigError(f"search_radius must be >= 1, got {self.search_radius}")
        for name in ("pyramid_levels", "block", "search_radius"):
            if getattr(self, name) > 255:
                raise ConfigError(f"{name} does not fit the header byte")

    @property
    def cap(self) -> int:
        """能力上限（像素）。"""
        return self.search_radius * ((1 << self.pyramid_levels) - 1)

    @property
    def alignment(self) -> int:
        return self.block << (self.pyramid_levels - 1)

    @classmethod
    def from_preset(cls, name: str = "spy", **overrides: Any) -> "EstimatorConfig":
        key = (name or "spy").strip().lower()
        if key not in ESTIMATOR_PRESETS:
            raise ConfigError(f"unknown estimator preset {name!r}, expected one of {', '.join(ESTIMATOR_PRESETS)}")
        params = dict(ESTIMATOR_PRESETS[key])
        params.update({k: int(v) for k, v in overrides.items() if v is not None})
        return cls(**params)


def luma_proxy(planes: np.ndarray) -> np.ndarray:
    """四舍五入的 (R + 2G + B) / 4。"""
    p = planes.astype(np.int32)
    return (p[0] + 2 * p[1] + p[2] + 2) // 4


def _blocks(img: np.ndarray, b: int) -> np.ndarray:
    h, w = img.shape
    return img.reshape(h // b, b, w // b, b).transpose(0, 2, 1, 3)


class _Matcher:
    """单层块匹配：参考图边缘复制扩边后按块收集候选块并计算 SAD。"""

    def __init__(self, cur: np.ndarray, ref: np.ndarray, block: int, margin: int) -> None:
        self.block = block
        self.margin = margin
        self.cur_blocks = _blocks(cur, block)
        self.ref = np.pad(ref, margin, mode="edge")
        nby, nbx = self.cur_blocks.shape[:2]
        offs = np.arange(block)
        self.base_y = (np.arange(nby) * block)[:, None, None, None] + offs[None, None, :, None] + margin
        self.base_x = (np.arange(nbx) * block)[None, :, None, None] + offs[None, None, None, :] + margin

    def sad(self, vy: np.ndarray, vx: np.ndarray) -> np.ndarray:
        """vy, vx 形状 (nby, nbx) 的整数矢量 → 每块 SAD。"""
        lim = self.margin
        ys = self.base_y + np.clip(vy, -lim, lim)[:, :, None, None]
        xs = self.base_x + np.clip(vx, -lim, lim)[:, :, None, None]
        patch = self.ref[ys, xs]
        return np.abs(self.cur_blocks - patch).sum(axis=(2, 3))

    def search(self, init_y: np.ndarray, init_x: np.ndarray, radius: int) -> tuple[np.ndarray, np.ndarray]:
        """以 init 为中心全搜索 ±radius；SAD 相同时依次取矢量模小、dy 小、dx 小者。"""
        offsets = np.arange(-radius, radius + 1)
        cand_y, cand_x, sads = [], [], []
        for oy in offsets:
            for ox in offsets:
                vy = init_y + oy
                vx = init_x + ox
                cand_y.append(vy)
                cand_x.append(vx)
                sads.append(self.sad(vy, vx))
        cy = np.stack(cand_y)
        cx = np.stack(cand_x)
        sad = np.stack(sads)
        mag = cy * cy + cx * cx
        best = np.lexsort((cx, cy, mag, sad), axis=0)[0]
        pick = best[None, :, :]
        return np.take_along_axis(cy, pick, 0)[0], np.take_along_axis(cx, pick, 0)[0]


def _subpel(matcher: _Matcher, vy: np.ndarray, vx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """抛物线拟合 {−1, 0, +1} 处 SAD，得到 1/4 像素偏移（限制在 ±0.75）。"""
    s0 = matcher.sad(vy, vx).astype(np.int64)

    def refine(minus: np.ndarray, plus: np.ndarray) -> np.ndarray:
        num = (minus - plus) * QPEL
        den = 2 * (minus - 2 * s0 + plus)
        safe = np.where(den > 0, den, 1)
        mag = (2 * np.abs(num) + safe) // (2 * safe)
        q = np.where(num < 0, -mag, mag)
        # 精确匹配（SAD 为 0）或非凸时不做亚像素
        q = np.where((den > 0) & (s0 > 0), q, 0)
        return np.clip(q, -3, 3)

    qy = refine(matcher.sad(vy - 1, vx).astype(np.int64), matcher.sad(vy + 1, vx).astype(np.int64))
    qx = refine(matcher.sad(vy, vx - 1).astype(np.int64), matcher.sad(vy, vx + 1).astype(np.int64))
    return vy * QPEL + qy, vx * QPEL + qx


def _estimate_lattice(cur: np.ndarray, ref: np.ndarray, cfg: EstimatorConfig) -> tuple[np.ndarray, np.ndarray]:
    """对齐后的亮度图 → 最细层块格点（1/4 像素单位）。"""
    pyr_cur, pyr_ref = [cur], [ref]
    for _ in range(cfg.pyramid_levels - 1):
        pyr_cur.append(box_halve(pyr_cur[-1]))
        pyr_ref.append(box_halve(pyr_ref[-1]))
    margin = cfg.cap + 2
    vy = vx = None
    for level in range(cfg.pyramid_levels - 1, -1, -1):
        matcher = _Matcher(pyr_cur[level], pyr_ref[level], cfg.block, margin)
        nby, nbx = matcher.cur_blocks.shape[:2]
        if vy is None:
            init_y = np.zeros((nby, nbx), dtype=np.int64)
            init_x = np.zeros((nby, nbx), dtype=np.int64)
        else:
            # 最近父块的矢量加倍
            rows = np.minimum(np.arange(nby) // 2, vy.shape[0] - 1)
            cols = np.minimum(np.arange(nbx) // 2, vy.shape[1] - 1)
            init_y = 2 * vy[np.ix_(rows, cols)]
            init_x = 2 * vx[np.ix_(rows, cols)]
        vy, vx = matcher.search(init_y, init_x, cfg.search_radius)
    qy, qx = _subpel(matcher, vy, vx)
    limit = QPEL * cfg.cap
    return np.clip(qy, -limit, limit), np.clip(qx, -limit, limit)


def estimate_flow(cur: Frame, ref: Frame, cfg: EstimatorConfig | None = None) -> FlowField:
    """后向光流：cur 的像素 p 对应 ref 中的 p + flow(p)。"""
    cfg = cfg or EstimatorConfig()
    if cur.dims != ref.dims:
        raise DataError(f"dimension mismatch: {cur.dims} vs {ref.dims}")
    width, height = cur.dims
    align = cfg.alignment
    pad_h, pad_w = -height % align, -width % align
    lc, lr = luma_proxy(cur.planes), luma_proxy(ref.planes)
    if pad_h or pad_w:
        lc = np.pad(lc, ((0, pad_h), (0, pad_w)), mode="edge")
        lr = np.pad(lr, ((0, pad_h), (0, pad_w)), mode="edge")
    qy, qx = _estimate_lattice(lc, lr, cfg)
    full_h, full_w = lc.shape
    dy = densify_lattice(qy, cfg.block, full_w, full_h)[:height, :width]
    dx = densify_lattice(qx, cfg.block, full_w, full_h)[:height, :width]
    return FlowField(np.ascontiguousarray(dx), np.ascontiguousarray(dy))


def halve_toward_zero(q: np.ndarray) -> np.ndarray:
    return np.sign(q) * (np.abs(q) // 2)


def predict_flows(ref_past: Frame, ref_future: Frame, cfg: EstimatorConfig | None = None) -> tuple[FlowField, FlowField]:
    """线性运动假设：G = flow(ref_future → ref_past)，mp_past = G/2，mp_future = −G/2。只用已解码参考帧，解码端可复现。"""
    if ref_past.dims != ref_future.dims:
        raise DataError(f"dimension mismatch: {ref_past.dims} vs {ref_future.dims}")
    g = estimate_flow(ref_future, ref_past, cfg)
    half_x, half_y = halve_toward_zero(g.dx), halve_toward_zero(g.dy)
    return FlowField(half_x, half_y), FlowField(-half_x, -half_y)


__all__ = [
    "ESTIMATOR_PRESETS",
    "EstimatorConfig",
    "luma_proxy",
    "estimate_flow",
    "halve_toward_zero",
    "predict_flows",
]
