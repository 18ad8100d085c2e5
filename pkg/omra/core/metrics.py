"""质量与码率度量：RGB PSNR、bpp、Bjøntegaard BD-rate / BD-PSNR，以及 RD 曲线 CSV。"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from omra.core.errors import CurveError, DataError
from omra.core.frame import Frame, mse

logger = logging.getLogger(__name__)

LOSSLESS = math.inf  # mse == 0 时的 PSNR
PEAK = 255.0
BD_POINTS = 4
CSV_FIELDS = ("psnr", "bpp")


def psnr_from_mse(value: float) -> float:
    if value <= 0.0:
        return LOSSLESS
    return 10.0 * math.log10(PEAK * PEAK / value)


def psnr(a: Frame, b: Frame) -> float:
    return psnr_from_mse(mse(a, b))


def is_lossless(value: float) -> bool:
    return math.isinf(value) and value > 0


def bits_per_pixel(total_bits: int, width: int, height: int, frame_count: int) -> float:
    """分母为真实尺寸 width·height·frame_count。"""
    pixels = width * height * frame_count
    if pixels <= 0:
        raise DataError(f"invalid pixel count {width}x{height}x{frame_count}")
    return total_bits / pixels


@dataclass(frozen=True)
class RdPoint:
    bpp: float
    psnr: float

    def __post_init__(self) -> None:
        if not self.bpp > 0 or not math.isfinite(self.bpp):
            raise CurveError(f"bpp must be a positive finite number, got {self.bpp}")
        if math.isnan(self.psnr):
            raise CurveError("psnr is NaN")


@dataclass(frozen=True)
class RdCurve:
    """按 bpp 升序；bpp 严格递增、psnr 不减。"""

    points: tuple[RdPoint, ...]
    label: str = ""

    def __post_init__(self) -> None:
        pts = tuple(sorted(self.points, key=lambda p: p.bpp))
        object.__setattr__(self, "points", pts)
        if len(pts) < BD_POINTS:
            raise CurveError(f"curve {self.label or '?'}: need at least {BD_POINTS} points, got {len(pts)}")
        for prev, cur in zip(pts, pts[1:]):
            if cur.bpp <= prev.bpp:
                raise CurveError(f"curve {self.label or '?'}: bpp not strictly increasing at {cur.bpp}")
            if cur.psnr < prev.psnr:
                raise CurveError(f"curve {self.label or '?'}: psnr decreases at bpp {cur.bpp}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def bpps(self) -> np.ndarray:
        return np.array([p.bpp for p in self.points], dtype=np.float64)

    @property
    def psnrs(self) -> np.ndarray:
        return np.array([p.psnr for p in self.points], dtype=np.float64)

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, float]], label: str = "") -> "RdCurve":
        """pairs 为 (bpp, psnr)。"""
        return cls(tuple(RdPoint(float(b), float(p)) for b, p in pairs), label)


def _bd_inputs(curve: RdCurve) -> tuple[np.ndarray, np.ndarray]:
    if len(curve) != BD_POINTS:
        raise CurveError(f"curve {curve.label or '?'}: BD metrics need exactly {BD_POINTS} points, got {len(curve)}")
    q = curve.psnrs
    if not np.all(np.isfinite(q)):
        raise CurveError(f"curve {curve.label or '?'}: lossless point cannot enter a BD fit")
    return q, np.log10(curve.bpps)


def _overlap(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    lo = max(float(a.min()), float(b.min()))
    hi = min(float(a.max()), float(b.max()))
    if hi <= lo:
        raise CurveError(f"ranges do not overlap ([{a.min():.3f}, {a.max():.3f}] vs [{b.min():.3f}, {b.max():.3f}])")
    return lo, hi


def _mean_of_fit(x: np.ndarray, y: np.ndarray, lo: float, hi: float) -> float:
    """三次拟合 y(x) 在 [lo, hi] 上的积分均值。"""
    poly = np.polyint(np.polyfit(x, y, 3))
    return float((np.polyval(poly, hi) - np.polyval(poly, lo)) / (hi - lo))


def bd_rate(anchor: RdCurve, test: RdCurve) -> float:
    """相同 PSNR 下的平均码率差（百分比），负值为节省。"""
    qa, ra = _bd_inputs(anchor)
    qt, rt = _bd_inputs(test)
    lo, hi = _overlap(qa, qt)
    diff = _mean_of_fit(qt, rt, lo, hi) - _mean_of_fit(qa, ra, lo, hi)
    result = (10.0 ** diff - 1.0) * 100.0
    logger.debug("BD-rate %s vs %s over PSNR [%.3f, %.3f]: %.4f%%", test.label, anchor.label, lo, hi, result)
    return result


def bd_psnr(anchor: RdCurve, test: RdCurve) -> float:
    """相同码率下的平均 PSNR 差（dB），正值为质量提升。"""
    qa, ra = _bd_inputs(anchor)
    qt, rt = _bd_inputs(test)
    lo, hi = _overlap(ra, rt)
    return _mean_of_fit(rt, qt, lo, hi) - _mean_of_fit(ra, qa, lo, hi)


def write_curve_csv(curve: RdCurve, path: Path | None = None) -> str:
    """psnr,bpp 行，按 bpp 升序；给出 path 时同时写文件。"""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for p in curve.points:
        writer.writerow([f"{p.psnr:.6f}", f"{p.bpp:.8f}"])
    text = buf.getvalue()
    if path is not None:
        path = Path(path).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def read_curve_csv(path: Path, label: str | None = None) -> RdCurve:
    path = Path(path).expanduser()
    if not path.is_file():
        raise DataError(f"curve file not found: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = [c for c in CSV_FIELDS if c not in (reader.fieldnames or [])]
        if missing:
            raise CurveError(f"{path}: missing column(s) {', '.join(missing)}")
        pairs = []
        for line, row in enumerate(reader, start=2):
            try:
                pairs.append((float(row["bpp"]), float(row["psnr"])))
            except (TypeError, ValueError) as e:
                raise CurveError(f"{path}:{line}: {e}") from e
    return RdCurve.of(pairs, label if label is not None else path.stem)


__all__ = [
    "LOSSLESS",
    "psnr",
    "psnr_from_mse",
    "is_lossless",
    "bits_per_pixel",
    "RdPoint",
    "RdCurve",
    "bd_rate",
    "bd_psnr",
    "write_curve_csv",
    "read_curve_csv",
]
