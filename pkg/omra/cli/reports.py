"""CLI 报告：逐帧 CSV、GOP 位置上的 s 频率表、RD 曲线 SVG。"""
from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence as Seq

from omra.core.frame import Sequence, mse
from omra.core.gop import gop_position
from omra.core.metrics import psnr_from_mse
from omra.engine import DecodeResult, EncodeResult
from omra.motion import SCALE_FACTORS

logger = logging.getLogger(__name__)

FRAME_FIELDS = (
    "display_index",
    "coding_index",
    "kind",
    "temporal_level",
    "scale",
    "motion_bits",
    "texture_bits",
    "total_bits",
    "psnr",
    *(f"cost_s{s}" for s in SCALE_FACTORS),
    "elapsed",
)


def _fmt(value: Any) -> Any:
    if isinstance(value, float):
        return "inf" if value == float("inf") else f"{value:.6f}"
    return value


def rows_from_encode(result: EncodeResult) -> list[dict[str, Any]]:
    rows = []
    for r in result.by_display():
        row = {
            "display_index": r.display_index,
            "coding_index": r.coding_index,
            "kind": r.kind.short,
            "temporal_level": r.temporal_level,
            "scale": r.scale,
            "motion_bits": r.motion_bits,
            "texture_bits": r.texture_bits,
            "total_bits": r.total_bits,
            "psnr": r.psnr,
            "elapsed": r.elapsed,
        }
        for s in SCALE_FACTORS:
            row[f"cost_s{s}"] = r.candidate_costs.get(s, "")
        rows.append(row)
    return rows


def rows_from_decode(result: DecodeResult, source: Optional[Sequence] = None) -> list[dict[str, Any]]:
    """码流统计；给出原序列时补 PSNR 列。"""
    rows = []
    for info in result.by_display():
        psnr: Any = ""
        if source is not None:
            psnr = psnr_from_mse(mse(source[info.display_index], result.frames[info.display_index]))
        row = {
            "display_index": info.display_index,
            "coding_index": info.coding_index,
            "kind": info.kind.short,
            "temporal_level": info.temporal_level,
            "scale": info.scale,
            "motion_bits": info.motion_bits,
            "texture_bits": info.texture_bits,
            "total_bits": info.total_bits,
            "psnr": psnr,
            "elapsed": "",
        }
        row.update({f"cost_s{s}": "" for s in SCALE_FACTORS})
        rows.append(row)
    return rows


def rows_to_csv(rows: Iterable[dict[str, Any]], fields: Seq[str] = FRAME_FIELDS, path: Optional[Path] = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})
    text = buf.getvalue()
    if path is not None:
        path = Path(path).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def scale_frequencies(rows: Iterable[dict[str, Any]], intra_period: int) -> list[dict[str, Any]]:
    """每个 GOP 内位置上各 s 的相对频率（跨所有 GOP）。Intra 帧按其信令 s=1 计入。"""
    counts: dict[int, dict[int, int]] = {p: {s: 0 for s in SCALE_FACTORS} for p in range(intra_period)}
    for row in rows:
        counts[gop_position(int(row["display_index"]), intra_period)][int(row["scale"])] += 1
    out = []
    for pos in range(intra_period):
        total = sum(counts[pos].values())
        if total == 0:
            continue
        entry: dict[str, Any] = {"position": pos, "frames": total}
        entry.update({f"s{s}": counts[pos][s] / total for s in SCALE_FACTORS})
        out.append(entry)
    return out


SCALE_HIST_FIELDS = ("position", "frames", *(f"s{s}" for s in SCALE_FACTORS))


def plot_svg(
    series: dict[str, tuple[Seq[float], Seq[float]]],
    path: Path,
    xlabel: str,
    ylabel: str,
    title: str = "",
) -> Path:
    """折线图写为 SVG（Agg 后端，不需要显示设备）。"""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, (xs, ys) in series.items():
        ax.plot(list(xs), list(ys), marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend()
    path = Path(path).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.debug("Plot saved to %s", path)
    return path


__all__ = [
    "FRAME_FIELDS",
    "SCALE_HIST_FIELDS",
    "rows_from_encode",
    "rows_from_decode",
    "rows_to_csv",
    "scale_frequencies",
    "plot_svg",
]
