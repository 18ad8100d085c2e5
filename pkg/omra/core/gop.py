"""分层 B 帧预测结构：编码顺序、参考帧、时间层级、帧类型。

每个 GOP [a, a+P] 两端为 Intra（闭合 GOP），中点递归地作为 B 帧参考左右两端，
深度优先、先左后右；最深层（奇数显示序号）为非参考 B 帧。
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Optional

from omra.core.errors import GopError

INTRA_PERIODS = (2, 4, 8, 16, 32, 64)


class FrameKind(IntEnum):
    """取值即码流帧头 bits 7–6 的编码。"""

    INTRA = 0
    REF_B = 1
    NON_REF_B = 2

    @property
    def short(self) -> str:
        return {FrameKind.INTRA: "I", FrameKind.REF_B: "RefB", FrameKind.NON_REF_B: "NonRefB"}[self]

    @property
    def is_b(self) -> bool:
        return self is not FrameKind.INTRA


@dataclass(frozen=True)
class GopEntry:
    display_index: int
    kind: FrameKind
    ref_past: Optional[int]
    ref_future: Optional[int]
    temporal_level: int


@dataclass(frozen=True)
class GopPlan:
    """entries 按编码顺序排列。"""

    entries: tuple[GopEntry, ...]
    intra_period: int

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[GopEntry]:
        return iter(self.entries)

    @property
    def coding_order(self) -> list[int]:
        return [e.display_index for e in self.entries]

    @property
    def max_level(self) -> int:
        return max(e.temporal_level for e in self.entries)

    def entry_for(self, display_index: int) -> GopEntry:
        for e in self.entries:
            if e.display_index == display_index:
                return e
        raise KeyError(display_index)

    def to_csv(self) -> str:
        """coding_order, display_index, kind, ref_past, ref_future, temporal_level"""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["coding_order", "display_index", "kind", "ref_past", "ref_future", "temporal_level"])
        for i, e in enumerate(self.entries):
            writer.writerow([
                i,
                e.display_index,
                e.kind.short,
                "" if e.ref_past is None else e.ref_past,
                "" if e.ref_future is None else e.ref_future,
                e.temporal_level,
            ])
        return buf.getvalue()


def build_plan(frame_count: int, intra_period: int) -> GopPlan:
    if intra_period not in INTRA_PERIODS:
        raise GopError(f"intra_period must be one of {INTRA_PERIODS}, got {intra_period}")
    if frame_count < 1:
        raise GopError(f"frame_count must be >= 1, got {frame_count}")
    if (frame_count - 1) % intra_period != 0:
        raise GopError(
            f"frame_count - 1 must be a multiple of intra_period ({frame_count} frames, period {intra_period})"
        )
    entries: list[GopEntry] = [GopEntry(0, FrameKind.INTRA, None, None, 0)]

    def split(lo: int, hi: int, depth: int) -> None:
        if hi - lo < 2:
            return
        mid = (lo + hi) // 2
        kind = FrameKind.NON_REF_B if hi - lo == 2 else FrameKind.REF_B
        entries.append(GopEntry(mid, kind, lo, hi, depth))
        split(lo, mid, depth + 1)
        split(mid, hi, depth + 1)

    for start in range(0, frame_count - 1, intra_period):
        end = start + intra_period
        entries.append(GopEntry(end, FrameKind.INTRA, None, None, 0))
        split(start, end, 1)
    return GopPlan(tuple(entries), intra_period)


def reference_distance(entry: GopEntry) -> tuple[int, int]:
    """(k_past, k_future)"""
    if not entry.kind.is_b or entry.ref_past is None or entry.ref_future is None:
        raise GopError(f"frame {entry.display_index} is not a B frame")
    return entry.display_index - entry.ref_past, entry.ref_future - entry.display_index


def gop_position(display_index: int, intra_period: int) -> int:
    """GOP 内位置 0..P-1；GOP 末端的 Intra 归入下一个 GOP 的 0。"""
    return display_index % intra_period


__all__ = [
    "INTRA_PERIODS",
    "FrameKind",
    "GopEntry",
    "GopPlan",
    "build_plan",
    "reference_distance",
    "gop_position",
]
