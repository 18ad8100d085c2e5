"""帧与序列模型：平面 RGB 8-bit、边缘复制填充到 64 的倍数、磁盘读写、MSE。"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from PIL import Image

from omra.core.errors import DataError

logger = logging.getLogger(__name__)

PAD_MULTIPLE = 64
FORMATS = ("png_dir", "raw_rgb24")
PNG_NAME = "frame_{:05d}.png"


def _padded(size: int, multiple: int) -> int:
    return -(-size // multiple) * multiple


@dataclass(frozen=True, eq=False)
class Frame:
    """planes 形状 (3, padded_height, padded_width)，uint8；width/height 为真实尺寸。"""

    planes: np.ndarray
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.planes.ndim != 3 or self.planes.shape[0] != 3:
            raise DataError(f"frame planes must be (3, H, W), got {self.planes.shape}")
        if self.planes.dtype != np.uint8:
            object.__setattr__(self, "planes", np.clip(self.planes, 0, 255).astype(np.uint8))
        if self.width > self.padded_width or self.height > self.padded_height:
            raise DataError(
                f"true size {self.width}x{self.height} exceeds planes {self.padded_width}x{self.padded_height}"
            )
        self.planes.flags.writeable = False

    @property
    def padded_width(self) -> int:
        return int(self.planes.shape[2])

    @property
    def padded_height(self) -> int:
        return int(self.planes.shape[1])

    @property
    def dims(self) -> tuple[int, int]:
        """(padded_width, padded_height)，即平面尺寸。"""
        return self.padded_width, self.padded_height

    @classmethod
    def from_rgb(cls, rgb: np.ndarray, multiple: int = PAD_MULTIPLE) -> "Frame":
        """H×W×3 数组 → 边缘复制填充到 multiple 的倍数。"""
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise DataError(f"expected H x W x 3 image, got {rgb.shape}")
        height, width = rgb.shape[:2]
        planes = np.ascontiguousarray(np.transpose(rgb, (2, 0, 1)))
        return cls(pad_planes(planes, multiple), width, height)

    @classmethod
    def constant(cls, value: int, width: int, height: int, multiple: int = PAD_MULTIPLE) -> "Frame":
        planes = np.full((3, _padded(height, multiple), _padded(width, multiple)), value, dtype=np.uint8)
        return cls(planes, width, height)

    def true_planes(self) -> np.ndarray:
        return self.planes[:, : self.height, : self.width]

    def to_rgb(self) -> np.ndarray:
        """真实区域 H×W×3。"""
        return np.ascontiguousarray(np.transpose(self.true_planes(), (1, 2, 0)))


def pad_planes(planes: np.ndarray, multiple: int = PAD_MULTIPLE) -> np.ndarray:
    """(C, H, W) 边缘复制填充到 multiple 的倍数；已对齐时原样返回。"""
    _, height, width = planes.shape
    ph, pw = _padded(height, multiple), _padded(width, multiple)
    if (ph, pw) == (height, width):
        return planes
    return np.pad(planes, ((0, 0), (0, ph - height), (0, pw - width)), mode="edge")


def crop(frame: Frame) -> Frame:
    """丢弃填充区，仅以真实区域重新填充（解码端按头部真实尺寸输出）。"""
    return Frame.from_rgb(frame.to_rgb())


def mse(a: Frame, b: Frame) -> float:
    """真实区域内 3·W·H 个样本的均方误差，填充区不计。"""
    if (a.width, a.height) != (b.width, b.height):
        raise DataError(f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")
    diff = a.true_planes().astype(np.int32) - b.true_planes().astype(np.int32)
    return float(np.mean(diff.astype(np.float64) ** 2))


@dataclass(frozen=True)
class Sequence:
    """显示顺序的帧列表；frame_rate 仅作元数据。"""

    frames: tuple[Frame, ...]
    frame_rate: float = 30.0
    _sizes: tuple[int, int] = field(init=False, repr=False, default=(0, 0))

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if not frames:
            raise DataError("sequence has no frames")
        first = (frames[0].width, frames[0].height)
        for i, f in enumerate(frames):
            if (f.width, f.height) != first:
                raise DataError(f"frame {i}: dimension mismatch {f.width}x{f.height} vs {first[0]}x{first[1]}")
        object.__setattr__(self, "_sizes", first)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, index: int) -> Frame:
        return self.frames[index]

    def __iter__(self):
        return iter(self.frames)

    @property
    def width(self) -> int:
        return self._sizes[0]

    @property
    def height(self) -> int:
        return self._sizes[1]

    @classmethod
    def of(cls, frames: Iterable[Frame], frame_rate: float = 30.0) -> "Sequence":
        return cls(tuple(frames), frame_rate)


def _check_format(fmt: str) -> str:
    fmt = (fmt or "").strip().lower()
    if fmt not in FORMATS:
        raise DataError(f"unknown format {fmt!r}, expected one of {', '.join(FORMATS)}")
    return fmt


def load_sequence(path: Path, fmt: str, width: int, height: int, count: int) -> Sequence:
    """读取 png_dir（frame_%05d.png）或 raw_rgb24（逐帧交织 RGB）。错误信息带出错帧号。"""
    fmt = _check_format(fmt)
    path = Path(path).expanduser()
    if width <= 0 or height <= 0 or count <= 0:
        raise DataError(f"invalid geometry {width}x{height}, {count} frames")
    frames: list[Frame] = []
    if fmt == "raw_rgb24":
        if not path.is_file():
            raise DataError(f"raw file not found: {path}")
        frame_bytes = 3 * width * height
        data = path.read_bytes()
        for i in range(count):
            chunk = data[i * frame_bytes : (i + 1) * frame_bytes]
            if len(chunk) < frame_bytes:
                raise DataError(f"frame {i}: raw file truncated ({len(data)} bytes for {count} frames)")
            rgb = np.frombuffer(chunk, dtype=np.uint8).reshape(height, width, 3)
            frames.append(Frame.from_rgb(rgb))
    else:
        for i in range(count):
            fp = path / PNG_NAME.format(i)
            if not fp.is_file():
                raise DataError(f"frame {i}: missing file {fp}")
            with Image.open(fp) as img:
                rgb = np.asarray(img.convert("RGB"), dtype=np.uint8)
            if rgb.shape[:2] != (height, width):
                raise DataError(f"frame {i}: dimension mismatch {rgb.shape[1]}x{rgb.shape[0]}, expected {width}x{height}")
            frames.append(Frame.from_rgb(rgb))
    logger.debug("Loaded %d frames (%dx%d) from %s", len(frames), width, height, path)
    return Sequence.of(frames)


def save_sequence(seq: Sequence, path: Path, fmt: str) -> Path:
    """按格式写出真实区域；png_dir 自动建目录。"""
    fmt = _check_format(fmt)
    path = Path(path).expanduser()
    if fmt == "raw_rgb24":
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            for frame in seq:
                f.write(frame.to_rgb().tobytes())
    else:
        path.mkdir(parents=True, exist_ok=True)
        for i, frame in enumerate(seq):
            Image.fromarray(frame.to_rgb()).save(path / PNG_NAME.format(i))
    return path
