"""异常层级：库代码只抛这些异常，CLI 统一捕获并映射为退出码。"""
from __future__ import annotations

# 退出码：0 成功，1 用法/配置，2 数据，3 码流
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BITSTREAM = 3


class OmraError(Exception):
    """所有 omra 异常的基类。"""

    exit_code = EXIT_USAGE


class ConfigError(OmraError, ValueError):
    """参数或配置非法（intra_period、scale 集合、lambda 等）。"""

    exit_code = EXIT_USAGE


class GopError(ConfigError):
    """无法为给定帧数 / intra_period 构建 GOP 计划。"""


class DataError(OmraError):
    """输入数据问题：文件缺失、尺寸不符、raw 文件截断。"""

    exit_code = EXIT_DATA


class CurveError(DataError):
    """RD 曲线非法（点数、单调性、PSNR 区间不重叠）。"""


class BitstreamError(OmraError):
    """码流损坏或截断。"""

    exit_code = EXIT_BITSTREAM


__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_DATA",
    "EXIT_BITSTREAM",
    "OmraError",
    "ConfigError",
    "GopError",
    "DataError",
    "CurveError",
    "BitstreamError",
]
