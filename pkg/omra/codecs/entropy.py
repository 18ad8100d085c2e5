"""比特级读写与 0 阶指数哥伦布码（ue / se），MSB 优先。"""
from __future__ import annotations

from omra.core.errors import BitstreamError

UE_LIMIT = (1 << 32) - 1


def ue_length(v: int) -> int:
    """ue(v) 码长：2·bitlen(v+1) − 1。"""
    return 2 * (v + 1).bit_length() - 1


def se_map(v: int) -> int:
    return 2 * v - 1 if v > 0 else -2 * v


class BitSink:
    """只追加的比特缓冲：整字节进 bytearray，不足一字节的尾部留在整数累加器里；getvalue() 末尾补 0。"""

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._pending = 0
        self._bits = 0

    @property
    def bit_count(self) -> int:
        return self._bits

    def _put(self, code: int, n: int) -> None:
        # code 的高位零由 n 隐含
        self._acc = (self._acc << n) | code
        self._pending += n
        self._bits += n
        if self._pending >= 8:
            rest = self._pending & 7
            self._buf += (self._acc >> rest).to_bytes(self._pending >> 3, "big")
            self._acc &= (1 << rest) - 1
            self._pending = rest

    def write_ones(self, n: int) -> None:
        """连续 n 个 ue(0)。"""
        if n > 0:
            self._put((1 << n) - 1, n)

    def ue_write(self, v: int) -> None:
        if v < 0 or v >= UE_LIMIT:
            raise ValueError(f"ue value out of range: {v}")
        code = v + 1
        self._put(code, 2 * code.bit_length() - 1)

    def se_write(self, v: int) -> None:
        if abs(v) >= 1 << 31:
            raise ValueError(f"se value out of range: {v}")
        self.ue_write(se_map(v))

    def getvalue(self) -> bytes:
        if not self._pending:
            return bytes(self._buf)
        return bytes(self._buf) + bytes([(self._acc << (8 - self._pending)) & 0xFF])


class BitSource:
    """按位读取，记录已消耗比特数；读过末尾抛 BitstreamError。"""

    def __init__(self, data: bytes) -> None:
        self._data = bytes(data)
        self._size = 8 * len(self._data)
        self._pos = 0

    @property
    def consumed(self) -> int:
        return self._pos

    def read_bits(self, n: int) -> int:
        end = self._pos + n
        if end > self._size:
            raise BitstreamError("bitstream exhausted")
        if n == 0:
            return 0
        first, last = self._pos >> 3, (end + 7) >> 3
        chunk = int.from_bytes(self._data[first:last], "big")
        self._pos = end
        return (chunk >> (8 * last - end)) & ((1 << n) - 1)

    def _leading_zeros(self) -> int:
        pos, zeros = self._pos, 0
        while pos < self._size:
            offset = pos & 7
            rest = (self._data[pos >> 3] << offset) & 0xFF
            if rest:
                return zeros + 8 - rest.bit_length()
            zeros += 8 - offset
            pos += 8 - offset
            if zeros > 32:
                raise BitstreamError(f"exp-golomb prefix too long ({zeros} zeros)")
        raise BitstreamError("bitstream exhausted")

    def ue_read(self) -> int:
        zeros = self._leading_zeros()
        if zeros > 32:
            raise BitstreamError(f"exp-golomb prefix too long ({zeros} zeros)")
        return self.read_bits(2 * zeros + 1) - 1

    def se_read(self) -> int:
        k = self.ue_read()
        return (k + 1) // 2 if k % 2 else -(k // 2)


__all__ = ["UE_LIMIT", "ue_length", "se_map", "BitSink", "BitSource"]
