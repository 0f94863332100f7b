"""Big-endian framing primitives shared by the hash inputs and the wire format."""

from __future__ import annotations

import struct

from ringveil.errors import MalformedField, SubgroupCheckFailed, TrailingBytes, TruncatedFrame, WireSubgroupCheckFailed
from ringveil.pairing import G1Elem, G2Elem, GTElem, PairingSuite


class Writer:
    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def raw(self, b: bytes) -> Writer:
        self._parts.append(bytes(b))
        return self

    def u8(self, v: int) -> Writer:
        return self.raw(struct.pack(">B", v))

    def u16(self, v: int) -> Writer:
        return self.raw(struct.pack(">H", v))

    def u32(self, v: int) -> Writer:
        return self.raw(struct.pack(">I", v))

    def u64(self, v: int) -> Writer:
        return self.raw(struct.pack(">Q", v))

    def blob(self, b: bytes) -> Writer:
        """u32 length prefix + bytes."""
        return self.u32(len(b)).raw(b)

    def short_blob(self, b: bytes) -> Writer:
        return self.u16(len(b)).raw(b)

    def elem(self, e: G1Elem | G2Elem | GTElem) -> Writer:
        return self.raw(bytes(e))

    def g1_list(self, pts) -> Writer:
        self.u16(len(pts))
        for p in pts:
            self.elem(p)
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    def __init__(self, data: bytes, suite: PairingSuite | None = None) -> None:
        self._b = memoryview(bytes(data))
        self._pos = 0
        self.suite = suite

    @property
    def remaining(self) -> int:
        return len(self._b) - self._pos

    def take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._b):
            raise TruncatedFrame(f"need {n} bytes at offset {self._pos}, have {self.remaining}")
        out = self._b[self._pos:self._pos + n].tobytes()
        self._pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self.take(8))[0]

    def blob(self) -> bytes:
        return self.take(self.u32())

    def short_blob(self) -> bytes:
        return self.take(self.u16())

    def _suite(self) -> PairingSuite:
        if self.suite is None:
            raise MalformedField("group element read without a pairing suite")
        return self.suite

    def g1(self) -> G1Elem:
        s = self._suite()
        return _decode(s.decode_g1, self.take(s.g1.size))

    def g2(self) -> G2Elem:
        s = self._suite()
        return _decode(s.decode_g2, self.take(s.g2.size))

    def gt(self) -> GTElem:
        s = self._suite()
        return _decode(s.decode_gt, self.take(s.gt.size))

    def g1_list(self) -> list[G1Elem]:
        n = self.u16()
        return [self.g1() for _ in range(n)]

    def finish(self) -> None:
        if self.remaining:
            raise TrailingBytes(f"{self.remaining} unexpected trailing bytes")


def _decode(fn, data: bytes):
    try:
        return fn(data)
    except SubgroupCheckFailed as exc:
        raise WireSubgroupCheckFailed(str(exc)) from None
