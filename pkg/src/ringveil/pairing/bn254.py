"""BN254 (mcl ``Fp254BNb``) suite, bound directly to the mcl shared library.

The ``mclbn256`` wheel ships and initialises the library; its Python wrapper
classes are bypassed because they randomise on construction and mis-convert
scalars.  Only the C entry points are used here.
"""

from __future__ import annotations

import ctypes

from mclbn256 import mclbn256 as _mcl

from ringveil.errors import SubgroupCheckFailed
from ringveil.pairing.core import GroupOps, PairingSuite

_lib = _mcl.lib

_Fr = ctypes.c_uint64 * 4
_G1 = ctypes.c_uint64 * 12
_G2 = ctypes.c_uint64 * 24
_GT = ctypes.c_uint64 * 48

Q_ORDER = 0x2523648240000001BA344D8000000007FF9F800000000010A10000000000000D

# standard generators of Fp254BNb, compressed
_G1_GEN = bytes.fromhex("12000000000000a7130000000000216108000000804d34ba01000040826423a5")
_G2_GEN = bytes.fromhex(
    "2bfb03c82442ee910dbf9848bb8b64a4b6ed618c7e8c8deb2fb69e51bb101a06"
    "f34cd5e7c1348c0db78437ae6b744d1f5baa82598ca70a31337873baf9aa1605"
)


def _fr(k: int):
    f = _Fr()
    if _lib.mclBnFr_deserialize(f, k.to_bytes(32, "little"), 32) != 32:
        raise ValueError("scalar out of range for mcl Fr")
    return f


class _MclPointOps(GroupOps):
    def __init__(self, name: str, ctype, prefix: str, size: int) -> None:
        self.name = name
        self.size = size
        self._t = ctype
        f = lambda op: getattr(_lib, f"mclBn{prefix}_{op}")  # noqa: E731
        self._add = f("add")
        self._neg = f("neg")
        self._mul = f("mul")
        self._is_equal = f("isEqual")
        self._is_zero = f("isZero")
        self._serialize = f("serialize")
        self._deserialize = f("deserialize")
        self._is_valid = f("isValid")
        self._is_valid_order = f("isValidOrder")
        self._hash = f("hashAndMapTo")

    def add(self, a, b):
        z = self._t()
        self._add(z, a, b)
        return z

    def neg(self, a):
        z = self._t()
        self._neg(z, a)
        return z

    def mul(self, a, k):
        z = self._t()
        self._mul(z, a, _fr(k))
        return z

    def eq(self, a, b):
        return bool(self._is_equal(a, b))

    def identity(self):
        return self._t()

    def is_identity(self, a):
        return bool(self._is_zero(a))

    def encode(self, a):
        buf = ctypes.create_string_buffer(self.size)
        n = self._serialize(buf, self.size, a)
        if n != self.size:
            raise RuntimeError(f"{self.name}: mcl serialize returned {n}")
        return buf.raw

    def decode(self, data):
        z = self._t()
        if self._deserialize(z, data, len(data)) != self.size:
            raise SubgroupCheckFailed(f"{self.name}: not a curve point")
        if not self._is_zero(z) and not (self._is_valid(z) and self._is_valid_order(z)):
            raise SubgroupCheckFailed(f"{self.name}: point not in prime-order subgroup")
        return z

    def hash(self, data):
        z = self._t()
        if self._hash(z, data, len(data)) != 0:
            raise RuntimeError(f"{self.name}: mcl hashAndMapTo failed")
        return z


class _MclGTOps(GroupOps):
    name = "GT"
    size = 384

    def add(self, a, b):
        z = _GT()
        _lib.mclBnGT_mul(z, a, b)
        return z

    def neg(self, a):
        z = _GT()
        _lib.mclBnGT_inv(z, a)
        return z

    def mul(self, a, k):
        z = _GT()
        _lib.mclBnGT_pow(z, a, _fr(k))
        return z

    def eq(self, a, b):
        return bool(_lib.mclBnGT_isEqual(a, b))

    def identity(self):
        z = _GT()
        _lib.mclBnGT_setInt(z, 1)
        return z

    def is_identity(self, a):
        return bool(_lib.mclBnGT_isOne(a))

    def encode(self, a):
        buf = ctypes.create_string_buffer(self.size)
        if _lib.mclBnGT_serialize(buf, self.size, a) != self.size:
            raise RuntimeError("GT: mcl serialize failed")
        return buf.raw

    def decode(self, data):
        z = _GT()
        if _lib.mclBnGT_deserialize(z, data, len(data)) != self.size:
            raise SubgroupCheckFailed("GT: not an Fp12 element")
        # z in the order-q subgroup  <=>  z^(q-1) * z == 1
        t = _GT()
        _lib.mclBnGT_pow(t, z, _fr(Q_ORDER - 1))
        _lib.mclBnGT_mul(t, t, z)
        if not _lib.mclBnGT_isOne(t) or _lib.mclBnGT_isZero(z):
            raise SubgroupCheckFailed("GT: element not in order-q subgroup")
        return z

    def hash(self, data):
        raise NotImplementedError("no hash into GT")


class Bn254(PairingSuite):
    suite_id = "bn254"
    wire_id = 2
    security_bits = 100
    q = Q_ORDER
    g1 = _MclPointOps("G1", _G1, "G1", 32)
    g2 = _MclPointOps("G2", _G2, "G2", 64)
    gt = _MclGTOps()

    def _gen1(self):
        return self.g1.decode(_G1_GEN)

    def _gen2(self):
        return self.g2.decode(_G2_GEN)

    def _pair(self, a, b):
        z = _GT()
        _lib.mclBn_pairing(z, a, b)
        return z
