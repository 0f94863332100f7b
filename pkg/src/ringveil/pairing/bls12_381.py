"""BLS12-381 suite backed by RELIC (through petrelic)."""

from __future__ import annotations

from petrelic.multiplicative.pairing import G1, G2, GT, G1Element, G2Element, GTElement

from ringveil.errors import SubgroupCheckFailed
from ringveil.pairing.core import GroupOps, PairingSuite

# base field modulus; used to screen inputs before they reach RELIC, which
# prints diagnostics to the C stdout on malformed encodings
_P = 0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB
_FP = 48


def _is_square(a: int) -> bool:
    return a == 0 or pow(a, (_P - 1) // 2, _P) == 1


def _fp_chunks(data: bytes) -> list[int] | None:
    xs = [int.from_bytes(data[i:i + _FP], "big") for i in range(0, len(data), _FP)]
    return xs if all(x < _P for x in xs) else None


def _g1_x_ok(body: bytes) -> bool:
    xs = _fp_chunks(body)
    return xs is not None and _is_square((pow(xs[0], 3, _P) + 4) % _P)


def _g2_x_ok(body: bytes) -> bool:
    xs = _fp_chunks(body)
    if xs is None:
        return False
    x0, x1 = xs
    # x^3 over Fp2 = Fp[u]/(u^2+1), plus b' = 4(1+u)
    s0, s1 = (x0 * x0 - x1 * x1) % _P, (2 * x0 * x1) % _P
    c0, c1 = (s0 * x0 - s1 * x1 + 4) % _P, (s0 * x1 + s1 * x0 + 4) % _P
    # a is a square in Fp2 iff its norm is a square in Fp
    return _is_square((c0 * c0 + c1 * c1) % _P)


class _RelicPointOps(GroupOps):
    def __init__(self, name: str, group, elem_cls, size: int, x_ok) -> None:
        self.name = name
        self._x_ok = x_ok
        self.size = size
        self._group = group
        self._cls = elem_cls
        self._zero = bytes(size)

    def add(self, a, b):
        return a * b

    def neg(self, a):
        return a.inverse()

    def mul(self, a, k):
        return a ** k

    def eq(self, a, b):
        return a == b

    def identity(self):
        return self._group.neutral_element()

    def is_identity(self, a):
        return a.is_neutral_element()

    def encode(self, a):
        if a.is_neutral_element():
            return self._zero
        return a.to_binary()

    def decode(self, data):
        if data == self._zero:
            return self._group.neutral_element()
        if data[0] not in (2, 3):
            raise SubgroupCheckFailed(f"{self.name}: bad compression flag")
        if not self._x_ok(data[1:]):
            raise SubgroupCheckFailed(f"{self.name}: x is not on the curve")
        try:
            a = self._cls.from_binary(data)
        except Exception as exc:  # RELIC reports malformed input as a generic error
            raise SubgroupCheckFailed(f"{self.name}: {exc}") from None
        # RELIC's validity test includes the order-q subgroup check
        if not a.is_valid():
            raise SubgroupCheckFailed(f"{self.name}: point not in prime-order subgroup")
        return a

    def hash(self, data):
        return self._group.hash_to_point(data)


class _RelicGTOps(GroupOps):
    name = "GT"
    size = 384

    def add(self, a, b):
        return a * b

    def neg(self, a):
        return a.inverse()

    def mul(self, a, k):
        return a ** k

    def eq(self, a, b):
        return a == b

    def identity(self):
        return GT.neutral_element()

    def is_identity(self, a):
        return a.is_neutral_element()

    def encode(self, a):
        return a.to_binary()

    def decode(self, data):
        if _fp_chunks(data) is None:
            raise SubgroupCheckFailed("GT: field element not reduced")
        try:
            a = GTElement.from_binary(data)
        except Exception as exc:
            raise SubgroupCheckFailed(f"GT: {exc}") from None
        if not a.is_valid():
            raise SubgroupCheckFailed("GT: element not in order-q subgroup")
        return a

    def hash(self, data):
        raise NotImplementedError("no hash into GT")


class Bls12381(PairingSuite):
    suite_id = "bls12-381"
    wire_id = 1
    security_bits = 128
    q = int(G1.order())
    g1 = _RelicPointOps("G1", G1, G1Element, 49, _g1_x_ok)
    g2 = _RelicPointOps("G2", G2, G2Element, 97, _g2_x_ok)
    gt = _RelicGTOps()

    def _gen1(self):
        return G1.generator()

    def _gen2(self):
        return G2.generator()

    def _pair(self, a, b):
        return a.pair(b)
