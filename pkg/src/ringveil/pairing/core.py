"""Pairing-group abstraction used by every protocol module.

Group elements are immutable wrappers around a backend object.  G1 and G2 are
written additively (``a + b``, ``k * a``), GT multiplicatively (``x * y``,
``x ** k``), matching the usual pairing-based notation.  Scalars are plain
Python ints reduced mod the group order ``q``.
"""

from __future__ import annotations

import contextlib
import hashlib
import secrets
import threading
from typing import Any, Callable, Iterator

from ringveil.errors import SubgroupCheckFailed, ZeroScalar

# Domain-separation tags, one per hash usage.
DST_PID = b"RINGVEIL-V1-H1-PID"
DST_RID = b"RINGVEIL-V1-H2-RID"
DST_TAG = b"RINGVEIL-V1-H1-TAG"
DST_RINGSIG = b"RINGVEIL-V1-H-RINGSIG"
DST_IBE = b"RINGVEIL-V1-IBE"

HASH_CONFIG_ID = "ringveil-v1/shake256-wide/backend-map"


class GroupOps:
    """Raw per-group operations a backend must provide."""

    name: str
    size: int  # fixed encoded length in bytes

    def add(self, a: Any, b: Any) -> Any: raise NotImplementedError
    def neg(self, a: Any) -> Any: raise NotImplementedError
    def mul(self, a: Any, k: int) -> Any: raise NotImplementedError
    def eq(self, a: Any, b: Any) -> bool: raise NotImplementedError
    def identity(self) -> Any: raise NotImplementedError
    def is_identity(self, a: Any) -> bool: raise NotImplementedError
    def encode(self, a: Any) -> bytes: raise NotImplementedError
    def decode(self, data: bytes) -> Any: raise NotImplementedError
    def hash(self, data: bytes) -> Any: raise NotImplementedError


class PairingSuite:
    """A Type-3 pairing ``G1 x G2 -> GT`` of prime order ``q``.

    Subclasses fill in ``q``, the three :class:`GroupOps` tables, the raw
    generators and :meth:`_pair`.
    """

    suite_id: str
    wire_id: int
    security_bits: int
    symmetric = False
    q: int
    g1: GroupOps
    g2: GroupOps
    gt: GroupOps

    def __init__(self) -> None:
        self._count_lock = threading.Lock()
        self.pairing_count = 0
        self.P = G1Elem(self, self._gen1())
        self.Q = G2Elem(self, self._gen2())

    def __repr__(self) -> str:
        return f"<PairingSuite {self.suite_id}>"

    # backend hooks
    def _gen1(self) -> Any: raise NotImplementedError
    def _gen2(self) -> Any: raise NotImplementedError
    def _pair(self, a: Any, b: Any) -> Any: raise NotImplementedError

    @property
    def scalar_size(self) -> int:
        return (self.q.bit_length() + 7) // 8

    # constructors
    def g1_identity(self) -> G1Elem:
        return G1Elem(self, self.g1.identity())

    def g2_identity(self) -> G2Elem:
        return G2Elem(self, self.g2.identity())

    def gt_one(self) -> GTElem:
        return GTElem(self, self.gt.identity())

    def pair(self, a: G1Elem, b: G2Elem) -> GTElem:
        if a.suite is not self or b.suite is not self:
            raise ValueError("elements belong to a different suite")
        with self._count_lock:
            self.pairing_count += 1
        return GTElem(self, self._pair(a.raw, b.raw))

    def decode_g1(self, data: bytes) -> G1Elem:
        return G1Elem(self, _checked_decode(self.g1, data))

    def decode_g2(self, data: bytes) -> G2Elem:
        return G2Elem(self, _checked_decode(self.g2, data))

    def decode_gt(self, data: bytes) -> GTElem:
        return GTElem(self, _checked_decode(self.gt, data))


def _checked_decode(ops: GroupOps, data: bytes) -> Any:
    data = bytes(data)
    if len(data) != ops.size:
        raise SubgroupCheckFailed(f"{ops.name}: expected {ops.size} bytes, got {len(data)}")
    raw = ops.decode(data)
    # rejects non-canonical encodings that the backend would silently normalise
    if ops.encode(raw) != data:
        raise SubgroupCheckFailed(f"{ops.name}: non-canonical encoding")
    return raw


class _Elem:
    __slots__ = ("suite", "raw")
    _group = ""

    def __init__(self, suite: PairingSuite, raw: Any) -> None:
        self.suite = suite
        self.raw = raw

    @property
    def _ops(self) -> GroupOps:
        return getattr(self.suite, self._group)

    def _wrap(self, raw: Any):
        return type(self)(self.suite, raw)

    def _check(self, other: Any) -> None:
        if type(other) is not type(self) or other.suite is not self.suite:
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self) or other.suite is not self.suite:  # type: ignore[attr-defined]
            return NotImplemented
        return self._ops.eq(self.raw, other.raw)  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((self._group, bytes(self)))

    def __bytes__(self) -> bytes:
        return self._ops.encode(self.raw)

    def to_bytes(self) -> bytes:
        return bytes(self)

    def is_identity(self) -> bool:
        return self._ops.is_identity(self.raw)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({bytes(self)[:8].hex()}..)"


class _AdditiveElem(_Elem):
    __slots__ = ()

    def __add__(self, other):
        self._check(other)
        return self._wrap(self._ops.add(self.raw, other.raw))

    def __sub__(self, other):
        self._check(other)
        return self._wrap(self._ops.add(self.raw, self._ops.neg(other.raw)))

    def __neg__(self):
        return self._wrap(self._ops.neg(self.raw))

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return self._wrap(self._ops.mul(self.raw, k % self.suite.q))

    __rmul__ = __mul__


class G1Elem(_AdditiveElem):
    __slots__ = ()
    _group = "g1"


class G2Elem(_AdditiveElem):
    __slots__ = ()
    _group = "g2"


class GTElem(_Elem):
    __slots__ = ()
    _group = "gt"

    def __mul__(self, other: GTElem) -> GTElem:
        self._check(other)
        return self._wrap(self._ops.add(self.raw, other.raw))

    def __pow__(self, k: int) -> GTElem:
        return self._wrap(self._ops.mul(self.raw, k % self.suite.q))

    def inverse(self) -> GTElem:
        return self._wrap(self._ops.neg(self.raw))

    def __truediv__(self, other: GTElem) -> GTElem:
        return self * other.inverse()


# --- hashing ---------------------------------------------------------------

def _dst_header(dst: bytes) -> bytes:
    if not 0 < len(dst) < 256:
        raise ValueError("DST must be 1..255 bytes")
    return len(dst).to_bytes(1, "big") + dst


def _hash_to_group(ops: GroupOps, data: bytes, dst: bytes) -> Any:
    msg = _dst_header(dst) + bytes(data)
    raw = ops.hash(msg)
    ctr = 0
    while ops.is_identity(raw):  # practically unreachable; re-derive rather than return O
        ctr += 1
        raw = ops.hash(msg + b"\xff" + ctr.to_bytes(4, "big"))
    return raw


def hash_to_g1(suite: PairingSuite, data: bytes, dst: bytes = DST_PID) -> G1Elem:
    return G1Elem(suite, _hash_to_group(suite.g1, data, dst))


def hash_to_g2(suite: PairingSuite, data: bytes, dst: bytes = DST_RID) -> G2Elem:
    return G2Elem(suite, _hash_to_group(suite.g2, data, dst))


def _wide_len(q: int) -> int:
    return (q.bit_length() + 128 + 7) // 8


def scalar_hasher(suite: PairingSuite, dst: bytes, prefix: bytes = b"") -> Callable[[bytes], int]:
    """Return ``f(suffix) = hash_to_scalar(prefix || suffix)`` with the prefix absorbed once."""
    base = hashlib.shake_256(_dst_header(dst))
    base.update(prefix)
    n = _wide_len(suite.q)
    q1 = suite.q - 1

    def h(suffix: bytes) -> int:
        st = base.copy()
        st.update(suffix)
        return int.from_bytes(st.digest(n), "big") % q1 + 1

    return h


def hash_to_scalar(suite: PairingSuite, data: bytes, dst: bytes = DST_RINGSIG) -> int:
    """Hash into ``[1, q-1]`` by wide reduction (bias below 2**-128)."""
    return scalar_hasher(suite, dst)(bytes(data))


# --- scalars ---------------------------------------------------------------

def scalar_inverse(suite: PairingSuite, s: int) -> int:
    s %= suite.q
    if s == 0:
        raise ZeroScalar("0 has no inverse mod q")
    return pow(s, -1, suite.q)


def random_scalar(suite: PairingSuite, rng=None) -> int:
    """Uniform draw from Z_q^*.  ``rng`` needs ``randrange``; default is the OS CSPRNG."""
    rng = rng or secrets.SystemRandom()
    return rng.randrange(1, suite.q)


def scalar_to_bytes(suite: PairingSuite, s: int) -> bytes:
    if not 0 <= s < suite.q:
        raise ValueError("scalar out of range")
    return s.to_bytes(suite.scalar_size, "big")


def scalar_from_bytes(suite: PairingSuite, data: bytes) -> int:
    if len(data) != suite.scalar_size:
        raise ValueError("bad scalar length")
    s = int.from_bytes(data, "big")
    if s >= suite.q:
        raise ValueError("scalar not reduced mod q")
    return s


def gt_exp(base: GTElem, e: int) -> GTElem:
    return base ** e


# --- instrumentation ---------------------------------------------------------

class PairingCounter:
    def __init__(self, suite: PairingSuite) -> None:
        self.suite = suite
        self.start = suite.pairing_count
        self.end: int | None = None

    @property
    def count(self) -> int:
        end = self.suite.pairing_count if self.end is None else self.end
        return end - self.start


@contextlib.contextmanager
def count_pairings(suite: PairingSuite) -> Iterator[PairingCounter]:
    """Count pairings evaluated on ``suite`` inside the block.

    The count is process-wide for the suite, so concurrent work on the same
    suite is included.
    """
    c = PairingCounter(suite)
    try:
        yield c
    finally:
        c.end = suite.pairing_count
