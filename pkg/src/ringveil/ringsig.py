"""Identity-based ring signatures with batch verification.

A signature holds one G1 commitment per ring member plus a single G1 point.
Each commitment is hashed with the payload and the ordered ring into a scalar
that weights that member's pseudonym; verification compares two pairings.

Batch verification sums both sides over many signatures so the pairing cost
stays at two regardless of batch or ring size.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from typing import Sequence

from ringveil.codec import Writer
from ringveil.errors import (
    DuplicateMember,
    EmptyBatch,
    IndexOutOfRange,
    LengthMismatch,
    SignerMismatch,
)
from ringveil.pairing import DST_RINGSIG, G1Elem, G2Elem, GTElem, random_scalar, scalar_hasher

SCALING_BITS = 80


@dataclass(frozen=True)
class SignedPayload:
    m: bytes
    tag: GTElem
    t: int

    def __post_init__(self) -> None:
        if not 0 <= self.t < 1 << 64:
            raise ValueError("timestamp must fit in an unsigned 64-bit integer")

    def encode(self) -> bytes:
        return Writer().blob(self.m).elem(self.tag).u64(self.t).getvalue()


@dataclass(frozen=True)
class SubRing:
    members: tuple[G1Elem, ...]

    def __init__(self, members: Sequence[G1Elem]) -> None:
        members = tuple(members)
        if not members:
            raise ValueError("a ring needs at least one member")
        if len(members) >= 1 << 16:
            raise ValueError("ring too large")
        if len({bytes(p) for p in members}) != len(members):
            raise DuplicateMember("ring members must be distinct")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i: int) -> G1Elem:
        return self.members[i]

    def index(self, pid: G1Elem) -> int:
        return self.members.index(pid)

    def encode(self) -> bytes:
        return Writer().g1_list(self.members).getvalue()


@dataclass(frozen=True)
class RingSignature:
    u_list: tuple[G1Elem, ...]
    v: G1Elem

    def __post_init__(self) -> None:
        object.__setattr__(self, "u_list", tuple(self.u_list))

    def __len__(self) -> int:
        return len(self.u_list)

    def encode(self) -> bytes:
        """u16 count, the commitments, then the final point."""
        return Writer().g1_list(self.u_list).elem(self.v).getvalue()


def _hasher(payload: SignedPayload, ring: SubRing):
    # payload and ring encodings are self-delimiting, commitments are fixed width
    return scalar_hasher(ring[0].suite, DST_RINGSIG, payload.encode() + ring.encode())


def ring_sign(
    pk2: G2Elem,
    psk_k: G1Elem,
    k: int,
    payload: SignedPayload,
    ring: SubRing,
    rng=None,
) -> RingSignature:
    """Sign ``payload`` as member ``k`` of ``ring`` using private key ``psk_k``."""
    n = len(ring)
    if not 0 <= k < n:
        raise IndexOutOfRange(f"signer index {k} outside ring of size {n}")
    suite = psk_k.suite
    if suite.pair(psk_k, suite.Q) != suite.pair(ring[k], pk2):
        raise SignerMismatch("private key does not belong to ring member k")
    rng = rng or secrets.SystemRandom()
    h = _hasher(payload, ring)

    u: list[G1Elem | None] = [None] * n
    acc = suite.g1_identity()
    for i, pid in enumerate(ring):
        if i == k:
            continue
        u_i = random_scalar(suite, rng) * suite.P
        u[i] = u_i
        acc = acc + u_i + h(bytes(u_i)) * pid
    r = random_scalar(suite, rng)
    u_k = r * ring[k] - acc
    u[k] = u_k
    v = (h(bytes(u_k)) + r) * psk_k
    return RingSignature(tuple(u), v)  # type: ignore[arg-type]


def _lhs_sum(payload: SignedPayload, ring: SubRing, sig: RingSignature) -> G1Elem:
    if len(sig.u_list) != len(ring):
        raise LengthMismatch(f"{len(sig.u_list)} U values for a ring of {len(ring)}")
    h = _hasher(payload, ring)
    acc = ring[0].suite.g1_identity()
    for u_i, pid in zip(sig.u_list, ring):
        acc = acc + u_i + h(bytes(u_i)) * pid
    return acc


def ring_verify(pk2: G2Elem, payload: SignedPayload, ring: SubRing, sig: RingSignature) -> bool:
    suite = pk2.suite
    lhs = _lhs_sum(payload, ring, sig)
    return suite.pair(lhs, pk2) == suite.pair(sig.v, suite.Q)


def _check_batch(payloads, rings, sigs) -> None:
    if not (len(payloads) == len(rings) == len(sigs)):
        raise LengthMismatch("payloads, rings and signatures differ in length")
    if not payloads:
        raise EmptyBatch("batch is empty")


def _scalings(n: int, rng) -> list[int]:
    rng = rng or secrets.SystemRandom()
    return [rng.randrange(1, 1 << SCALING_BITS) for _ in range(n)]


def _batch_equation(pk2: G2Elem, lhs: Sequence[G1Elem], vs: Sequence[G1Elem], deltas=None) -> bool:
    suite = pk2.suite
    a = suite.g1_identity()
    b = suite.g1_identity()
    if deltas is None:
        for s, v in zip(lhs, vs):
            a = a + s
            b = b + v
    else:
        for s, v, d in zip(lhs, vs, deltas):
            a = a + d * s
            b = b + d * v
    return suite.pair(a, pk2) == suite.pair(b, suite.Q)


def _aggregate_check(pk2: G2Elem, payloads, rings, sigs, deltas=None) -> bool:
    """Both sides of the batch equation, folding hash coefficients per distinct PID.

    Rings drawn from the same RSU list overlap heavily, so each pseudonym is
    multiplied once per batch instead of once per signature.
    """
    suite = pk2.suite
    u_acc = suite.g1_identity()
    v_acc = suite.g1_identity()
    coeff: dict[G1Elem, int] = {}
    for j, (payload, ring, sig) in enumerate(zip(payloads, rings, sigs)):
        if len(sig.u_list) != len(ring):
            raise LengthMismatch(f"{len(sig.u_list)} U values for a ring of {len(ring)}")
        d = 1 if deltas is None else deltas[j]
        h = _hasher(payload, ring)
        su = suite.g1_identity()
        for u_i, pid in zip(sig.u_list, ring):
            su = su + u_i
            coeff[pid] = coeff.get(pid, 0) + d * h(bytes(u_i))
        u_acc = u_acc + (su if d == 1 else d * su)
        v_acc = v_acc + (sig.v if d == 1 else d * sig.v)
    for pid, c in coeff.items():
        u_acc = u_acc + c * pid
    return suite.pair(u_acc, pk2) == suite.pair(v_acc, suite.Q)


def batch_verify(pk2: G2Elem, payloads, rings, sigs) -> bool:
    """Plain aggregated check; two pairings for the whole batch.

    Accepts crafted sets whose individual errors cancel in the sum; use
    :func:`random_scaling_batch_verify` on untrusted input.
    """
    _check_batch(payloads, rings, sigs)
    return _aggregate_check(pk2, payloads, rings, sigs)


def random_scaling_batch_verify(pk2: G2Elem, payloads, rings, sigs, rng=None) -> bool:
    """Batch check with an independent 80-bit multiplier per signature."""
    _check_batch(payloads, rings, sigs)
    return _aggregate_check(pk2, payloads, rings, sigs, _scalings(len(sigs), rng))


def find_invalid(pk2: G2Elem, payloads, rings, sigs, rng=None, hardened: bool = True) -> list[int]:
    """Indices of invalid signatures, found by recursive halving.

    A sub-batch that verifies is not split further.  Each signature's hash
    sum is computed once and reused at every level.
    """
    _check_batch(payloads, rings, sigs)
    lhs = [_lhs_sum(p, r, s) for p, r, s in zip(payloads, rings, sigs)]
    vs = [s.v for s in sigs]
    bad: list[int] = []

    def check(idx: list[int]) -> bool:
        deltas = _scalings(len(idx), rng) if hardened else None
        return _batch_equation(pk2, [lhs[i] for i in idx], [vs[i] for i in idx], deltas)

    def split(idx: list[int]) -> None:
        if check(idx):
            return
        if len(idx) == 1:
            bad.append(idx[0])
            return
        mid = len(idx) // 2
        split(idx[:mid])
        split(idx[mid:])

    split(list(range(len(sigs))))
    return bad
