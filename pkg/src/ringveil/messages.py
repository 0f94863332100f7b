"""Values exchanged between protocol entities."""

from __future__ import annotations

from dataclasses import dataclass

from ringveil.codec import Reader, Writer
from ringveil.errors import MalformedField
from ringveil.ibc import IbeCiphertext
from ringveil.pairing import G1Elem, GTElem, PairingSuite
from ringveil.ringsig import RingSignature, SignedPayload, SubRing
from ringveil.symmetric import MacTag


@dataclass(frozen=True)
class BroadcastMsg:
    """A signed safety message as sent between vehicles."""

    m: bytes
    sig: RingSignature
    ring: SubRing
    t: int
    tag: GTElem

    def __post_init__(self) -> None:
        if len(self.sig) != len(self.ring):
            raise ValueError("signature and ring sizes differ")

    @property
    def payload(self) -> SignedPayload:
        return SignedPayload(self.m, self.tag, self.t)


@dataclass(frozen=True)
class RingRequest:
    """Pseudonym encrypted to the RSU identity, plus the leaf path under the channel key."""

    c1: IbeCiphertext
    c2: bytes


@dataclass(frozen=True)
class RingGrant:
    """Encrypted ring list, its MAC and its expiry, as returned by an RSU."""

    ciphertext: bytes
    mac: MacTag
    expiry: int

    def mac_input(self) -> bytes:
        return grant_mac_input(self.ciphertext, self.expiry)


@dataclass(frozen=True)
class RingListGrant:
    """A decrypted, authenticated ring list with its expiry."""

    members: tuple[G1Elem, ...]
    expiry: int

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("ring list is empty")


@dataclass(frozen=True)
class VehiclePublicRecord:
    """Registry entry the TRC shares with RSUs: pseudonym and its leaf."""

    pid: G1Elem
    leaf: int


def grant_mac_input(ciphertext: bytes, expiry: int) -> bytes:
    """Ciphertext followed by the u64 expiry: the bytes the grant MAC covers."""
    return bytes(ciphertext) + expiry.to_bytes(8, "big")


def encode_path(node_ids) -> bytes:
    w = Writer().u16(len(node_ids))
    for x in node_ids:
        w.u64(x)
    return w.getvalue()


def decode_path(data: bytes) -> tuple[int, ...]:
    r = Reader(data)
    n = r.u16()
    out = tuple(r.u64() for _ in range(n))
    r.finish()
    return out


def encode_member_list(members) -> bytes:
    return Writer().g1_list(members).getvalue()


def decode_member_list(suite: PairingSuite, data: bytes) -> tuple[G1Elem, ...]:
    r = Reader(data, suite)
    out = tuple(r.g1_list())
    r.finish()
    if len({bytes(p) for p in out}) != len(out):
        raise MalformedField("duplicate pseudonym in ring list")
    return out
