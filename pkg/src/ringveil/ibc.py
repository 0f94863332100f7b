"""Identity-based keys, pseudonym transport encryption and key agreement.

A vehicle's pseudonym is its identity hashed into G1 and its private key is
the pseudonym times the master secret.  RSU keys are built the same way in G2.
Pairing a private key with the other party's public key gives both sides the
same channel secret without any message exchange.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ringveil.errors import DuplicateIdentity, InvalidPid, MalformedCiphertext, SubgroupCheckFailed
from ringveil.pairing import (
    DST_IBE,
    DST_PID,
    DST_RID,
    HASH_CONFIG_ID,
    G1Elem,
    G2Elem,
    GTElem,
    PairingSuite,
    hash_to_g1,
    hash_to_g2,
    random_scalar,
)
from ringveil.revocation import RevocationTree, path
from ringveil.symmetric import kdf


@dataclass(frozen=True)
class SystemParams:
    """Public parameters: the suite, the master public key in G1 and G2, and the tracing key."""

    suite: PairingSuite
    pk1: G1Elem
    pk2: G2Elem
    pk_trac: G2Elem
    hash_config: str = HASH_CONFIG_ID

    @property
    def P(self) -> G1Elem:
        return self.suite.P

    @property
    def Q(self) -> G2Elem:
        return self.suite.Q

    def is_consistent(self) -> bool:
        s = self.suite
        return s.pair(self.pk1, s.Q) == s.pair(s.P, self.pk2)


@dataclass(frozen=True)
class MasterSecret:
    suite: PairingSuite
    s: int = field(repr=False)

    def __post_init__(self) -> None:
        if not 0 < self.s < self.suite.q:
            raise ValueError("master secret must lie in Z_q^*")

    @classmethod
    def generate(cls, suite: PairingSuite, rng=None) -> MasterSecret:
        return cls(suite, random_scalar(suite, rng))

    @property
    def pk1(self) -> G1Elem:
        return self.s * self.suite.P

    @property
    def pk2(self) -> G2Elem:
        return self.s * self.suite.Q


@dataclass(frozen=True)
class VehicleCredential:
    vid: bytes = field(repr=False)
    pid: G1Elem
    psk: G1Elem = field(repr=False)
    leaf_path: tuple[int, ...]

    def is_consistent(self, pp: SystemParams) -> bool:
        """Check the private key against the pseudonym using public values only."""
        s = pp.suite
        return (
            self.pid == pseudonym(s, self.vid)
            and s.pair(self.psk, s.Q) == s.pair(self.pid, pp.pk2)
        )


@dataclass(frozen=True)
class RsuCredential:
    region_id: bytes
    rid: G2Elem
    rsk: G2Elem = field(repr=False)

    def is_consistent(self, pp: SystemParams) -> bool:
        s = pp.suite
        return self.rid == region_key(s, self.region_id) and s.pair(s.P, self.rsk) == s.pair(pp.pk1, self.rid)


def pseudonym(suite: PairingSuite, vid: bytes) -> G1Elem:
    return hash_to_g1(suite, vid, DST_PID)


def region_key(suite: PairingSuite, region_id: bytes) -> G2Elem:
    return hash_to_g2(suite, region_id, DST_RID)


def issue_vehicle(ms: MasterSecret, vid: bytes, bt: RevocationTree) -> VehicleCredential:
    """Derive a vehicle's keys and place its pseudonym on a free leaf of ``bt``."""
    pid = pseudonym(ms.suite, vid)
    if pid in bt:
        raise DuplicateIdentity("identity already registered")
    leaf = bt.assign(pid)
    return VehicleCredential(vid=bytes(vid), pid=pid, psk=ms.s * pid, leaf_path=tuple(path(bt, leaf)))


def issue_rsu(ms: MasterSecret, region_id: bytes) -> RsuCredential:
    rid = region_key(ms.suite, region_id)
    return RsuCredential(region_id=bytes(region_id), rid=rid, rsk=ms.s * rid)


# --- pseudonym transport (identity-based encryption of one G1 point) -------

@dataclass(frozen=True)
class IbeCiphertext:
    u: G1Elem
    v: bytes

    def encode(self) -> bytes:
        return bytes(self.u) + self.v

    @classmethod
    def decode(cls, suite: PairingSuite, data: bytes) -> IbeCiphertext:
        n = suite.g1.size
        if len(data) != 2 * n:
            raise MalformedCiphertext(f"IBE ciphertext must be {2 * n} bytes")
        try:
            u = suite.decode_g1(data[:n])
        except SubgroupCheckFailed as exc:
            raise MalformedCiphertext(str(exc)) from None
        return cls(u, bytes(data[n:]))


def _mask(secret: GTElem, n: int) -> bytes:
    return kdf(secret, DST_IBE, n)


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def ibe_encrypt(pk1: G1Elem, rid: G2Elem, pid: G1Elem, rng=None) -> IbeCiphertext:
    """Encrypt ``pid`` to the RSU identity ``rid`` with a fresh ephemeral scalar."""
    suite = pk1.suite
    r = random_scalar(suite, rng)
    g_r = suite.pair(pk1, rid) ** r
    body = bytes(pid)
    return IbeCiphertext(u=r * suite.P, v=_xor(body, _mask(g_r, len(body))))


def ibe_decrypt(rsk: G2Elem, ct: IbeCiphertext) -> G1Elem:
    """Recover the pseudonym.  The caller still has to check it is registered."""
    suite = rsk.suite
    if ct.u.suite is not suite or ct.u.is_identity():
        raise MalformedCiphertext("U must be a non-identity G1 element of this suite")
    if len(ct.v) != suite.g1.size:
        raise MalformedCiphertext("masked pseudonym has the wrong length")
    body = _xor(ct.v, _mask(suite.pair(ct.u, rsk), len(ct.v)))
    try:
        pid = suite.decode_g1(body)
    except SubgroupCheckFailed:
        raise InvalidPid("unmasked bytes are not a G1 element") from None
    if pid.is_identity():
        raise InvalidPid("unmasked pseudonym is the identity")
    return pid


# --- non-interactive key agreement ------------------------------------------

def shared_key_vehicle(psk_i: G1Elem, rid_j: G2Elem) -> GTElem:
    return psk_i.suite.pair(psk_i, rid_j)


def shared_key_rsu(pid_i: G1Elem, rsk_j: G2Elem) -> GTElem:
    return pid_i.suite.pair(pid_i, rsk_j)
