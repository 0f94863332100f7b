"""On-board unit: the sealed HSM boundary plus the broadcast receiver."""

from __future__ import annotations

import enum
import hashlib
import secrets
from collections import OrderedDict
from typing import Sequence

from ringveil.errors import AuthFailure, GrantExpired, NotProvisioned, RingTooSmall, SelfNotInList
from ringveil.ibc import SystemParams, VehicleCredential, ibe_encrypt, shared_key_vehicle
from ringveil.messages import (
    BroadcastMsg,
    RingGrant,
    RingListGrant,
    RingRequest,
    decode_member_list,
    encode_path,
    grant_mac_input,
)
from ringveil.pairing import G1Elem, G2Elem, GTElem
from ringveil.ringsig import SignedPayload, SubRing, find_invalid, random_scaling_batch_verify, ring_sign, ring_verify
from ringveil.symmetric import channel_keys, derive_nonce, mac_verify, sym_decrypt, sym_encrypt

from .clock import FRESHNESS_WINDOW, REPLAY_CACHE_SIZE
from .rsu import REQUEST_LABEL
from .trc import tag_base


class HsmBoundary:
    """Holds a vehicle credential and exposes only derived values.

    Nothing here hands out the private key or the real identity: callers get
    pseudonyms, requests, shared channel keys and signed broadcasts.
    """

    __slots__ = ("__cred", "__pp", "__keys", "__rng", "_sign_count", "_request_count")

    def __init__(self, rng=None) -> None:
        self.__cred: VehicleCredential | None = None
        self.__pp: SystemParams | None = None
        self.__keys: dict[G2Elem, GTElem] = {}
        self.__rng = rng or secrets.SystemRandom()
        self._sign_count = 0
        self._request_count = 0

    def __repr__(self) -> str:
        state = "provisioned" if self.__cred is not None else "empty"
        return f"<HsmBoundary {state} signatures={self._sign_count}>"

    def provision(self, pp: SystemParams, cred: VehicleCredential) -> None:
        if self.__cred is not None:
            raise ValueError("HSM already provisioned")
        if not cred.is_consistent(pp):
            raise ValueError("credential does not match the public parameters")
        self.__pp, self.__cred = pp, cred

    def _require(self) -> tuple[SystemParams, VehicleCredential]:
        if self.__cred is None:
            raise NotProvisioned("HSM holds no credential")
        return self.__pp, self.__cred  # type: ignore[return-value]

    @property
    def provisioned(self) -> bool:
        return self.__cred is not None

    @property
    def pid(self) -> G1Elem:
        return self._require()[1].pid

    @property
    def signing_counter(self) -> int:
        return self._sign_count

    def shared_key(self, rid: G2Elem) -> GTElem:
        _, cred = self._require()
        k = self.__keys.get(rid)
        if k is None:
            k = self.__keys[rid] = shared_key_vehicle(cred.psk, rid)
        return k

    def ring_request(self, rid: G2Elem) -> RingRequest:
        """Pseudonym encrypted to the RSU, and the leaf path under the shared key."""
        pp, cred = self._require()
        k = self.shared_key(rid)
        enc_key, _ = channel_keys(k)
        nonce = derive_nonce(k, self._request_count, REQUEST_LABEL)
        self._request_count += 1
        c1 = ibe_encrypt(pp.pk1, rid, cred.pid, self.__rng)
        return RingRequest(c1, sym_encrypt(enc_key, encode_path(cred.leaf_path), nonce))

    def open_grant(self, rid: G2Elem, grant: RingGrant) -> RingListGrant:
        """Check the grant MAC, then decrypt the ring list."""
        pp, _ = self._require()
        k = self.shared_key(rid)
        enc_key, mac_key = channel_keys(k)
        if not mac_verify(mac_key, grant_mac_input(grant.ciphertext, grant.expiry), grant.mac):
            raise AuthFailure("grant MAC does not verify")
        members = decode_member_list(pp.suite, sym_decrypt(enc_key, grant.ciphertext))
        return RingListGrant(members, grant.expiry)

    def sign(self, m: bytes, t: int, ring: SubRing, k: int) -> BroadcastMsg:
        pp, cred = self._require()
        s = pp.suite
        tag = s.pair(tag_base(s, cred.vid, t), pp.pk_trac)
        payload = SignedPayload(bytes(m), tag, t)
        sig = ring_sign(pp.pk2, cred.psk, k, payload, ring, self.__rng)
        self._sign_count += 1
        return BroadcastMsg(payload.m, sig, ring, t, tag)


def obu_ring_request(hsm: HsmBoundary, rid: G2Elem) -> RingRequest:
    return hsm.ring_request(rid)


def obu_accept_grant(hsm: HsmBoundary, rid: G2Elem, grant: RingGrant) -> RingListGrant:
    return hsm.open_grant(rid, grant)


def obu_sign_broadcast(hsm: HsmBoundary, grant: RingListGrant, m: bytes, now: int, n_prime: int, rng=None) -> BroadcastMsg:
    """Sign ``m`` over a random sub-ring of ``n_prime`` members drawn from the grant."""
    if now >= grant.expiry:
        raise GrantExpired(f"grant expired at {grant.expiry}, now {now}")
    me = hsm.pid
    if me not in grant.members:
        raise SelfNotInList("own pseudonym missing from the ring list")
    if not 1 <= n_prime <= len(grant.members):
        raise RingTooSmall(f"cannot draw {n_prime} members from a list of {len(grant.members)}")
    rng = rng or secrets.SystemRandom()
    others = rng.sample([p for p in grant.members if p != me], n_prime - 1)
    k = rng.randrange(n_prime)
    others.insert(k, me)
    return hsm.sign(m, now, SubRing(others), k)


# --- receiving ----------------------------------------------------------------

class Verdict(enum.Enum):
    ACCEPT = "accept"
    STALE = "stale"
    DUPLICATE = "duplicate"
    BAD_SIGNATURE = "bad-signature"


def _digest(msg: BroadcastMsg) -> bytes:
    return hashlib.sha256(msg.sig.encode()).digest()


class Receiver:
    """Per-OBU receive state: freshness window and a bounded replay cache."""

    def __init__(self, pp: SystemParams, window: int = FRESHNESS_WINDOW,
                 cache_size: int = REPLAY_CACHE_SIZE, rng=None) -> None:
        self.pp = pp
        self.window = window
        self.cache_size = cache_size
        self.rng = rng
        self._seen: OrderedDict[bytes, None] = OrderedDict()

    def _remember(self, d: bytes) -> None:
        self._seen[d] = None
        if len(self._seen) > self.cache_size:
            self._seen.popitem(last=False)

    def _precheck(self, msg: BroadcastMsg, now: int) -> Verdict | None:
        if abs(now - msg.t) > self.window:
            return Verdict.STALE
        if _digest(msg) in self._seen:
            return Verdict.DUPLICATE
        return None

    def receive(self, msg: BroadcastMsg, now: int) -> Verdict:
        early = self._precheck(msg, now)
        if early is not None:
            return early
        if not ring_verify(self.pp.pk2, msg.payload, msg.ring, msg.sig):
            return Verdict.BAD_SIGNATURE
        self._remember(_digest(msg))
        return Verdict.ACCEPT

    def batch_process(self, queue: Sequence[BroadcastMsg], now: int) -> list[Verdict]:
        """Same verdicts as calling :meth:`receive` on each message in order."""
        out: list[Verdict | None] = [self._precheck(m, now) for m in queue]
        todo = [i for i, v in enumerate(out) if v is None]
        valid = set(todo)
        if todo:
            args = ([queue[i].payload for i in todo], [queue[i].ring for i in todo], [queue[i].sig for i in todo])
            if not random_scaling_batch_verify(self.pp.pk2, *args, rng=self.rng):
                valid -= {todo[j] for j in find_invalid(self.pp.pk2, *args, rng=self.rng)}
        for i in todo:
            d = _digest(queue[i])
            if d in self._seen:
                out[i] = Verdict.DUPLICATE
            elif i in valid:
                self._remember(d)
                out[i] = Verdict.ACCEPT
            else:
                out[i] = Verdict.BAD_SIGNATURE
        return out  # type: ignore[return-value]


def obu_receive(rx: Receiver, msg: BroadcastMsg, now: int) -> Verdict:
    return rx.receive(msg, now)


def obu_batch_process(rx: Receiver, queue: Sequence[BroadcastMsg], now: int) -> list[Verdict]:
    return rx.batch_process(queue, now)
