"""Road-side unit: authorizes ring requests and hands out ring lists."""

from __future__ import annotations

import logging
import secrets
from dataclasses import dataclass, field

from ringveil.errors import (
    AuthFailure,
    InvalidPid,
    MalformedCiphertext,
    MalformedRequest,
    RevokedVehicle,
    StaleKeyUpdate,
    UnregisteredPid,
    WireError,
)
from ringveil.ibc import RsuCredential, SystemParams, ibe_decrypt, shared_key_rsu
from ringveil.messages import RingGrant, RingRequest, decode_path, encode_member_list, grant_mac_input
from ringveil.pairing import G1Elem, GTElem
from ringveil.revocation import KeyUpdate, is_authorized
from ringveil.symmetric import channel_keys, derive_nonce, mac, sym_decrypt, sym_encrypt

from .clock import DEFAULT_LIST_SIZE, GRANT_VALIDITY, epoch_of
from .trc import TrcState

log = logging.getLogger(__name__)

REQUEST_LABEL = b"request"
GRANT_LABEL = b"grant"


def heap_path(leaf: int) -> tuple[int, ...]:
    out = [leaf]
    while leaf > 1:
        leaf >>= 1
        out.append(leaf)
    return tuple(out)


@dataclass
class RsuState:
    cred: RsuCredential
    pp: SystemParams
    list_size: int = DEFAULT_LIST_SIZE
    validity: int = GRANT_VALIDITY
    rng: object = field(default=None, repr=False)
    ku: KeyUpdate | None = None
    directory: dict[G1Elem, int] = field(default_factory=dict, repr=False)
    key_cache: dict[G1Elem, GTElem] = field(default_factory=dict, repr=False)
    _grant_counter: dict[G1Elem, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.list_size < 1:
            raise ValueError("ring list size must be positive")
        if self.rng is None:
            self.rng = secrets.SystemRandom()

    @property
    def rid(self):
        return self.cred.rid

    def authorized(self, pid: G1Elem) -> bool:
        leaf = self.directory.get(pid)
        return leaf is not None and self.ku is not None and is_authorized(heap_path(leaf), self.ku)

    def refresh(self, trc: TrcState, now: int) -> RsuState:
        return rsu_refresh(self, trc, now)

    def ring_gen(self, req: RingRequest, now: int) -> RingGrant:
        return rsu_ring_gen(self, req.c1, req.c2, now)


def rsu_refresh(rsu: RsuState, trc: TrcState, now: int) -> RsuState:
    """Pull this epoch's key update and the vehicle directory from the TRC."""
    log.debug("secure-channel: TRC -> RSU %r key update for epoch %d", rsu.cred.region_id, epoch_of(now))
    rsu.ku = trc.key_update(now)
    rsu.directory = {rec.pid: rec.leaf for rec in trc.directory()}
    for pid in [p for p in rsu.key_cache if not rsu.authorized(p)]:
        del rsu.key_cache[pid]
    return rsu


def _channel_key(rsu: RsuState, pid: G1Elem) -> GTElem:
    k = rsu.key_cache.get(pid)
    return k if k is not None else shared_key_rsu(pid, rsu.cred.rsk)


def _sample_list(rsu: RsuState, requester: G1Elem) -> list[G1Elem]:
    pool = sorted((p for p in rsu.directory if p != requester and rsu.authorized(p)), key=bytes)
    picked = rsu.rng.sample(pool, min(rsu.list_size - 1, len(pool)))
    picked.append(requester)
    rsu.rng.shuffle(picked)
    return picked


def rsu_ring_gen(rsu: RsuState, c1, c2: bytes, now: int) -> RingGrant:
    """Answer a ring request with a :class:`RingGrant` or raise a :class:`RequestRejected`."""
    if rsu.ku is None or rsu.ku.epoch != epoch_of(now):
        raise StaleKeyUpdate("key update does not cover the current epoch")
    try:
        pid = ibe_decrypt(rsu.cred.rsk, c1)
    except MalformedCiphertext as exc:
        raise MalformedRequest(str(exc)) from None
    except InvalidPid:
        raise UnregisteredPid("request does not decrypt to a pseudonym") from None
    leaf = rsu.directory.get(pid)
    if leaf is None:
        raise UnregisteredPid("pseudonym not in the TRC directory")

    k = _channel_key(rsu, pid)
    enc_key, mac_key = channel_keys(k)
    try:
        claimed = decode_path(sym_decrypt(enc_key, c2))
    except (AuthFailure, WireError):
        raise MalformedRequest("leaf path does not decrypt under the channel key") from None
    if claimed != heap_path(leaf):
        raise MalformedRequest("leaf path disagrees with the registered leaf")
    if not is_authorized(claimed, rsu.ku):
        raise RevokedVehicle("vehicle is not covered by the current key update")

    rsu.key_cache[pid] = k
    ctr = rsu._grant_counter.get(pid, 0)
    rsu._grant_counter[pid] = ctr + 1
    body = encode_member_list(_sample_list(rsu, pid))
    ct = sym_encrypt(enc_key, body, derive_nonce(k, ctr, GRANT_LABEL))
    expiry = now + rsu.validity
    return RingGrant(ct, mac(mac_key, grant_mac_input(ct, expiry)), expiry)
