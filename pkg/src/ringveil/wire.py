"""Framed, canonical byte encodings for every protocol message.

Frame: ``version (0x01) || type (u8) || body length (u32) || body``.
Integers are big-endian, lists carry a count prefix, points are compressed.
Messages other than :class:`SystemParams` need the pairing suite to decode.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ringveil.codec import Reader, Writer
from ringveil.errors import BadType, BadVersion, DuplicateMember, MalformedField, TrailingBytes, TruncatedFrame
from ringveil.ibc import IbeCiphertext, SystemParams
from ringveil.messages import BroadcastMsg, RingGrant, RingRequest, VehiclePublicRecord
from ringveil.pairing import PairingSuite, suite_by_wire_id
from ringveil.revocation import KeyUpdate, RevocationList
from ringveil.ringsig import RingSignature, SubRing
from ringveil.symmetric import MAC_LEN, MacTag

VERSION = 0x01
HEADER_LEN = 6


class MsgType(enum.IntEnum):
    SYSTEM_PARAMS = 0x01
    BROADCAST = 0x02
    RING_REQUEST = 0x03
    RING_GRANT = 0x04
    KEY_UPDATE = 0x05
    REVOCATION_LIST = 0x06
    VEHICLE_RECORD = 0x07


@dataclass(frozen=True)
class Frame:
    version: int
    msg_type: MsgType
    body: bytes

    def encode(self) -> bytes:
        return Writer().u8(self.version).u8(self.msg_type).blob(self.body).getvalue()


def parse_frame(data: bytes) -> Frame:
    data = bytes(data)
    if len(data) < HEADER_LEN:
        raise TruncatedFrame(f"frame header needs {HEADER_LEN} bytes, got {len(data)}")
    if data[0] != VERSION:
        raise BadVersion(f"unsupported frame version {data[0]}")
    try:
        mt = MsgType(data[1])
    except ValueError:
        raise BadType(f"unknown message type {data[1]:#04x}") from None
    n = int.from_bytes(data[2:6], "big")
    body = data[HEADER_LEN:]
    if len(body) < n:
        raise TruncatedFrame(f"declared body of {n} bytes, got {len(body)}")
    if len(body) > n:
        raise TrailingBytes(f"{len(body) - n} bytes after the frame body")
    return Frame(VERSION, mt, body)


def _frame(mt: MsgType, body: bytes) -> bytes:
    return Frame(VERSION, mt, body).encode()


def _body(data: bytes, mt: MsgType) -> bytes:
    f = parse_frame(data)
    if f.msg_type != mt:
        raise BadType(f"expected {mt.name}, got {f.msg_type.name}")
    return f.body


# --- SystemParams -----------------------------------------------------------

def encode_system_params(pp: SystemParams) -> bytes:
    w = Writer().u8(pp.suite.wire_id).elem(pp.pk1).elem(pp.pk2).elem(pp.pk_trac)
    w.short_blob(pp.hash_config.encode())
    return _frame(MsgType.SYSTEM_PARAMS, w.getvalue())


def _read_system_params(r: Reader) -> SystemParams:
    wid = r.u8()
    try:
        r.suite = suite_by_wire_id(wid)
    except ValueError as exc:
        raise MalformedField(str(exc)) from None
    pk1, pk2, pk_trac = r.g1(), r.g2(), r.g2()
    try:
        cfg = r.short_blob().decode("ascii")
    except UnicodeDecodeError:
        raise MalformedField("hash config id is not ASCII") from None
    return SystemParams(r.suite, pk1, pk2, pk_trac, cfg)


def decode_system_params(data: bytes) -> SystemParams:
    r = Reader(_body(data, MsgType.SYSTEM_PARAMS))
    pp = _read_system_params(r)
    r.finish()
    return pp


# --- BroadcastMsg -----------------------------------------------------------

def signature_bytes(sig: RingSignature) -> bytes:
    return sig.encode()


def encode_broadcast(msg: BroadcastMsg) -> bytes:
    w = Writer().blob(msg.m).raw(msg.sig.encode()).raw(msg.ring.encode()).u64(msg.t).elem(msg.tag)
    return _frame(MsgType.BROADCAST, w.getvalue())


def _read_broadcast(r: Reader) -> BroadcastMsg:
    m = r.blob()
    u = r.g1_list()
    v = r.g1()
    members = r.g1_list()
    t = r.u64()
    tag = r.gt()
    if len(u) != len(members):
        raise MalformedField(f"{len(u)} signature components for a ring of {len(members)}")
    try:
        ring = SubRing(members)
    except (DuplicateMember, ValueError) as exc:
        raise MalformedField(str(exc)) from None
    return BroadcastMsg(m, RingSignature(tuple(u), v), ring, t, tag)


def decode_broadcast(data: bytes, suite: PairingSuite) -> BroadcastMsg:
    r = Reader(_body(data, MsgType.BROADCAST), suite)
    msg = _read_broadcast(r)
    r.finish()
    return msg


# --- RingRequest / RingGrant --------------------------------------------------

def encode_ring_request(req: RingRequest) -> bytes:
    return _frame(MsgType.RING_REQUEST, Writer().raw(req.c1.encode()).blob(req.c2).getvalue())


def _read_ring_request(r: Reader) -> RingRequest:
    u = r.g1()
    v = r.take(r.suite.g1.size)
    return RingRequest(IbeCiphertext(u, v), r.blob())


def decode_ring_request(data: bytes, suite: PairingSuite) -> RingRequest:
    r = Reader(_body(data, MsgType.RING_REQUEST), suite)
    req = _read_ring_request(r)
    r.finish()
    return req


def encode_ring_grant(g: RingGrant) -> bytes:
    return _frame(MsgType.RING_GRANT, Writer().blob(g.ciphertext).raw(g.mac).u64(g.expiry).getvalue())


def _read_ring_grant(r: Reader) -> RingGrant:
    return RingGrant(r.blob(), MacTag(r.take(MAC_LEN)), r.u64())


def decode_ring_grant(data: bytes, suite: PairingSuite | None = None) -> RingGrant:
    r = Reader(_body(data, MsgType.RING_GRANT), suite)
    g = _read_ring_grant(r)
    r.finish()
    return g


# --- KeyUpdate / RevocationList ---------------------------------------------

def encode_key_update(ku: KeyUpdate) -> bytes:
    nodes = ku.sorted_nodes()
    w = Writer().u64(ku.epoch).u32(len(nodes))
    for x in nodes:
        w.u64(x)
    return _frame(MsgType.KEY_UPDATE, w.getvalue())


def _read_key_update(r: Reader) -> KeyUpdate:
    epoch = r.u64()
    n = r.u32()
    if n * 8 > r.remaining:
        raise TruncatedFrame("key update lists more nodes than the body holds")
    nodes = [r.u64() for _ in range(n)]
    if any(b <= a for a, b in zip(nodes, nodes[1:])):
        raise MalformedField("cover nodes must be strictly increasing")
    try:
        return KeyUpdate(epoch, frozenset(nodes))
    except ValueError as exc:
        raise MalformedField(str(exc)) from None


def decode_key_update(data: bytes, suite: PairingSuite | None = None) -> KeyUpdate:
    r = Reader(_body(data, MsgType.KEY_UPDATE))
    ku = _read_key_update(r)
    r.finish()
    return ku


def encode_revocation_list(rl: RevocationList) -> bytes:
    w = Writer().u32(len(rl.entries))
    for leaf, t in rl.entries:
        w.u64(leaf).u64(t)
    return _frame(MsgType.REVOCATION_LIST, w.getvalue())


def _read_revocation_list(r: Reader) -> RevocationList:
    n = r.u32()
    if n * 16 > r.remaining:
        raise TruncatedFrame("revocation list longer than the body")
    entries = tuple((r.u64(), r.u64()) for _ in range(n))
    try:
        return RevocationList(entries)
    except ValueError as exc:
        raise MalformedField(str(exc)) from None


def decode_revocation_list(data: bytes, suite: PairingSuite | None = None) -> RevocationList:
    r = Reader(_body(data, MsgType.REVOCATION_LIST))
    rl = _read_revocation_list(r)
    r.finish()
    return rl


# --- VehiclePublicRecord ------------------------------------------------------

def encode_vehicle_record(rec: VehiclePublicRecord) -> bytes:
    return _frame(MsgType.VEHICLE_RECORD, Writer().elem(rec.pid).u64(rec.leaf).getvalue())


def _read_vehicle_record(r: Reader) -> VehiclePublicRecord:
    pid = r.g1()
    if pid.is_identity():
        raise MalformedField("pseudonym is the identity")
    return VehiclePublicRecord(pid, r.u64())


def decode_vehicle_record(data: bytes, suite: PairingSuite) -> VehiclePublicRecord:
    r = Reader(_body(data, MsgType.VEHICLE_RECORD), suite)
    rec = _read_vehicle_record(r)
    r.finish()
    return rec


# --- generic dispatch ---------------------------------------------------------

_ENCODERS = {
    SystemParams: encode_system_params,
    BroadcastMsg: encode_broadcast,
    RingRequest: encode_ring_request,
    RingGrant: encode_ring_grant,
    KeyUpdate: encode_key_update,
    RevocationList: encode_revocation_list,
    VehiclePublicRecord: encode_vehicle_record,
}

_READERS = {
    MsgType.SYSTEM_PARAMS: _read_system_params,
    MsgType.BROADCAST: _read_broadcast,
    MsgType.RING_REQUEST: _read_ring_request,
    MsgType.RING_GRANT: _read_ring_grant,
    MsgType.KEY_UPDATE: _read_key_update,
    MsgType.REVOCATION_LIST: _read_revocation_list,
    MsgType.VEHICLE_RECORD: _read_vehicle_record,
}

_NEEDS_SUITE = {MsgType.BROADCAST, MsgType.RING_REQUEST, MsgType.VEHICLE_RECORD}


def encode(obj) -> bytes:
    try:
        enc = _ENCODERS[type(obj)]
    except KeyError:
        raise TypeError(f"no wire encoding for {type(obj).__name__}") from None
    return enc(obj)


def decode(data: bytes, suite: PairingSuite | None = None):
    """Decode any frame.  Raises only :class:`~ringveil.errors.WireError` subclasses on bad input."""
    f = parse_frame(data)
    if f.msg_type in _NEEDS_SUITE and suite is None:
        raise MalformedField(f"{f.msg_type.name} needs a pairing suite to decode")
    r = Reader(f.body, suite)
    obj = _READERS[f.msg_type](r)
    r.finish()
    return obj
