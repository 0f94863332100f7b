"""Transportation Regulation Center: setup, registration, revocation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ringveil.codec import Writer
from ringveil.errors import UnknownPid, UnknownVid
from ringveil.ibc import (
    MasterSecret,
    RsuCredential,
    SystemParams,
    VehicleCredential,
    issue_rsu,
    issue_vehicle,
    pseudonym,
)
from ringveil.messages import VehiclePublicRecord
from ringveil.pairing import DST_TAG, G1Elem, G2Elem, GTElem, PairingSuite, hash_to_g1
from ringveil.revocation import KeyUpdate, RevocationList, RevocationTree, kunodes, revoke

from .clock import epoch_of

log = logging.getLogger(__name__)


def tag_base(suite: PairingSuite, vid: bytes, t: int) -> G1Elem:
    """Hash of identity and time into G1; the identity is length-prefixed so the split is unambiguous."""
    return hash_to_g1(suite, Writer().blob(vid).u64(t).getvalue(), DST_TAG)


@dataclass
class TrcState:
    master: MasterSecret
    pp: SystemParams
    bt: RevocationTree
    rl: RevocationList = field(default_factory=RevocationList)
    registry: dict[G1Elem, bytes] = field(default_factory=dict, repr=False)

    @property
    def suite(self) -> PairingSuite:
        return self.pp.suite

    def register_vehicle(self, vid: bytes) -> VehicleCredential:
        cred = issue_vehicle(self.master, vid, self.bt)
        self.registry[cred.pid] = cred.vid
        return cred

    def register_rsu(self, region_id: bytes) -> RsuCredential:
        return issue_rsu(self.master, region_id)

    def vid_of(self, pid: G1Elem) -> bytes:
        try:
            return self.registry[pid]
        except KeyError:
            raise UnknownPid("pseudonym not registered") from None

    def key_update(self, now: int) -> KeyUpdate:
        return kunodes(self.bt, self.rl, epoch_of(now))

    def directory(self) -> list[VehiclePublicRecord]:
        """Registered pseudonyms with their leaves, as shared with RSUs."""
        return [VehiclePublicRecord(pid, leaf) for leaf, pid in sorted(self.bt.leaf_assignments.items())]

    def trace_candidates(self, ring, t: int) -> list[GTElem]:
        """Expected tracing value for each ring member at time ``t``, in ring order."""
        s = self.suite
        return [s.pair(tag_base(s, self.vid_of(pid), t), s.Q) for pid in ring]

    def revoke_vid(self, vid: bytes, now: int) -> TrcState:
        return trc_revoke_vid(self, vid, now)


def trc_setup(suite: PairingSuite, height: int, pk_trac: G2Elem, rng=None) -> tuple[TrcState, SystemParams]:
    """Pick the master secret and an empty tree of ``2**height`` leaves.

    ``pk_trac`` comes from :func:`~ringveil.entities.lea.lea_keygen`, which
    runs first so the public parameters can carry it.
    """
    if height < 1:
        raise ValueError("tree height must be >= 1")
    if pk_trac.suite is not suite:
        raise ValueError("tracing key belongs to another suite")
    master = MasterSecret.generate(suite, rng)
    pp = SystemParams(suite, master.pk1, master.pk2, pk_trac)
    return TrcState(master, pp, RevocationTree(height)), pp


def trc_revoke_vid(trc: TrcState, vid: bytes, now: int) -> TrcState:
    pid = pseudonym(trc.suite, vid)
    if trc.registry.get(pid) != vid:
        raise UnknownVid("vehicle identity not registered")
    trc.rl = revoke(trc.rl, trc.bt, pid, epoch_of(now))
    log.info("revoked leaf %d at epoch %d", trc.bt.leaf_of(pid), epoch_of(now))
    return trc
