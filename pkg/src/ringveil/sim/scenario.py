"""Full protocol life cycle over a simulated clock and a lossy broadcast channel."""

from __future__ import annotations

import hashlib
import json
import random
from collections import Counter
from dataclasses import dataclass, field

from ringveil import wire
from ringveil.entities import (
    EPOCH_SECONDS,
    HsmBoundary,
    Receiver,
    RsuState,
    Verdict,
    lea_keygen,
    lea_trace,
    obu_sign_broadcast,
    rsu_refresh,
    rsu_ring_gen,
    trc_revoke_vid,
    trc_setup,
)
from ringveil.errors import RequestRejected
from ringveil.pairing import count_pairings, get_suite

from .config import ScenarioConfig


@dataclass
class LossyChannel:
    """Drops whole frames with probability ``loss``; hashes everything offered to it."""

    rng: random.Random
    loss: float
    sent: int = 0
    dropped: int = 0
    _h: "hashlib._Hash" = field(default_factory=hashlib.sha256, repr=False)

    def _log(self, label: str, frame: bytes, delivered: bool) -> None:
        self._h.update(label.encode() + b"\0" + len(frame).to_bytes(4, "big") + frame + bytes([delivered]))

    def send(self, label: str, frame: bytes) -> bytes | None:
        self.sent += 1
        delivered = self.rng.random() >= self.loss
        if not delivered:
            self.dropped += 1
        self._log(label, frame, delivered)
        return frame if delivered else None

    def secure(self, label: str, frame: bytes) -> bytes:
        """The TRC/RSU link: reliable, logged but never dropped."""
        self._log("secure-channel:" + label, frame, True)
        return frame

    def digest(self) -> str:
        return self._h.hexdigest()


def _request_grant(hsm, rsu, chan, suite, now, retries, tally):
    """One vehicle's ring request with retries.  Returns a RingListGrant or None."""
    for _ in range(retries):
        tally["attempts"] += 1
        frame = chan.send("ring-request", wire.encode(hsm.ring_request(rsu.rid)))
        if frame is None:
            continue
        req = wire.decode(frame, suite)
        try:
            grant = rsu_ring_gen(rsu, req.c1, req.c2, now)
        except RequestRejected as exc:
            tally["rejected:" + exc.reason] += 1
            return None
        frame = chan.send("ring-grant", wire.encode(grant))
        if frame is None:
            continue
        tally["granted"] += 1
        return hsm.open_grant(rsu.rid, wire.decode(frame, suite))
    tally["gave_up"] += 1
    return None


def run_scenario(cfg: ScenarioConfig) -> dict:
    suite = get_suite(cfg.suite)
    rng = random.Random(f"{cfg.seed}/protocol")
    chan = LossyChannel(random.Random(f"{cfg.seed}/channel"), cfg.loss)
    violations: list[str] = []
    now = 0

    # setup and registration
    s_trac, pk_trac = lea_keygen(suite, rng)
    trc, pp = trc_setup(suite, cfg.height, pk_trac, rng)
    chan.secure("system-params", wire.encode(pp))
    vids = [f"VID-{i:06d}".encode() for i in range(cfg.vehicles)]
    hsms = []
    for vid in vids:
        h = HsmBoundary(rng)
        h.provision(pp, trc.register_vehicle(vid))
        hsms.append(h)
    rsus = [RsuState(trc.register_rsu(f"region-{j}".encode()), pp, list_size=cfg.list_size, rng=rng)
            for j in range(cfg.rsus)]

    def refresh_all(t: int) -> None:
        for rsu in rsus:
            rsu_refresh(rsu, trc, t)
            chan.secure("key-update", wire.encode(rsu.ku))
            for rec in trc.directory():
                chan.secure("vehicle-record", wire.encode(rec))

    refresh_all(now)

    # ring lists
    req_tally: Counter = Counter()
    grants = {}
    for i, hsm in enumerate(hsms):
        g = _request_grant(hsm, rsus[i % len(rsus)], chan, suite, now, cfg.max_retries, req_tally)
        if g is not None:
            grants[i] = g
    if any(k.startswith("rejected:") for k in req_tally):
        violations.append("honest ring request rejected")
    now += 1

    # broadcasts
    delivered = []
    for n, (i, g) in enumerate(grants.items()):
        size = min(cfg.ring_sizes[n % len(cfg.ring_sizes)], len(g.members))
        msg = obu_sign_broadcast(hsms[i], g, f"safety-message-{i}".encode(), now, size, rng)
        frame = chan.send("broadcast", wire.encode(msg))
        if frame is not None:
            delivered.append((wire.decode(frame, suite), i))
    now += 1

    # batch verification at one listening OBU
    rx = Receiver(pp, window=cfg.window, rng=rng)
    verdicts: list[Verdict] = []
    batches = 0
    with count_pairings(suite) as pc:
        pos = 0
        while pos < len(delivered):
            eta = cfg.batch_sizes[batches % len(cfg.batch_sizes)]
            verdicts += rx.batch_process([m for m, _ in delivered[pos:pos + eta]], now)
            pos += eta
            batches += 1
    tallies = Counter(v.value for v in verdicts)
    false_rejects = sum(v is not Verdict.ACCEPT for v in verdicts)
    if false_rejects:
        violations.append(f"{false_rejects} honest broadcasts rejected")

    replay = {}
    if delivered:
        first = delivered[0][0]
        replay["within_window"] = rx.receive(first, now).value
        replay["after_window"] = rx.receive(first, now + cfg.window + 1).value
        if replay != {"within_window": "duplicate", "after_window": "stale"}:
            violations.append("replay not rejected")

    # tracing
    correct = traced = 0
    for (msg, i), v in zip(delivered, verdicts):
        if v is not Verdict.ACCEPT:
            continue
        traced += 1
        pid = lea_trace(s_trac, msg, trc)
        correct += pid == hsms[i].pid and trc.vid_of(pid) == vids[i]
    if correct != traced:
        violations.append("trace returned the wrong signer")

    # revocation
    now += EPOCH_SECONDS
    for vid in vids[:cfg.revoke]:
        trc_revoke_vid(trc, vid, now)
    refresh_all(now)
    chan.secure("revocation-list", wire.encode(trc.rl))
    rev_tally: Counter = Counter()
    for i in range(cfg.revoke):
        if _request_grant(hsms[i], rsus[i % len(rsus)], chan, suite, now, cfg.max_retries, rev_tally):
            violations.append("revoked vehicle received a ring list")
    ctl_tally: Counter = Counter()
    if cfg.revoke < cfg.vehicles:
        i = cfg.revoke
        _request_grant(hsms[i], rsus[i % len(rsus)], chan, suite, now, cfg.max_retries, ctl_tally)
        if any(k.startswith("rejected:") for k in ctl_tally):
            violations.append("unrevoked vehicle rejected after refresh")

    return {
        "config": cfg.to_dict(),
        "hash_config": pp.hash_config,
        "phases": {
            "registration": {"vehicles": len(hsms), "rsus": len(rsus), "tree_leaves": trc.bt.n_leaves},
            "ring_request": dict(sorted(req_tally.items())),
            "broadcast": {"signed": len(grants), "delivered": len(delivered)},
            "verification": {
                "batches": batches,
                "pairings": pc.count,
                **{v.value: tallies.get(v.value, 0) for v in Verdict},
            },
            "replay": replay,
            "trace": {"traced": traced, "correct": correct,
                      "success_rate": (correct / traced) if traced else None},
            "revocation": {
                "revoked": cfg.revoke,
                "after_refresh": dict(sorted(rev_tally.items())),
                "control": dict(sorted(ctl_tally.items())),
            },
        },
        "channel": {"frames_sent": chan.sent, "frames_dropped": chan.dropped},
        "false_rejects": false_rejects,
        "violations": violations,
        "transcript_sha256": chan.digest(),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
