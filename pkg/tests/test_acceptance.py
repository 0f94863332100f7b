"""Acceptance suite: one test per criterion, each reporting PASS or FAIL.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the verdict lines are
also repeated in the terminal summary.
"""

import contextlib
import csv
import io
import math
import random
import time

import pytest

from conftest import ACCEPTANCE
from ringveil import wire
from ringveil.entities import (
    HsmBoundary,
    Receiver,
    RsuState,
    Verdict,
    lea_keygen,
    lea_trace,
    obu_ring_request,
    obu_sign_broadcast,
    rsu_refresh,
    rsu_ring_gen,
    trc_revoke_vid,
    trc_setup,
)
from ringveil.errors import NoMatch, RevokedVehicle, SubgroupCheckFailed
from ringveil.ibc import MasterSecret, issue_rsu, issue_vehicle, shared_key_rsu, shared_key_vehicle
from ringveil.messages import BroadcastMsg
from ringveil.pairing import DEFAULT_SUITE, SUITES, count_pairings, get_suite
from ringveil.revocation import RevocationList, RevocationTree, kunodes
from ringveil.ringsig import (
    SCALING_BITS,
    RingSignature,
    SignedPayload,
    SubRing,
    batch_verify,
    find_invalid,
    random_scaling_batch_verify,
    ring_sign,
    ring_verify,
)
from ringveil.sim.bench import (
    CSV_FIELDS,
    KU_FIELDS,
    Fixture,
    bench_batch,
    bench_sign,
    bench_verify,
    keyupdate_sizes,
    linear_fit,
    write_csv,
)
from wire_samples import golden_path, sample_messages

SUITE = get_suite(DEFAULT_SUITE)


@contextlib.contextmanager
def criterion(n: int, title: str):
    try:
        yield
    except BaseException:
        ACCEPTANCE[n] = ("FAIL", title)
        print(f"\ncriterion {n}: FAIL  {title}")
        raise
    ACCEPTANCE[n] = ("PASS", title)
    print(f"\ncriterion {n}: PASS  {title}")


class Signers:
    def __init__(self, n: int, seed: int):
        self.rng = random.Random(seed)
        self.ms = MasterSecret.generate(SUITE, self.rng)
        bt = RevocationTree(max(1, math.ceil(math.log2(n))))
        self.creds = [issue_vehicle(self.ms, b"acc-%d" % i, bt) for i in range(n)]
        self.gt = SUITE.pair(SUITE.P, SUITE.Q)

    def sign(self, n: int, m: bytes):
        members = self.rng.sample(self.creds, n)
        k = self.rng.randrange(n)
        ring = SubRing([c.pid for c in members])
        payload = SignedPayload(m, self.gt ** self.rng.randrange(1, SUITE.q), self.rng.randrange(1 << 40))
        return payload, ring, ring_sign(self.ms.pk2, members[k].psk, k, payload, ring, self.rng)


def test_criterion_01_key_agreement():
    with criterion(1, "shared-key agreement on 100 random vehicle/RSU pairs within 30 s"):
        start = time.perf_counter()
        rng = random.Random(1)
        ms = MasterSecret.generate(SUITE, rng)
        bt = RevocationTree(7)
        for i in range(100):
            v = issue_vehicle(ms, rng.randbytes(16), bt)
            r = issue_rsu(ms, b"region-%d" % rng.randrange(1 << 30))
            assert shared_key_vehicle(v.psk, r.rid) == shared_key_rsu(v.pid, r.rsk)
        assert time.perf_counter() - start < 30


def _flip(data: bytes, rng) -> bytes:
    buf = bytearray(data)
    buf[rng.randrange(len(buf))] ^= 1 << rng.randrange(8)
    return bytes(buf)


def _mutant_rejected(pk2, payload, ring, sig, field: str, rng) -> bool:
    try:
        if field == "m":
            payload = SignedPayload(_flip(payload.m, rng), payload.tag, payload.t)
        elif field == "t":
            payload = SignedPayload(payload.m, payload.tag, payload.t ^ (1 << rng.randrange(64)))
        elif field == "tag":
            payload = SignedPayload(payload.m, SUITE.decode_gt(_flip(bytes(payload.tag), rng)), payload.t)
        elif field == "order":
            i, j = rng.sample(range(len(ring)), 2)
            m = list(ring)
            m[i], m[j] = m[j], m[i]
            ring = SubRing(m)
        elif field == "u":
            u = list(sig.u_list)
            i = rng.randrange(len(u))
            u[i] = SUITE.decode_g1(_flip(bytes(u[i]), rng))
            sig = RingSignature(tuple(u), sig.v)
        elif field == "v":
            sig = RingSignature(sig.u_list, SUITE.decode_g1(_flip(bytes(sig.v), rng)))
    except SubgroupCheckFailed:
        return True  # mutated bytes no longer decode: rejected before verification
    return not ring_verify(pk2, payload, ring, sig)


def test_criterion_02_sign_verify_and_mutations():
    with criterion(2, "200 round-trips (ring 1..30) verify; 200 single-bit mutations all rejected"):
        s = Signers(30, 2)
        rng = random.Random(22)
        items = [s.sign(rng.randint(1, 30), rng.randbytes(rng.randint(1, 64))) for _ in range(200)]
        assert all(ring_verify(s.ms.pk2, *it) for it in items)
        fields = ("m", "t", "tag", "order", "u", "v")
        rejected = 0
        for i in range(200):
            f = fields[i % len(fields)]
            pool = [it for it in items if len(it[1]) >= 2] if f == "order" else items
            rejected += _mutant_rejected(s.ms.pk2, *rng.choice(pool), f, rng)
        assert rejected == 200


def _evaluations(idx: list[int], bad: set[int]) -> int:
    """Number of batch equations recursive halving evaluates when ``bad`` fail."""
    if not bad.intersection(idx) or len(idx) == 1:
        return 1
    mid = len(idx) // 2
    return 1 + _evaluations(idx[:mid], bad) + _evaluations(idx[mid:], bad)


def test_criterion_03_batch_oracle_equivalence():
    with criterion(3, "hardened batch equals AND of singles; find_invalid exact; 2 pairings per equation"):
        s = Signers(20, 3)
        rng = random.Random(33)
        pk2 = s.ms.pk2
        for trial in range(100):
            eta = rng.choice((5, 10, 20))
            items = [s.sign(rng.randint(2, 20), b"batch %d/%d" % (trial, j)) for j in range(eta)]
            ps, rs, ss = map(list, zip(*items))
            for j in rng.sample(range(eta), rng.randint(0, 3)):
                kind = rng.randrange(3)
                if kind == 0:
                    ss[j] = RingSignature(ss[j].u_list, ss[j].v + SUITE.P)
                elif kind == 1:
                    u = list(ss[j].u_list)
                    u[0] = u[0] + SUITE.P
                    ss[j] = RingSignature(tuple(u), ss[j].v)
                else:
                    ps[j] = SignedPayload(ps[j].m + b"!", ps[j].tag, ps[j].t)
            singles = [ring_verify(pk2, p, r, x) for p, r, x in zip(ps, rs, ss)]
            expected_bad = [i for i, ok in enumerate(singles) if not ok]
            with count_pairings(SUITE) as c:
                verdict = random_scaling_batch_verify(pk2, ps, rs, ss, rng)
            assert c.count == 2
            assert verdict == all(singles)
            with count_pairings(SUITE) as c:
                found = find_invalid(pk2, ps, rs, ss, rng)
            assert found == expected_bad
            assert c.count == 2 * _evaluations(list(range(eta)), set(expected_bad))


def test_criterion_04_cancellation_forgery():
    with criterion(4, "offsetting forgery passes the plain batch and fails the hardened batch"):
        s = Signers(8, 4)
        (p1, r1, s1), (p2, r2, s2) = s.sign(5, b"first"), s.sign(5, b"second")
        delta = random.Random(44).randrange(1, SUITE.q) * SUITE.P
        f1 = RingSignature(s1.u_list, s1.v + delta)
        f2 = RingSignature(s2.u_list, s2.v - delta)
        pk2 = s.ms.pk2
        assert not ring_verify(pk2, p1, r1, f1) and not ring_verify(pk2, p2, r2, f2)
        assert batch_verify(pk2, [p1, p2], [r1, r2], [f1, f2])
        rng = random.Random(45)
        assert not any(random_scaling_batch_verify(pk2, [p1, p2], [r1, r2], [f1, f2], rng) for _ in range(20))
        assert SCALING_BITS == 80


def _check_partition(h: int, revoked: set[int]) -> None:
    bt = RevocationTree(h)
    n = 1 << h
    ku = kunodes(bt, RevocationList(tuple((v, 0) for v in sorted(revoked))), 0)
    hits = [0] * n
    for x in ku.cover:
        span = h - (x.bit_length() - 1)
        lo = (x << span) - n
        for i in range(lo, lo + (1 << span)):
            hits[i] += 1
    for i in range(n):
        assert hits[i] == (0 if n + i in revoked else 1)


def test_criterion_05_cover_partition():
    with criterion(5, "cover partition: exhaustive h<=4, 1000 random subsets at h=6 and h=10, 8-leaf example"):
        for h in range(1, 5):
            leaves = list(range(1 << h, 2 << h))
            for mask in range(1 << len(leaves)):
                _check_partition(h, {v for i, v in enumerate(leaves) if mask >> i & 1})
        rng = random.Random(5)
        for h in (6, 10):
            leaves = list(range(1 << h, 2 << h))
            for _ in range(1000):
                _check_partition(h, set(rng.sample(leaves, rng.randint(0, len(leaves)))))
        ku = kunodes(RevocationTree(3), RevocationList(((8, 0),)), 0)
        assert len(ku.cover) == 3


def test_criterion_06_keyupdate_size(tmp_path):
    with criterion(6, "1024 leaves: cover within the logarithmic bound and below the naive list, under 10 s"):
        start = time.perf_counter()
        n = 1024
        rs = [1 << i for i in range(10)]
        rows = []
        for seed in range(10):
            rows += keyupdate_sizes(n, rs, seed)
        for row in rows:
            r, y = row["revoked"], row["cover_size"]
            assert y <= r * (math.log2(n / r) + 1)
            if 1 < r < n - 1:
                assert y < n - r
        out = tmp_path / "ku.csv"
        with open(out, "w") as fh:
            write_csv(keyupdate_sizes(n, [0] + rs + [n], 0), KU_FIELDS, fh)
        table = list(csv.DictReader(open(out)))
        gaps = {int(t["revoked"]): int(t["baseline"]) - int(t["cover_size"]) for t in table}
        assert all(gaps[r] > 0 for r in rs if 1 < r <= n // 2)
        assert gaps[0] == n - 1 and gaps[n] == 0
        assert time.perf_counter() - start < 10


class Network:
    def __init__(self, vehicles: int, seed: int, height: int = 6):
        self.rng = random.Random(seed)
        self.s_trac, pk_trac = lea_keygen(SUITE, self.rng)
        self.trc, self.pp = trc_setup(SUITE, height, pk_trac, self.rng)
        self.vids = [b"NET-%04d" % i for i in range(vehicles)]
        self.hsms = []
        for vid in self.vids:
            h = HsmBoundary(self.rng)
            h.provision(self.pp, self.trc.register_vehicle(vid))
            self.hsms.append(h)
        self.rsu = RsuState(self.trc.register_rsu(b"acc-region"), self.pp, rng=self.rng)
        self.now = 50
        rsu_refresh(self.rsu, self.trc, self.now)

    def grant(self, i, now=None):
        now = self.now if now is None else now
        req = obu_ring_request(self.hsms[i], self.rsu.rid)
        return self.hsms[i].open_grant(self.rsu.rid, rsu_ring_gen(self.rsu, req.c1, req.c2, now))


def test_criterion_07_tracing():
    with criterion(7, "100 broadcasts with rings of 20 traced to the signer 100/100; random tag gives NoMatch"):
        net = Network(30, 7)
        grants = {}
        hits = 0
        for _ in range(100):
            i = net.rng.randrange(len(net.hsms))
            if i not in grants:
                grants[i] = net.grant(i)
            msg = obu_sign_broadcast(net.hsms[i], grants[i], b"trace me", net.now, 20, net.rng)
            hits += lea_trace(net.s_trac, msg, net.trc) == net.hsms[i].pid
        assert hits == 100
        forged = BroadcastMsg(msg.m, msg.sig, msg.ring, msg.t, SUITE.pair(SUITE.P, SUITE.Q) ** net.rng.randrange(1, SUITE.q))
        with pytest.raises(NoMatch):
            lea_trace(net.s_trac, forged, net.trc)


def test_criterion_08_revocation_life_cycle():
    with criterion(8, "revoke, refresh, then the ring request is rejected as revoked"):
        net = Network(8, 8, height=3)
        later = net.now + 60
        trc_revoke_vid(net.trc, net.vids[3], later)
        # before the RSU refreshes it still serves the vehicle: the freshness window
        assert net.hsms[3].pid in net.grant(3, later).members
        rsu_refresh(net.rsu, net.trc, later)
        with pytest.raises(RevokedVehicle):
            net.grant(3, later)
        assert net.hsms[3].pid not in net.grant(0, later).members


@pytest.mark.slow
def test_criterion_09_performance_trends():
    with criterion(9, "linear sign/verify cost (R^2>=0.9), batch beats singles, gap grows with batch size"):
        start = time.perf_counter()
        reps = 100
        fx = Fixture(DEFAULT_SUITE, 30, seed=9)
        sizes = list(range(2, 31))
        sign = bench_sign(fx, sizes, reps)
        verify = bench_verify(fx, sizes, reps)
        batch = bench_batch(fx, [2, 10, 20, 30], [10, 20], reps)
        buf = io.StringIO()
        write_csv(sign + verify + batch, CSV_FIELDS, buf)
        print("\n" + buf.getvalue())
        for rows in (sign, verify):
            slope, _, r2 = linear_fit([r.ring_size for r in rows], [r.median_wall_ms for r in rows])
            print(f"{rows[0].op}: slope {slope:.4f} ms/member, R^2 {r2:.4f}")
            assert slope > 0 and r2 >= 0.9
        t = {(r.op, r.ring_size, r.eta): r.median_wall_ms for r in batch}
        for n in (2, 10, 20, 30):
            gaps = {}
            for eta in (10, 20):
                assert t["batch-verify", n, eta] < t["single-verify", n, eta]
                gaps[eta] = t["single-verify", n, eta] - t["batch-verify", n, eta]
            assert gaps[20] > gaps[10]
        assert all(r.reps >= 100 for r in sign + verify + batch)
        assert time.perf_counter() - start < 600


def test_criterion_10_wire_sizes_and_golden():
    with criterion(10, "signature size is one G1 point per member plus a constant; golden bytes match"):
        for sid in SUITES:
            s = get_suite(sid)
            rng = random.Random(10)
            sizes = []
            for n in range(1, 31):
                sig = RingSignature(tuple(rng.randrange(1, s.q) * s.P for _ in range(n)), s.P)
                sizes.append(len(sig.encode()))
            a = sizes[1] - sizes[0]
            b = sizes[0] - a
            assert a == s.g1.size
            assert all(sz == a * n + b for n, sz in zip(range(1, 31), sizes))
            for name, obj in sample_messages(sid).items():
                assert wire.encode(obj) == bytes.fromhex(golden_path(sid, name).read_text().strip())


def test_criterion_11_replay():
    with criterion(11, "stale messages rejected with zero pairings; re-timestamped signature rejected"):
        net = Network(6, 11, height=3)
        msg = obu_sign_broadcast(net.hsms[0], net.grant(0), b"brake", net.now, 4, net.rng)
        rx = Receiver(net.pp)
        with count_pairings(SUITE) as c:
            assert rx.receive(msg, net.now + 301) is Verdict.STALE
            assert rx.batch_process([msg], net.now + 10_000) == [Verdict.STALE]
        assert c.count == 0
        later = net.now + 5000
        moved = BroadcastMsg(msg.m, msg.sig, msg.ring, later, msg.tag)
        assert rx.receive(moved, later) is Verdict.BAD_SIGNATURE
        assert rx.receive(msg, net.now) is Verdict.ACCEPT
