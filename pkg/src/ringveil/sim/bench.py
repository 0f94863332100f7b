"""Micro-benchmarks for signing, verification, batch verification and key-update size."""

from __future__ import annotations

import csv
import io
import math
import random
import statistics
import time
from dataclasses import asdict, dataclass, fields
from functools import partial

from ringveil.ibc import MasterSecret, issue_vehicle
from ringveil.pairing import count_pairings, get_suite
from ringveil.revocation import RevocationList, RevocationTree, kunodes
from ringveil.ringsig import SignedPayload, SubRing, random_scaling_batch_verify, ring_sign, ring_verify

MIN_REPS = 30


@dataclass(frozen=True)
class BenchRecord:
    op: str
    suite: str
    ring_size: int
    eta: int
    reps: int
    mean_wall_ms: float
    median_wall_ms: float
    mean_cpu_ms: float
    median_cpu_ms: float
    pairings: int
    bytes: int

    def __post_init__(self) -> None:
        if self.reps < MIN_REPS:
            raise ValueError(f"at least {MIN_REPS} repetitions required")


CSV_FIELDS = [f.name for f in fields(BenchRecord)]
KU_FIELDS = ["n_leaves", "revoked", "cover_size", "baseline", "bound"]


def write_csv(rows, header, out=None) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(asdict(r) if hasattr(r, "__dataclass_fields__") else r)
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def _measure(jobs, reps: int) -> list[BenchRecord]:
    """Time ``jobs`` round-robin so slow drift in machine load hits every row alike.

    Each job is ``(op, suite, ring_size, eta, fn, size)``.
    """
    counts = []
    for op, suite, n, eta, fn, size in jobs:
        with count_pairings(get_suite(suite)) as pc:
            fn()
        counts.append(pc.count)
    wall: list[list[float]] = [[] for _ in jobs]
    cpu: list[list[float]] = [[] for _ in jobs]
    for _ in range(reps):
        for i, job in enumerate(jobs):
            fn = job[4]
            w0, c0 = time.perf_counter(), time.process_time()
            fn()
            cpu[i].append((time.process_time() - c0) * 1e3)
            wall[i].append((time.perf_counter() - w0) * 1e3)
    return [
        BenchRecord(op, suite, n, eta, reps, statistics.fmean(w), statistics.median(w),
                    statistics.fmean(c), statistics.median(c), pc, size)
        for (op, suite, n, eta, _, size), w, c, pc in zip(jobs, wall, cpu, counts)
    ]


class Fixture:
    """Credentials for ``max_ring`` vehicles plus a cache of signatures per (ring size, index)."""

    def __init__(self, suite_id: str, max_ring: int, seed: int = 0) -> None:
        self.suite_id = suite_id
        self.suite = get_suite(suite_id)
        self.rng = random.Random(f"{seed}/bench")
        self.ms = MasterSecret.generate(self.suite, self.rng)
        bt = RevocationTree(max(1, math.ceil(math.log2(max(2, max_ring)))))
        self.creds = [issue_vehicle(self.ms, b"bench-%d" % i, bt) for i in range(max_ring)]
        self.tag = self.suite.gt_one()
        self._sigs: dict = {}

    @property
    def pk2(self):
        return self.ms.pk2

    def ring(self, n: int) -> SubRing:
        return SubRing([c.pid for c in self.creds[:n]])

    def signed(self, n: int, j: int = 0):
        key = (n, j)
        if key not in self._sigs:
            ring = self.ring(n)
            k = self.rng.randrange(n)
            payload = SignedPayload(b"bench message %d" % j, self.tag, 1000 + j)
            self._sigs[key] = (payload, ring, ring_sign(self.pk2, self.creds[k].psk, k, payload, ring, self.rng))
        return self._sigs[key]


def bench_sign(fx: Fixture, sizes, reps: int) -> list[BenchRecord]:
    jobs = []
    for n in sizes:
        payload, ring, sig = fx.signed(n)
        k = fx.rng.randrange(n)
        psk = fx.creds[k].psk
        fn = partial(ring_sign, fx.pk2, psk, k, payload, ring, fx.rng)
        jobs.append(("sign", fx.suite_id, n, 1, fn, len(sig.encode())))
    return _measure(jobs, reps)


def bench_verify(fx: Fixture, sizes, reps: int) -> list[BenchRecord]:
    jobs = []
    for n in sizes:
        payload, ring, sig = fx.signed(n)
        fn = partial(ring_verify, fx.pk2, payload, ring, sig)
        jobs.append(("verify", fx.suite_id, n, 1, fn, len(sig.encode())))
    return _measure(jobs, reps)


def _batch_jobs(fx: Fixture, n: int, eta: int) -> list[tuple]:
    items = [fx.signed(n, j) for j in range(eta)]
    ps, rs, ss = zip(*items)
    size = sum(len(s.encode()) for s in ss)

    def batch():
        assert random_scaling_batch_verify(fx.pk2, ps, rs, ss, fx.rng)

    def singles():
        for p, r, s in items:
            ring_verify(fx.pk2, p, r, s)

    return [("batch-verify", fx.suite_id, n, eta, batch, size),
            ("single-verify", fx.suite_id, n, eta, singles, size)]


def bench_batch(fx: Fixture, sizes, etas, reps: int) -> list[BenchRecord]:
    """Hardened batch verification next to the same signatures checked one by one."""
    jobs = [job for n in sizes for eta in etas for job in _batch_jobs(fx, n, eta)]
    return _measure(jobs, reps)


def linear_fit(xs, ys) -> tuple[float, float, float]:
    """(slope, intercept, R^2) of an ordinary least-squares line."""
    slope, intercept = statistics.linear_regression(xs, ys)
    r = statistics.correlation(xs, ys)
    return slope, intercept, r * r


# --- key-update size -------------------------------------------------------------

def ku_bound(n_leaves: int, r: int) -> float | None:
    if r < 1:
        return None
    return r * (math.log2(n_leaves / r) + 1)


def keyupdate_sizes(n_leaves: int, revoked_counts, seed: int = 0) -> list[dict]:
    """Cover size for a random revoked set of each size, next to the per-vehicle baseline."""
    if n_leaves < 2 or n_leaves & (n_leaves - 1):
        raise ValueError("N must be a power of two >= 2")
    height = n_leaves.bit_length() - 1
    bt = RevocationTree(height)
    rng = random.Random(f"{seed}/keyupdate")
    rows = []
    for r in revoked_counts:
        if not 0 <= r <= n_leaves:
            raise ValueError(f"revoked count {r} outside [0, {n_leaves}]")
        leaves = sorted(rng.sample(list(bt.leaves()), r))
        rl = RevocationList(tuple((v, 0) for v in leaves))
        bound = ku_bound(n_leaves, r)
        rows.append({
            "n_leaves": n_leaves,
            "revoked": r,
            "cover_size": len(kunodes(bt, rl, 0).cover),
            "baseline": n_leaves - r,
            "bound": "" if bound is None else f"{bound:.3f}",
        })
    return rows


def default_revoked_counts(n_leaves: int) -> list[int]:
    out = [0]
    r = 1
    while r <= n_leaves:
        out.append(r)
        r *= 2
    return out
