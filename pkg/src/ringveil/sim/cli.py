"""``ringveil`` command line: setup, scenario, bench, keyupdate-size, trace-demo."""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import random
import sys

from ringveil import wire
from ringveil.pairing import SUITES, get_suite

from .bench import (
    CSV_FIELDS,
    KU_FIELDS,
    Fixture,
    bench_batch,
    bench_sign,
    bench_verify,
    default_revoked_counts,
    keyupdate_sizes,
    linear_fit,
    write_csv,
)
from .config import ENV_PREFIX, ConfigError, load_config
from .scenario import report_json, run_scenario


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (int(x) for x in part.split("-", 1))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _env(name: str, default=None):
    return os.environ.get(ENV_PREFIX + name, default)


@contextlib.contextmanager
def _output(path: str | None, binary: bool = False):
    if path is None or path == "-":
        yield sys.stdout.buffer if binary else sys.stdout
    else:
        with open(path, "wb" if binary else "w", encoding=None if binary else "utf-8", newline=None) as fh:
            yield fh


def cmd_setup(args) -> int:
    from ringveil.entities import lea_keygen, trc_setup
    suite = get_suite(args.suite)
    rng = random.Random(f"{args.seed}/protocol")
    _, pk_trac = lea_keygen(suite, rng)
    _, pp = trc_setup(suite, args.height, pk_trac, rng)
    frame = wire.encode(pp)
    if args.out:
        with _output(args.out, binary=True) as fh:
            fh.write(frame)
    else:
        print(frame.hex())
    return 0


def cmd_scenario(args) -> int:
    overrides = {
        "suite": args.suite, "height": args.height, "seed": args.seed,
        "vehicles": args.vehicles, "rsus": args.rsus, "loss": args.loss,
        "ring_sizes": tuple(args.ring_sizes) if args.ring_sizes else None,
        "batch_sizes": tuple(args.batch_sizes) if args.batch_sizes else None,
    }
    try:
        cfg = load_config(args.config or _env("CONFIG"), overrides)
    except (ConfigError, OSError) as exc:
        print(f"ringveil: invalid configuration: {exc}", file=sys.stderr)
        return 2
    report = run_scenario(cfg)
    with _output(args.out) as fh:
        fh.write(report_json(report))
    return 1 if report["violations"] else 0


def cmd_bench(args) -> int:
    if args.reps < 30:
        print("ringveil: --reps must be at least 30", file=sys.stderr)
        return 2
    sizes = args.ring_sizes or list(range(2, 31))
    fx = Fixture(args.suite, max(sizes), args.seed)
    rows = []
    if args.op in ("sign", "all"):
        rows += bench_sign(fx, sizes, args.reps)
    if args.op in ("verify", "all"):
        rows += bench_verify(fx, sizes, args.reps)
    if args.op in ("batch", "all"):
        rows += bench_batch(fx, args.batch_ring_sizes or sizes, args.etas, args.reps)
    with _output(args.out) as fh:
        write_csv(rows, CSV_FIELDS, fh)
    for op in ("sign", "verify"):
        pts = [(r.ring_size, r.median_wall_ms) for r in rows if r.op == op]
        if len(pts) >= 3:
            slope, icpt, r2 = linear_fit(*zip(*pts))
            print(f"{op}: {slope:.4f} ms per member + {icpt:.3f} ms, R^2 = {r2:.4f}", file=sys.stderr)
    return 0


def cmd_keyupdate_size(args) -> int:
    counts = args.revoked if args.revoked else default_revoked_counts(args.n)
    try:
        rows = keyupdate_sizes(args.n, counts, args.seed)
    except ValueError as exc:
        print(f"ringveil: {exc}", file=sys.stderr)
        return 2
    with _output(args.out) as fh:
        write_csv(rows, KU_FIELDS, fh)
    return 0


def cmd_trace_demo(args) -> int:
    from ringveil.entities import (
        HsmBoundary, RingListGrant, lea_keygen, lea_trace, obu_sign_broadcast, trc_setup,
    )
    suite = get_suite(args.suite)
    rng = random.Random(f"{args.seed}/protocol")
    s_trac, pk_trac = lea_keygen(suite, rng)
    trc, pp = trc_setup(suite, args.height, pk_trac, rng)
    n = args.ring_size
    if n > trc.bt.n_leaves:
        print(f"ringveil: ring of {n} does not fit a tree of height {args.height}", file=sys.stderr)
        return 2
    hsms = []
    for i in range(n):
        h = HsmBoundary(rng)
        h.provision(pp, trc.register_vehicle(f"VID-{i:06d}".encode()))
        hsms.append(h)
    signer = rng.randrange(n)
    grant = RingListGrant(tuple(h.pid for h in hsms), expiry=3600)
    msg = obu_sign_broadcast(hsms[signer], grant, b"trace demo", 0, n, rng)
    pid = lea_trace(s_trac, msg, trc)
    result = {
        "suite": suite.suite_id,
        "ring_size": n,
        "signer_vid": trc.vid_of(hsms[signer].pid).decode(),
        "traced_vid": trc.vid_of(pid).decode(),
        "ring_position": msg.ring.index(pid),
        "match": pid == hsms[signer].pid,
        "message_bytes": len(wire.encode(msg)),
    }
    with _output(args.out) as fh:
        fh.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
    return 0 if result["match"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--suite", choices=SUITES, default=_env("SUITE", "bls12-381"))
    common.add_argument("--height", type=int, default=int(_env("HEIGHT", 6)))
    common.add_argument("--seed", type=int, default=int(_env("SEED", 0)))
    common.add_argument("--out", default=_env("OUT"), help="output path (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ringveil", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("setup", parents=[common], help="generate public parameters")
    sp.set_defaults(func=cmd_setup)

    sp = sub.add_parser("scenario", parents=[common], help="run the full protocol life cycle")
    sp.add_argument("--config", help="key = value file mirroring the scenario settings")
    sp.add_argument("--vehicles", type=int)
    sp.add_argument("--rsus", type=int)
    sp.add_argument("--loss", type=float)
    sp.add_argument("--ring-sizes", type=_int_list)
    sp.add_argument("--batch-sizes", type=_int_list)
    sp.set_defaults(func=cmd_scenario)

    sp = sub.add_parser("bench", parents=[common], help="timing sweeps as CSV")
    sp.add_argument("--op", choices=("sign", "verify", "batch", "all"), default="all")
    sp.add_argument("--ring-sizes", type=_int_list, help="e.g. 2-30")
    sp.add_argument("--batch-ring-sizes", type=_int_list)
    sp.add_argument("--etas", type=_int_list, default=[10, 20])
    sp.add_argument("--reps", type=int, default=100)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("keyupdate-size", parents=[common], help="cover size against the per-user baseline")
    sp.add_argument("--n", type=int, default=1024, help="number of leaves (power of two)")
    sp.add_argument("--revoked", type=_int_list, help="revoked counts to sweep")
    sp.set_defaults(func=cmd_keyupdate_size)

    sp = sub.add_parser("trace-demo", parents=[common], help="sign one broadcast and trace it")
    sp.add_argument("--ring-size", type=int, default=20)
    sp.set_defaults(func=cmd_trace_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.height < 1:
        print("ringveil: --height must be >= 1", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
