from __future__ import annotations

from functools import lru_cache

from ringveil.pairing.core import (
    DST_IBE,
    DST_PID,
    DST_RID,
    DST_RINGSIG,
    DST_TAG,
    HASH_CONFIG_ID,
    G1Elem,
    G2Elem,
    GTElem,
    PairingSuite,
    count_pairings,
    gt_exp,
    hash_to_g1,
    hash_to_g2,
    hash_to_scalar,
    random_scalar,
    scalar_from_bytes,
    scalar_hasher,
    scalar_inverse,
    scalar_to_bytes,
)

SUITES = ("bls12-381", "bn254")
DEFAULT_SUITE = "bls12-381"


@lru_cache(maxsize=None)
def get_suite(suite_id: str = DEFAULT_SUITE) -> PairingSuite:
    """Return the (process-wide singleton) suite for ``suite_id``."""
    if suite_id == "bls12-381":
        from ringveil.pairing.bls12_381 import Bls12381

        return Bls12381()
    if suite_id == "bn254":
        from ringveil.pairing.bn254 import Bn254

        return Bn254()
    raise ValueError(f"unknown pairing suite {suite_id!r}; choose from {SUITES}")


def suite_by_wire_id(wire_id: int) -> PairingSuite:
    for sid in SUITES:
        s = get_suite(sid)
        if s.wire_id == wire_id:
            return s
    raise ValueError(f"unknown suite wire id {wire_id}")


def pair(a: G1Elem, b: G2Elem) -> GTElem:
    return a.suite.pair(a, b)


__all__ = [
    "DST_IBE", "DST_PID", "DST_RID", "DST_RINGSIG", "DST_TAG", "HASH_CONFIG_ID",
    "G1Elem", "G2Elem", "GTElem", "PairingSuite", "SUITES", "DEFAULT_SUITE",
    "count_pairings", "get_suite", "gt_exp", "hash_to_g1", "hash_to_g2",
    "hash_to_scalar", "pair", "random_scalar", "scalar_from_bytes", "scalar_hasher",
    "scalar_inverse", "scalar_to_bytes", "suite_by_wire_id",
]
