"""Law Enforcement Authority: tracing key and tag opening."""

from __future__ import annotations

from ringveil.errors import AmbiguousMatch, NoMatch
from ringveil.messages import BroadcastMsg
from ringveil.pairing import G1Elem, G2Elem, PairingSuite, random_scalar, scalar_inverse

from .trc import TrcState


def lea_keygen(suite: PairingSuite, rng=None) -> tuple[int, G2Elem]:
    s_trac = random_scalar(suite, rng)
    return s_trac, s_trac * suite.Q


def lea_trace(s_trac: int, msg: BroadcastMsg, trc: TrcState) -> G1Elem:
    """Return the ring member that produced ``msg``.

    The LEA strips its key off the tag; the TRC, which alone maps pseudonyms
    to real identities, supplies one candidate per ring member.
    """
    suite = msg.tag.suite
    opened = msg.tag ** scalar_inverse(suite, s_trac)
    cands = trc.trace_candidates(msg.ring, msg.t)
    hits = [pid for pid, c in zip(msg.ring, cands) if c == opened]
    if not hits:
        raise NoMatch("tag matches no ring member")
    if len(hits) > 1:
        raise AmbiguousMatch(f"tag matches {len(hits)} ring members")
    return hits[0]
