"""Exception hierarchy shared by every ringveil module."""


class RingveilError(Exception):
    """Base class for all library errors."""


# pairing / scalar arithmetic
class ZeroScalar(RingveilError, ZeroDivisionError):
    pass


class SubgroupCheckFailed(RingveilError, ValueError):
    """Bytes do not decode to an element of the prime-order subgroup."""


# symmetric layer
class LengthTooLarge(RingveilError, ValueError):
    pass


class AuthFailure(RingveilError):
    pass


# identity-based keys
class DuplicateIdentity(RingveilError):
    pass


class TreeFull(RingveilError):
    pass


class MalformedCiphertext(RingveilError):
    pass


class InvalidPid(RingveilError):
    pass


# ring signatures
class IndexOutOfRange(RingveilError, IndexError):
    pass


class SignerMismatch(RingveilError):
    pass


class LengthMismatch(RingveilError, ValueError):
    pass


class EmptyBatch(RingveilError, ValueError):
    pass


class DuplicateMember(RingveilError, ValueError):
    pass


# revocation tree
class NotALeaf(RingveilError, ValueError):
    pass


class UnknownPid(RingveilError, KeyError):
    pass


class UnknownVid(RingveilError, KeyError):
    pass


# protocol entities
class NotProvisioned(RingveilError):
    pass


class RequestRejected(RingveilError):
    """An RSU refused a ring-list request. ``reason`` is a stable code."""

    reason = "rejected"


class RevokedVehicle(RequestRejected):
    reason = "revoked"


class StaleKeyUpdate(RequestRejected):
    reason = "stale-key-update"


class MalformedRequest(RequestRejected):
    reason = "malformed"


class UnregisteredPid(RequestRejected, UnknownPid):
    reason = "unknown-pid"


class GrantExpired(RingveilError):
    pass


class RingTooSmall(RingveilError, ValueError):
    pass


class SelfNotInList(RingveilError):
    pass


class NoMatch(RingveilError):
    pass


class AmbiguousMatch(RingveilError):
    pass


# wire format
class WireError(RingveilError, ValueError):
    pass


class TruncatedFrame(WireError):
    pass


class BadVersion(WireError):
    pass


class BadType(WireError):
    pass


class TrailingBytes(WireError):
    pass


class MalformedField(WireError):
    """Structurally complete frame whose field contents violate an invariant."""


class WireSubgroupCheckFailed(WireError, SubgroupCheckFailed):
    pass
