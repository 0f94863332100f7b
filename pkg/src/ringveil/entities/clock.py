"""Simulated-time constants shared by every role (integer seconds)."""

EPOCH_SECONDS = 3600
FRESHNESS_WINDOW = 300
GRANT_VALIDITY = 3600
DEFAULT_LIST_SIZE = 100
REPLAY_CACHE_SIZE = 1 << 16


def epoch_of(now: int) -> int:
    if now < 0:
        raise ValueError("simulated time starts at 0")
    return now // EPOCH_SECONDS
