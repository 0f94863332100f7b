"""Identity-based ring signatures with batch verification and KUNodes revocation for VANETs."""

__version__ = "0.1.0"
