"""Symmetric channel primitives keyed from a pairing-derived GT secret.

AES-256-GCM for encryption, HMAC-SHA256 for the explicit MAC, HKDF-SHA512
for key derivation.  Ciphertexts are laid out as ``nonce || body || gcm-tag``.
"""

from __future__ import annotations

import hmac
from hashlib import sha256

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ringveil.errors import AuthFailure, LengthTooLarge
from ringveil.pairing import GTElem

KEY_LEN = 32
NONCE_LEN = 12
MAC_LEN = 32
GCM_TAG_LEN = 16
MAX_KDF_LEN = 8192

CTX_ENC = b"ringlist-enc"
CTX_MAC = b"ringlist-mac"
CTX_NONCE = b"nonce"

_KDF_SALT = b"ringveil-v1-kdf"


def kdf(secret: GTElem | bytes, context: bytes, out_len: int) -> bytes:
    if out_len < 0:
        raise ValueError("out_len must be non-negative")
    if out_len > MAX_KDF_LEN:
        raise LengthTooLarge(f"out_len {out_len} > {MAX_KDF_LEN}")
    if out_len == 0:
        return b""
    ikm = bytes(secret)
    return HKDF(algorithm=hashes.SHA512(), length=out_len, salt=_KDF_SALT, info=bytes(context)).derive(ikm)


class SymKey(bytes):
    """A 32-byte symmetric key."""

    def __new__(cls, key_bytes: bytes):
        if len(key_bytes) != KEY_LEN:
            raise ValueError(f"SymKey must be {KEY_LEN} bytes")
        return super().__new__(cls, key_bytes)

    def __repr__(self) -> str:
        return "SymKey(<redacted>)"


class MacTag(bytes):
    def __new__(cls, tag_bytes: bytes):
        if len(tag_bytes) != MAC_LEN:
            raise ValueError(f"MacTag must be {MAC_LEN} bytes")
        return super().__new__(cls, tag_bytes)


def channel_keys(secret: GTElem) -> tuple[SymKey, SymKey]:
    """(encryption key, MAC key) derived from one shared GT secret."""
    return SymKey(kdf(secret, CTX_ENC, KEY_LEN)), SymKey(kdf(secret, CTX_MAC, KEY_LEN))


def derive_nonce(secret: GTElem | bytes, counter: int, label: bytes = b"") -> bytes:
    """Deterministic per-message nonce: kdf(secret, "nonce" || label || counter)."""
    return kdf(secret, CTX_NONCE + label + counter.to_bytes(8, "big"), NONCE_LEN)


def sym_encrypt(k: bytes, plaintext: bytes, nonce: bytes) -> bytes:
    if len(nonce) != NONCE_LEN:
        raise ValueError("nonce must be 12 bytes")
    return bytes(nonce) + AESGCM(bytes(k)).encrypt(bytes(nonce), bytes(plaintext), None)


def sym_decrypt(k: bytes, ciphertext: bytes, nonce: bytes | None = None) -> bytes:
    """Inverse of :func:`sym_encrypt`.

    When ``nonce`` is given it is used for decryption and must match the
    embedded one; otherwise the embedded nonce is used.
    """
    if len(ciphertext) < NONCE_LEN + GCM_TAG_LEN:
        raise AuthFailure("ciphertext too short")
    embedded, body = ciphertext[:NONCE_LEN], ciphertext[NONCE_LEN:]
    use = embedded if nonce is None else bytes(nonce)
    if len(use) != NONCE_LEN:
        raise AuthFailure("bad nonce length")
    try:
        pt = AESGCM(bytes(k)).decrypt(use, bytes(body), None)
    except InvalidTag:
        raise AuthFailure("ciphertext failed authentication") from None
    if not hmac.compare_digest(embedded, use):
        raise AuthFailure("nonce mismatch")
    return pt


def mac(k: bytes, message: bytes) -> MacTag:
    return MacTag(hmac.new(bytes(k), bytes(message), sha256).digest())


def mac_verify(k: bytes, message: bytes, tag: bytes) -> bool:
    return hmac.compare_digest(mac(k, message), bytes(tag))


__all__ = [
    "AuthFailure", "MacTag", "SymKey", "channel_keys", "derive_nonce", "kdf", "mac",
    "mac_verify", "sym_decrypt", "sym_encrypt",
]
