"""Key pairs for the two signature domains, addresses and signing ops.

Identity keys are Ed25519 (backs the JsonWebKey verification method); wallet
keys are secp256k1 with recovery (backs EcdsaSecp256k1RecoveryMethod2020 and
the 0x account address). Wallet signing applies the personal-message prefix
so any signed blob is domain-separated from raw transactions.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from medsim.crypto import secp256k1
from medsim.crypto.keccak import keccak256
from medsim.errors import InvalidSeedError, MalformedSignatureError

PERSONAL_MESSAGE_PREFIX = b"\x19Ethereum Signed Message:\n"


@dataclass(frozen=True)
class IdentityKeyPair:
    secret: bytes  # 32-byte Ed25519 seed
    public: bytes  # 32-byte public key

    def __post_init__(self):
        if len(self.secret) != 32 or len(self.public) != 32:
            raise InvalidSeedError("identity key material must be 32 bytes")


@dataclass(frozen=True)
class WalletKeyPair:
    secret: bytes  # 32-byte big-endian scalar
    public: bytes  # 64-byte uncompressed point, no 0x04 prefix

    def __post_init__(self):
        if len(self.secret) != 32:
            raise InvalidSeedError("wallet secret must be 32 bytes")
        if len(self.public) != 64:
            raise InvalidSeedError("wallet public key must be 64 bytes")

    @property
    def secret_scalar(self) -> int:
        return int.from_bytes(self.secret, "big")


@dataclass(frozen=True)
class Eoa:
    raw: bytes

    def __post_init__(self):
        if len(self.raw) != 20:
            raise ValueError("account address must be 20 bytes")

    @property
    def hex(self) -> str:
        return "0x" + self.raw.hex()

    @classmethod
    def parse(cls, text: str) -> "Eoa":
        if not text.lower().startswith("0x") or len(text) != 42:
            raise ValueError(f"not a 0x-prefixed 20-byte address: {text!r}")
        return cls(bytes.fromhex(text[2:]))

    def __str__(self) -> str:
        return self.hex


@dataclass(frozen=True)
class Signature:
    scheme: str  # "identity" | "wallet"
    data: bytes  # 64 bytes (identity: r||s ed25519; wallet: r||s secp256k1)
    recovery_id: int | None = None  # wallet only

    def __post_init__(self):
        if self.scheme not in ("identity", "wallet"):
            raise ValueError(f"unknown signature scheme: {self.scheme}")
        if self.scheme == "wallet" and self.recovery_id is None:
            raise ValueError("wallet signatures carry a recovery id")

    @property
    def hex(self) -> str:
        if self.scheme == "wallet":
            return (self.data + bytes([27 + self.recovery_id])).hex()
        return self.data.hex()

    @classmethod
    def from_hex(cls, scheme: str, text: str) -> "Signature":
        try:
            raw = bytes.fromhex(text.removeprefix("0x"))
        except ValueError as exc:
            raise MalformedSignatureError(f"signature is not hex: {exc}") from exc
        if scheme == "wallet":
            if len(raw) != 65:
                raise MalformedSignatureError("wallet signature must be 65 bytes r||s||v")
            v = raw[64]
            if v >= 27:
                v -= 27
            if v not in (0, 1, 2, 3):
                raise MalformedSignatureError(f"recovery byte out of range: {raw[64]}")
            return cls("wallet", raw[:64], v)
        if len(raw) != 64:
            raise MalformedSignatureError("identity signature must be 64 bytes")
        return cls("identity", raw)


# -- identity (Ed25519) ------------------------------------------------------

def generate_identity_keypair(seed: bytes | None = None) -> IdentityKeyPair:
    if seed is None:
        seed = secrets.token_bytes(32)
    elif len(seed) != 32:
        raise InvalidSeedError("identity seed must be exactly 32 bytes")
    private = Ed25519PrivateKey.from_private_bytes(seed)
    public = private.public_key().public_bytes_raw()
    return IdentityKeyPair(secret=seed, public=public)


def sign_identity(secret: bytes, message: bytes) -> Signature:
    private = Ed25519PrivateKey.from_private_bytes(secret)
    return Signature("identity", private.sign(message))


def verify_identity(public: bytes, message: bytes, sig: Signature) -> bool:
    if sig.scheme != "identity":
        raise MalformedSignatureError("expected an identity-scheme signature")
    if len(sig.data) != 64:
        raise MalformedSignatureError("identity signature must be 64 bytes")
    try:
        Ed25519PublicKey.from_public_bytes(public).verify(sig.data, message)
        return True
    except InvalidSignature:
        return False


# -- wallet (secp256k1 + recovery) -------------------------------------------

def generate_wallet_keypair(seed: bytes | None = None) -> WalletKeyPair:
    if seed is None:
        while True:
            seed = secrets.token_bytes(32)
            scalar = int.from_bytes(seed, "big")
            if 1 <= scalar < secp256k1.N:
                break
    elif len(seed) != 32:
        raise InvalidSeedError("wallet seed must be exactly 32 bytes")
    scalar = int.from_bytes(seed, "big")
    if not 1 <= scalar < secp256k1.N:
        raise InvalidSeedError("wallet seed is not a valid curve scalar")
    x, y = secp256k1.public_key(scalar)
    return WalletKeyPair(secret=seed, public=x.to_bytes(32, "big") + y.to_bytes(32, "big"))


def derive_eoa(public: bytes) -> Eoa:
    """Account address: last 20 bytes of Keccak-256 of the 64-byte public key."""
    if len(public) != 64:
        raise ValueError("public key must be 64 bytes (x || y)")
    point = (int.from_bytes(public[:32], "big"), int.from_bytes(public[32:], "big"))
    if not secp256k1.is_on_curve(point):
        raise ValueError("public key point is not on the curve")
    return Eoa(keccak256(public)[12:])


def eip191_digest(message: bytes) -> bytes:
    prefixed = PERSONAL_MESSAGE_PREFIX + str(len(message)).encode("ascii") + message
    return keccak256(prefixed)


def sign_wallet(secret: bytes, message: bytes) -> Signature:
    if not message:
        raise ValueError("refusing to sign an empty message")
    scalar = int.from_bytes(secret, "big")
    r, s, rec = secp256k1.sign_digest(scalar, eip191_digest(message))
    return Signature("wallet", r.to_bytes(32, "big") + s.to_bytes(32, "big"), rec)


def recover_wallet(message: bytes, sig: Signature) -> Eoa:
    """Address of the key that produced `sig` over the prefixed message."""
    if sig.scheme != "wallet":
        raise MalformedSignatureError("expected a wallet-scheme signature")
    if len(sig.data) != 64:
        raise MalformedSignatureError("wallet signature must carry 64 scalar bytes")
    r = int.from_bytes(sig.data[:32], "big")
    s = int.from_bytes(sig.data[32:], "big")
    x, y = secp256k1.recover_public_key(eip191_digest(message), r, s, sig.recovery_id)
    return derive_eoa(x.to_bytes(32, "big") + y.to_bytes(32, "big"))


def verify_wallet(eoa: Eoa, message: bytes, sig: Signature) -> bool:
    """True iff the recovered signer address equals `eoa`.

    Structurally malformed signatures raise; signatures that are merely
    arithmetically invalid verify as False.
    """
    if sig.scheme != "wallet":
        raise MalformedSignatureError("expected a wallet-scheme signature")
    if len(sig.data) != 64 or sig.recovery_id not in (0, 1, 2, 3):
        raise MalformedSignatureError("wallet signature must be r||s plus recovery id")
    try:
        recovered = recover_wallet(message, sig)
    except ValueError:
        return False
    return recovered == eoa
