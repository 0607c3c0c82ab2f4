"""Compact JWT envelopes signed with the Ed25519 identity key (alg EdDSA)."""

from __future__ import annotations

import json
from typing import Any

from medsim.crypto.keys import Signature, sign_identity, verify_identity
from medsim.encoding import b64url_decode, b64url_encode, canonical_json
from medsim.errors import CryptoError


class JwtError(CryptoError):
    pass


def encode_jwt(header: dict[str, Any], payload: dict[str, Any], identity_secret: bytes) -> str:
    header = {"alg": "EdDSA", "typ": "JWT", **header}
    signing_input = b64url_encode(canonical_json(header)) + "." + b64url_encode(canonical_json(payload))
    sig = sign_identity(identity_secret, signing_input.encode("ascii"))
    return signing_input + "." + b64url_encode(sig.data)


def decode_jwt(token: str) -> tuple[dict, dict, bytes, bytes]:
    """Split without verifying: (header, payload, signing_input, signature)."""
    parts = token.split(".")
    if len(parts) != 3 or not all(parts):
        raise JwtError("token is not a three-part compact JWT")
    try:
        header = json.loads(b64url_decode(parts[0]))
        payload = json.loads(b64url_decode(parts[1]))
        signature = b64url_decode(parts[2])
    except (ValueError, json.JSONDecodeError) as exc:
        raise JwtError(f"undecodable JWT segment: {exc}") from exc
    if not isinstance(header, dict) or not isinstance(payload, dict):
        raise JwtError("JWT header and payload must be JSON objects")
    signing_input = (parts[0] + "." + parts[1]).encode("ascii")
    return header, payload, signing_input, signature


def verify_jwt(token: str, identity_public: bytes) -> tuple[dict, dict]:
    """Decode and check the EdDSA signature; raises JwtError when invalid."""
    header, payload, signing_input, signature = decode_jwt(token)
    if header.get("alg") != "EdDSA":
        raise JwtError(f"unsupported JWT alg: {header.get('alg')!r}")
    if len(signature) != 64:
        raise JwtError("EdDSA signature must be 64 bytes")
    if not verify_identity(identity_public, signing_input, Signature("identity", signature)):
        raise JwtError("JWT signature verification failed")
    return header, payload
