"""Simulated verifiable data registry: the DID method lifecycle, append-only.

Identifiers use method name ``medsim``; the method-specific id is the base58
SHA-256 of the initial document's canonical serialization, so a document can
only ever be created at the id it hashes to.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field, replace

from medsim.crypto.keys import Eoa, Signature, verify_identity
from medsim.encoding import b58_encode, b64url_decode, b64url_encode, canonical_json
from medsim.errors import (
    DidDeactivatedError,
    DidNotFoundError,
    DuplicateDidError,
    InvalidProofError,
    MalformedDocumentError,
)

METHOD_NAME = "medsim"

TYPE_IDENTITY_KEY = "JsonWebKey"
TYPE_WALLET_ACCOUNT = "EcdsaSecp256k1RecoveryMethod2020"

IDENTITY_FRAGMENT = "identity-key"
WALLET_FRAGMENT = "wallet"


@dataclass(frozen=True)
class Did:
    method_specific_id: str
    method_name: str = METHOD_NAME

    def __str__(self) -> str:
        return f"did:{self.method_name}:{self.method_specific_id}"

    @classmethod
    def parse(cls, text: str) -> "Did":
        parts = text.split(":")
        if len(parts) != 3 or parts[0] != "did" or not parts[1] or not parts[2]:
            raise MalformedDocumentError(f"not a did:<method>:<id> identifier: {text!r}")
        return cls(method_name=parts[1], method_specific_id=parts[2])


@dataclass(frozen=True)
class VerificationMethod:
    fragment: str
    type: str
    material: dict | str  # publicKeyJwk for identity keys, account id for wallets

    def to_dict(self, did: str) -> dict:
        entry = {"id": f"{did}#{self.fragment}", "type": self.type}
        if self.type == TYPE_IDENTITY_KEY:
            entry["publicKeyJwk"] = self.material
        else:
            entry["blockchainAccountId"] = self.material
        return entry

    @classmethod
    def from_dict(cls, entry: dict) -> "VerificationMethod":
        vm_id = entry.get("id", "")
        fragment = vm_id.split("#", 1)[1] if "#" in vm_id else vm_id
        vm_type = entry.get("type")
        if vm_type == TYPE_IDENTITY_KEY:
            material = entry.get("publicKeyJwk")
            if not isinstance(material, dict):
                raise MalformedDocumentError("JsonWebKey method needs a publicKeyJwk object")
        elif vm_type == TYPE_WALLET_ACCOUNT:
            material = entry.get("blockchainAccountId")
            if not isinstance(material, str):
                raise MalformedDocumentError("recovery method needs a blockchainAccountId")
        else:
            raise MalformedDocumentError(f"unsupported verification method type: {vm_type!r}")
        if not fragment:
            raise MalformedDocumentError("verification method id needs a fragment")
        return cls(fragment=fragment, type=vm_type, material=material)


def identity_jwk(public: bytes) -> dict:
    return {"kty": "OKP", "crv": "Ed25519", "x": b64url_encode(public)}


@dataclass(frozen=True)
class DidDocument:
    verification_methods: tuple[VerificationMethod, ...]
    id: Did | None = None
    deactivated: bool = False

    def to_dict(self, include_id: bool = True) -> dict:
        did = str(self.id) if self.id else ""
        doc = {
            "id": did if include_id else "",
            "verificationMethod": [vm.to_dict(did) for vm in self.verification_methods],
        }
        if self.deactivated:
            doc["deactivated"] = True
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DidDocument":
        methods = doc.get("verificationMethod")
        if not isinstance(methods, list) or not methods:
            raise MalformedDocumentError("document needs a verificationMethod list")
        parsed = tuple(VerificationMethod.from_dict(m) for m in methods)
        raw_id = doc.get("id") or None
        return cls(
            verification_methods=parsed,
            id=Did.parse(raw_id) if raw_id else None,
            deactivated=bool(doc.get("deactivated", False)),
        )

    def _methods_of_type(self, vm_type: str) -> list[VerificationMethod]:
        return [vm for vm in self.verification_methods if vm.type == vm_type]

    def is_member_shaped(self) -> bool:
        """Exactly one identity key and exactly one wallet account."""
        return (
            len(self._methods_of_type(TYPE_IDENTITY_KEY)) == 1
            and len(self._methods_of_type(TYPE_WALLET_ACCOUNT)) == 1
        )

    def identity_public_key(self) -> bytes:
        methods = self._methods_of_type(TYPE_IDENTITY_KEY)
        if len(methods) != 1:
            raise MalformedDocumentError("document does not hold exactly one identity key")
        jwk = methods[0].material
        if jwk.get("kty") != "OKP" or jwk.get("crv") != "Ed25519":
            raise MalformedDocumentError("identity key must be an Ed25519 OKP JWK")
        key = b64url_decode(jwk["x"])
        if len(key) != 32:
            raise MalformedDocumentError("identity public key must be 32 bytes")
        return key

    def eoa(self) -> Eoa:
        methods = self._methods_of_type(TYPE_WALLET_ACCOUNT)
        if len(methods) != 1:
            raise MalformedDocumentError("document does not hold exactly one wallet account")
        return Eoa.parse(methods[0].material)


def member_document(identity_public: bytes, eoa: Eoa) -> DidDocument:
    """The two-method document every ecosystem member publishes."""
    return DidDocument(
        verification_methods=(
            VerificationMethod(IDENTITY_FRAGMENT, TYPE_IDENTITY_KEY, identity_jwk(identity_public)),
            VerificationMethod(WALLET_FRAGMENT, TYPE_WALLET_ACCOUNT, eoa.hex),
        )
    )


def update_proof_message(did: str, new_doc: DidDocument) -> bytes:
    return b"vdr-update:" + did.encode() + b":" + canonical_json(new_doc.to_dict(include_id=False))


def deactivate_proof_message(did: str) -> bytes:
    return b"vdr-deactivate:" + did.encode()


class Vdr:
    """Single-writer registry; document history is append-only."""

    def __init__(self):
        self._lock = threading.RLock()
        self._versions: dict[str, list[DidDocument]] = {}

    def create(self, document: DidDocument) -> Did:
        if document.deactivated:
            raise MalformedDocumentError("cannot create a deactivated document")
        if not document.verification_methods:
            raise MalformedDocumentError("document needs at least one verification method")
        digest = hashlib.sha256(canonical_json(document.to_dict(include_id=False))).digest()
        did = Did(method_specific_id=b58_encode(digest))
        with self._lock:
            if str(did) in self._versions:
                raise DuplicateDidError(f"already registered: {did}")
            self._versions[str(did)] = [replace(document, id=did)]
        return did

    def resolve(self, did: Did | str) -> DidDocument:
        """Latest version; a deactivated DID resolves with the flag set."""
        with self._lock:
            versions = self._versions.get(str(did))
            if not versions:
                raise DidNotFoundError(f"unknown DID: {did}")
            return versions[-1]

    def _check_proof(self, current: DidDocument, message: bytes, proof: Signature) -> None:
        if current.deactivated:
            raise DidDeactivatedError(f"DID is deactivated: {current.id}")
        if proof.scheme != "identity":
            raise InvalidProofError("registry proofs use the identity key")
        if not verify_identity(current.identity_public_key(), message, proof):
            raise InvalidProofError("proof does not verify under the registered identity key")

    def update(self, did: Did | str, new_doc: DidDocument, proof: Signature) -> None:
        with self._lock:
            current = self.resolve(did)
            self._check_proof(current, update_proof_message(str(did), new_doc), proof)
            self._versions[str(did)].append(replace(new_doc, id=current.id, deactivated=False))

    def deactivate(self, did: Did | str, proof: Signature) -> None:
        with self._lock:
            current = self.resolve(did)
            self._check_proof(current, deactivate_proof_message(str(did)), proof)
            self._versions[str(did)].append(replace(current, deactivated=True))

    def history(self, did: Did | str) -> list[DidDocument]:
        with self._lock:
            versions = self._versions.get(str(did))
            if not versions:
                raise DidNotFoundError(f"unknown DID: {did}")
            return list(versions)
