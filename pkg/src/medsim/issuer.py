"""Issuer service: challenge issuance, dual-signature verification, credential
creation as a JWT envelope, on-chain registration and revocation.

A credential is only ever released if the on-chain status registration
succeeded in the same request; a ledger revert aborts the issuance.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass

from medsim.clock import SystemClock
from medsim.crypto.challenges import Challenge, ChallengeStore
from medsim.crypto.jose import encode_jwt
from medsim.crypto.keys import Signature, verify_identity, verify_wallet
from medsim.entropy import Entropy
from medsim.errors import IssuerError, MalformedSignatureError
from medsim.scp import Chain
from medsim.vdr import Did, Vdr
from medsim.wallet import Wallet

DEFAULT_VALIDITY = 365 * 24 * 3600  # one year

CREDENTIAL_TYPE = "EcosystemMembershipCredential"

_VC_NAMESPACE = uuid.UUID("00000000-0000-0000-0000-00000000aced")


@dataclass(frozen=True)
class CredentialRequest:
    did: str
    challenge_nonce: str
    sigma_id: Signature
    sigma_w: Signature

    @classmethod
    def from_dict(cls, body: dict) -> "CredentialRequest":
        return cls(
            did=str(body["did"]),
            challenge_nonce=str(body["challenge_nonce"]),
            sigma_id=Signature.from_hex("identity", body["sigma_id"]),
            sigma_w=Signature.from_hex("wallet", body["sigma_w"]),
        )


class Issuer:
    def __init__(
        self,
        vdr: Vdr,
        chain: Chain,
        identity_contract: str,
        clock=None,
        entropy: Entropy | None = None,
        validity_seconds: int = DEFAULT_VALIDITY,
        admin_token: str | None = None,
        wallet: Wallet | None = None,
    ):
        self._vdr = vdr
        self._chain = chain
        self._identity_contract = identity_contract
        self._clock = clock or SystemClock()
        self._entropy = entropy or Entropy()
        self._validity = validity_seconds
        self.admin_token = admin_token or self._entropy.token_hex(16)
        self.challenges = ChallengeStore(clock=self._clock, entropy=self._entropy)
        # the wallet may be pre-built: the identity contract needs the issuer
        # account as controller before this service exists
        self._wallet = wallet or Wallet.generate()
        self._wallet.did = str(vdr.create(self._wallet.build_did_document()))
        self._issued: dict[str, str] = {}  # vc id -> subject DID
        self._counter = 0
        self._lock = threading.Lock()

    @property
    def did(self) -> str:
        return self._wallet.did

    @property
    def eoa(self) -> str:
        return self._wallet.eoa.hex

    @property
    def identity_public_key(self) -> bytes:
        return self._wallet.identity.public

    def did_document(self) -> dict:
        return self._vdr.resolve(self.did).to_dict()

    # -- challenge ---------------------------------------------------------------

    def get_challenge(self, did: str) -> Challenge:
        document = self._vdr.resolve(Did.parse(did))  # raises for unknown DIDs
        if document.deactivated:
            raise IssuerError(f"DID is deactivated: {did}")
        return self.challenges.issue(audience=did)

    # -- issuance ----------------------------------------------------------------

    def issue(self, request: CredentialRequest) -> dict:
        """Verify both challenge signatures, register on-chain, release the VC."""
        with self._lock:
            document = self._vdr.resolve(Did.parse(request.did))
            if document.deactivated:
                raise IssuerError("subject DID is deactivated")
            if not document.is_member_shaped():
                raise IssuerError("DID document does not carry both verification methods")
            message = request.challenge_nonce.encode("ascii")
            if not verify_identity(document.identity_public_key(), message, request.sigma_id):
                raise IssuerError("identity signature does not verify against the DID document")
            eoa = document.eoa()
            try:
                wallet_ok = verify_wallet(eoa, message, request.sigma_w)
            except MalformedSignatureError as exc:
                raise IssuerError(f"wallet signature malformed: {exc}") from exc
            if not wallet_ok:
                raise IssuerError("wallet signature does not recover to the document account")
            # both proofs hold; burn the challenge (single use)
            self.challenges.consume(request.challenge_nonce, audience=request.did)

            issuance = self._clock.now()
            expiration = issuance + self._validity
            self._counter += 1
            vc_id = "urn:vc:medsim:" + str(
                uuid.uuid5(_VC_NAMESPACE, f"{self.did}|{request.did}|{self._counter}")
            )
            receipt = self._submit_identity_tx("add_user", {
                "vc_id": vc_id,
                "eoa": eoa.hex,
                "issuance_date": issuance,
                "expiration_date": expiration,
            })
            if not receipt.ok:
                raise IssuerError(f"on-chain registration failed: {receipt.error}")

            vc_jwt = encode_jwt(
                {"kid": self._wallet.kid},
                {
                    "iss": self.did,
                    "sub": request.did,
                    "jti": vc_id,
                    "nbf": issuance,
                    "iat": issuance,
                    "exp": expiration,
                    "vc": {
                        "type": ["VerifiableCredential", CREDENTIAL_TYPE],
                        "credentialSubject": {"id": request.did, "eoa": eoa.hex},
                    },
                },
                self._wallet.identity.secret,
            )
            self._issued[vc_id] = request.did
            return {"vc_jwt": vc_jwt, "vc_id": vc_id}

    # -- revocation ----------------------------------------------------------------

    def revoke(self, vc_id: str, admin_token: str) -> None:
        if admin_token != self.admin_token:
            raise IssuerError("bad admin token")
        with self._lock:
            if vc_id not in self._issued:
                raise IssuerError(f"credential was not issued here: {vc_id}")
            receipt = self._submit_identity_tx("revoke", {"vc_id": vc_id})
            if not receipt.ok:
                raise IssuerError(f"on-chain revocation failed: {receipt.error}")

    def _submit_identity_tx(self, method: str, args: dict):
        tx = self._wallet.sign_transaction(self._identity_contract, method, args)
        receipt = self._chain.submit(tx)
        if receipt.ok:
            self._wallet.note_applied(tx)
        return receipt
