"""Actor-side key material and the signing flows of the four protocol phases.

A Wallet never leaves the process that owns it; everything it exports is a
signature or public material. Both the CLI and the scenario harness drive
protocol runs through this class so the flows exist exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from medsim.crypto.jose import encode_jwt
from medsim.crypto.keys import (
    Eoa,
    IdentityKeyPair,
    Signature,
    WalletKeyPair,
    derive_eoa,
    generate_identity_keypair,
    generate_wallet_keypair,
    sign_identity,
    sign_wallet,
)
from medsim.scp.chain import Chain
from medsim.vdr import (
    IDENTITY_FRAGMENT,
    DidDocument,
    deactivate_proof_message,
    member_document,
    update_proof_message,
)


@dataclass
class Wallet:
    identity: IdentityKeyPair
    wallet: WalletKeyPair
    did: str | None = None
    vc_jwt: str | None = None
    _nonces: dict[str, int] = field(default_factory=dict, repr=False)

    @classmethod
    def generate(cls, identity_seed: bytes | None = None, wallet_seed: bytes | None = None) -> "Wallet":
        return cls(
            identity=generate_identity_keypair(identity_seed),
            wallet=generate_wallet_keypair(wallet_seed),
        )

    @property
    def eoa(self) -> Eoa:
        return derive_eoa(self.wallet.public)

    @property
    def kid(self) -> str:
        if not self.did:
            raise ValueError("wallet has no DID yet")
        return f"{self.did}#{IDENTITY_FRAGMENT}"

    # -- joining ---------------------------------------------------------------

    def build_did_document(self) -> DidDocument:
        return member_document(self.identity.public, self.eoa)

    def join_signatures(self, challenge_nonce: str) -> tuple[Signature, Signature]:
        """(sigma_id, sigma_w) over the challenge, proving DID and EOA control."""
        message = challenge_nonce.encode("ascii")
        return sign_identity(self.identity.secret, message), sign_wallet(self.wallet.secret, message)

    def update_proof(self, new_doc: DidDocument) -> Signature:
        return sign_identity(self.identity.secret, update_proof_message(self.did, new_doc))

    def deactivate_proof(self) -> Signature:
        return sign_identity(self.identity.secret, deactivate_proof_message(self.did))

    # -- transactions ------------------------------------------------------------

    def sign_transaction(self, contract: str, method: str, args: dict, value: int | str = "0", nonce: int | None = None) -> dict:
        """Build and sign a canonical transaction dict ready for submission.

        Without an explicit nonce the wallet tracks its own counter, which
        matches the chain as long as every signed transaction succeeds.
        """
        sender = self.eoa.hex
        if nonce is None:
            nonce = self._nonces.get(sender, 0)
        tx = {
            "from": sender,
            "nonce": nonce,
            "contract": contract,
            "method": method,
            "args": args,
            "value": str(value),
        }
        sig = sign_wallet(self.wallet.secret, Chain.signing_payload(tx))
        tx["signature"] = sig.hex
        return tx

    def note_applied(self, tx: dict) -> None:
        """Advance the local nonce counter after a successful submission."""
        self._nonces[tx["from"]] = tx["nonce"] + 1

    # -- accessing ----------------------------------------------------------------

    def access_signature(self, challenge_nonce: str) -> Signature:
        return sign_wallet(self.wallet.secret, challenge_nonce.encode("ascii"))

    def build_presentation(self, challenge_nonce: str) -> str:
        """JWT-encoded presentation: inner credential, challenge nonce and the
        wallet signature over it, enveloped under the identity key."""
        if not self.vc_jwt:
            raise ValueError("wallet holds no credential to present")
        header = {"kid": self.kid, "nonce": challenge_nonce}
        payload = {
            "vp": {
                "type": "VerifiablePresentation",
                "VerifiableCredential": [self.vc_jwt],
            },
            "walletSignature": self.access_signature(challenge_nonce).hex,
        }
        return encode_jwt(header, payload, self.identity.secret)
