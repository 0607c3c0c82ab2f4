"""Key material, signatures, challenges and JWT envelopes."""

from medsim.crypto.challenges import Challenge, ChallengeStore
from medsim.crypto.keccak import keccak256
from medsim.crypto.keys import (
    Eoa,
    IdentityKeyPair,
    Signature,
    WalletKeyPair,
    derive_eoa,
    eip191_digest,
    generate_identity_keypair,
    generate_wallet_keypair,
    recover_wallet,
    sign_identity,
    sign_wallet,
    verify_identity,
    verify_wallet,
)

__all__ = [
    "Challenge",
    "ChallengeStore",
    "Eoa",
    "IdentityKeyPair",
    "Signature",
    "WalletKeyPair",
    "derive_eoa",
    "eip191_digest",
    "generate_identity_keypair",
    "generate_wallet_keypair",
    "keccak256",
    "recover_wallet",
    "sign_identity",
    "sign_wallet",
    "verify_identity",
    "verify_wallet",
]
