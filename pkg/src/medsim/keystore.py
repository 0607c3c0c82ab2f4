"""Encrypted on-disk keystore for the wallet CLI.

Secrets (both key seeds and the credential) only ever touch disk inside the
ciphertext, encrypted with a scrypt-derived Fernet key. The public section
carries just the DID and account address for display.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path

from cryptography.fernet import Fernet, InvalidToken
from cryptography.hazmat.primitives.kdf.scrypt import Scrypt

from medsim.errors import KeystoreError
from medsim.wallet import Wallet

SCHEMA_VERSION = 1

# interactive-grade scrypt cost; tests may lower n via save(kdf_n=...)
DEFAULT_N = 2**14
DEFAULT_R = 8
DEFAULT_P = 1


@dataclass
class KeystoreFile:
    path: Path

    def exists(self) -> bool:
        return self.path.exists()

    def save(self, wallet: Wallet, passphrase: str, kdf_n: int = DEFAULT_N) -> None:
        import os

        salt = os.urandom(16)
        secret_body = json.dumps({
            "identity_secret": wallet.identity.secret.hex(),
            "wallet_secret": wallet.wallet.secret.hex(),
            "did": wallet.did,
            "vc_jwt": wallet.vc_jwt,
        }).encode()
        token = Fernet(self._derive(passphrase, salt, kdf_n)).encrypt(secret_body)
        document = {
            "version": SCHEMA_VERSION,
            "kdf": {"name": "scrypt", "salt": salt.hex(), "n": kdf_n, "r": DEFAULT_R, "p": DEFAULT_P},
            "public": {"did": wallet.did, "eoa": wallet.eoa.hex},
            "ciphertext": token.decode(),
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(json.dumps(document, indent=2))

    def load(self, passphrase: str) -> Wallet:
        document = self._read()
        kdf = document["kdf"]
        key = self._derive(passphrase, bytes.fromhex(kdf["salt"]), int(kdf["n"]),
                           int(kdf["r"]), int(kdf["p"]))
        try:
            body = json.loads(Fernet(key).decrypt(document["ciphertext"].encode()))
        except InvalidToken as exc:
            raise KeystoreError("wrong passphrase or corrupted keystore") from exc
        wallet = Wallet.generate(
            identity_seed=bytes.fromhex(body["identity_secret"]),
            wallet_seed=bytes.fromhex(body["wallet_secret"]),
        )
        wallet.did = body.get("did")
        wallet.vc_jwt = body.get("vc_jwt")
        return wallet

    def public_info(self) -> dict:
        return self._read().get("public", {})

    def _read(self) -> dict:
        if not self.path.exists():
            raise KeystoreError(f"no keystore at {self.path}")
        try:
            document = json.loads(self.path.read_text())
        except json.JSONDecodeError as exc:
            raise KeystoreError(f"keystore is not valid JSON: {exc}") from exc
        if document.get("version") != SCHEMA_VERSION:
            raise KeystoreError(f"unsupported keystore version: {document.get('version')}")
        return document

    @staticmethod
    def _derive(passphrase: str, salt: bytes, n: int, r: int = DEFAULT_R, p: int = DEFAULT_P) -> bytes:
        kdf = Scrypt(salt=salt, length=32, n=n, r=r, p=p)
        return base64.urlsafe_b64encode(kdf.derive(passphrase.encode()))
