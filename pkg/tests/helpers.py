"""Shared protocol-flow drivers for the service-level test suites."""

from __future__ import annotations

from medsim.issuer import CredentialRequest
from medsim.platform import GenesisActor, Platform, PlatformConfig
from medsim.units import ONE_TOKEN
from medsim.wallet import Wallet


def funded_platform(seed: int = 7, actors: tuple[str, ...] = ("alice", "bob", "carol"), balance: int = 100 * ONE_TOKEN) -> Platform:
    config = PlatformConfig(
        deterministic=True,
        seed=seed,
        actors=[GenesisActor(name=name, balance=balance) for name in actors],
    )
    return Platform(config)


class Flow:
    """Drives the four protocol phases directly against a platform."""

    def __init__(self, platform: Platform):
        self.platform = platform

    def wallet(self, name: str) -> Wallet:
        return self.platform.actor_wallets[name]

    def create_identity(self, name: str) -> Wallet:
        wallet = self.wallet(name)
        wallet.did = str(self.platform.vdr.create(wallet.build_did_document()))
        return wallet

    def join(self, name: str) -> dict:
        wallet = self.wallet(name)
        challenge = self.platform.issuer.get_challenge(wallet.did)
        sigma_id, sigma_w = wallet.join_signatures(challenge.nonce)
        issued = self.platform.issuer.issue(
            CredentialRequest(wallet.did, challenge.nonce, sigma_id, sigma_w)
        )
        wallet.vc_jwt = issued["vc_jwt"]
        return issued

    def enroll(self, name: str) -> dict:
        self.create_identity(name)
        return self.join(name)

    def publish(self, name: str, connector, payload: bytes = b"service bytes", alias: str = "svc",
                supply: int = 3 * ONE_TOKEN, price: int = 2 * ONE_TOKEN) -> dict:
        wallet = self.wallet(name)
        service, cid = connector.deploy_service(payload, {"name": alias, "description": "test service"})
        receipt = self.submit(wallet, self.platform.contracts["factory"], "tokenize", {
            "alias": alias, "cid": str(cid), "service_url": service.service_url,
            "at_supply": str(supply), "price": str(price),
        })
        assert receipt.ok, receipt.error
        return {
            "service_id": service.id,
            "price": price,
            **receipt.result,
        }

    def buy(self, name: str, offering: dict, value: int | None = None):
        wallet = self.wallet(name)
        return self.submit(
            wallet, self.platform.contracts["exchange"], "buy",
            {"service": offering["service_contract"]},
            value=offering["price"] if value is None else value,
        )

    def access(self, name: str, connector, service_id: str):
        wallet = self.wallet(name)
        challenge = connector.get_challenge()
        vp = wallet.build_presentation(challenge.nonce)
        return connector.request_access(service_id, vp)

    def submit(self, wallet: Wallet, contract: str, method: str, args: dict, value: int | str = "0"):
        tx = wallet.sign_transaction(contract, method, args, value=value)
        receipt = self.platform.chain.submit(tx)
        if receipt.ok:
            wallet.note_applied(tx)
        return receipt
