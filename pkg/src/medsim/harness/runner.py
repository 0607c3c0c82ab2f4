"""Executes scenarios against a freshly booted in-process stack.

Cross-module invariants (native conservation, per-token reconciliation,
atomic revert) are asserted after every step; the transcript is canonical
JSON so replays can be compared byte for byte.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from medsim.connector import AccessGrant, Connector, Denial
from medsim.contracts.access_token import AccessTokenContract
from medsim.crypto.jose import decode_jwt, encode_jwt
from medsim.encoding import b64url_decode, b64url_encode, canonical_json
from medsim.errors import ScenarioError
from medsim.harness.scenario import Scenario, Step
from medsim.issuer import CredentialRequest
from medsim.platform import GenesisActor, Platform, PlatformConfig
from medsim.units import parse_display
from medsim.wallet import Wallet


@dataclass
class PublishedService:
    label: str
    connector_name: str
    service_id: str
    service_contract: str
    access_token_contract: str
    price: int
    payload: bytes


class HarnessRunner:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        config = PlatformConfig(
            deterministic=True,
            seed=scenario.seed,
            start_time=scenario.start_time,
            actors=[GenesisActor(name=n, balance=b) for n, b in scenario.actors.items()],
        )
        if scenario.vc_validity:
            config.vc_validity = scenario.vc_validity
        self.platform = Platform(config)
        self.services: dict[str, PublishedService] = {}
        self.vc_ids: dict[str, str] = {}
        self.step_records: list[dict] = []
        self._supply0 = self.platform.chain.total_native_supply()

    # -- public API ---------------------------------------------------------------

    def run(self) -> dict:
        for index, step in enumerate(self.scenario.steps):
            record = {"index": index, "op": step.op}
            if step.actor:
                record["actor"] = step.actor
            record.update(self._execute(step))
            self._check_expectation(step, record, index)
            self._assert_invariants(index)
            self.step_records.append(record)
        return self.transcript()

    def transcript(self) -> dict:
        return {
            "schema": 1,
            "name": self.scenario.name,
            "seed": self.scenario.seed,
            "steps": self.step_records,
            "events": [e.to_dict() for e in self.platform.chain.events],
            "final_balances": {"native": self._native_balances()},
            "access_tokens": self._token_balances(),
            "state_hash": self.platform.chain.state_hash(),
            "final_time": self.platform.clock.now(),
        }

    def transcript_bytes(self) -> bytes:
        return canonical_json(self.transcript())

    # -- step execution -------------------------------------------------------------

    def _execute(self, step: Step) -> dict:
        handler = getattr(self, f"_op_{step.op}")
        return handler(step)

    def _wallet(self, name: str) -> Wallet:
        return self.platform.actor_wallets[name]

    def _submit(self, wallet: Wallet, contract: str, method: str, args: dict, value="0"):
        tx = wallet.sign_transaction(contract, method, args, value=value)
        receipt = self.platform.chain.submit(tx)
        if receipt.ok:
            wallet.note_applied(tx)
        return receipt

    def _op_create_identity(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        wallet.did = str(self.platform.vdr.create(wallet.build_did_document()))
        return {"status": "ok", "did": wallet.did}

    def _op_join(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        challenge = self.platform.issuer.get_challenge(wallet.did)
        sigma_id, sigma_w = wallet.join_signatures(challenge.nonce)
        issued = self.platform.issuer.issue(
            CredentialRequest(wallet.did, challenge.nonce, sigma_id, sigma_w)
        )
        wallet.vc_jwt = issued["vc_jwt"]
        self.vc_ids[step.actor] = issued["vc_id"]
        return {"status": "ok", "vc_id": issued["vc_id"]}

    def _op_publish(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        connector = self._connector_for(step.actor)
        payload = (step.payload_text or f"payload of {step.label}").encode()
        service, cid = connector.deploy_service(payload, step.description or {"name": step.alias or step.label})
        receipt = self._submit(wallet, self.platform.contracts["factory"], "tokenize", {
            "alias": step.alias or step.label,
            "cid": str(cid),
            "service_url": service.service_url,
            "at_supply": str(parse_display(step.supply)),
            "price": str(parse_display(step.price)),
        })
        if not receipt.ok:
            return {"status": "revert", "error": receipt.error}
        self.services[step.label] = PublishedService(
            label=step.label,
            connector_name=step.actor,
            service_id=service.id,
            service_contract=receipt.result["service_contract"],
            access_token_contract=receipt.result["access_token_contract"],
            price=parse_display(step.price),
            payload=payload,
        )
        return {
            "status": "ok", "label": step.label,
            "service_contract": receipt.result["service_contract"],
            "access_token_contract": receipt.result["access_token_contract"],
        }

    def _op_buy(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        service = self.services[step.service]
        value = service.price
        if step.fault == "underpay":
            value = max(0, value - 1)
        elif step.fault == "overpay":
            value = value + 1
        pre_hash = self.platform.chain.state_hash()
        receipt = self._submit(
            wallet, self.platform.contracts["exchange"], "buy",
            {"service": service.service_contract}, value=value,
        )
        if receipt.ok:
            return {"status": "ok", "price": str(service.price)}
        if self.platform.chain.state_hash() != pre_hash:
            raise ScenarioError("reverted buy mutated chain state")
        return {"status": "revert", "error": receipt.error}

    def _op_access(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        service = self.services[step.service]
        connector = self.platform.connectors[service.connector_name]
        challenge = connector.get_challenge()
        nonce = challenge.nonce
        if step.fault == "replay_nonce":
            # burn the nonce first so the presentation arrives consumed
            spent = wallet.build_presentation(nonce)
            connector.request_access(service.service_id, spent)
        vp = wallet.build_presentation(nonce)
        if step.fault == "corrupt_signature":
            vp = self._corrupt_wallet_signature(vp, wallet)
        elif step.fault == "tamper_vc":
            vp = self._tamper_credential(vp, wallet)
        outcome = connector.request_access(service.service_id, vp)
        if isinstance(outcome, Denial):
            return {"status": "denied", "stage": outcome.stage, "reason": outcome.reason}
        payload = connector.fetch_payload(service.service_id, outcome.token)
        if payload != service.payload:
            raise ScenarioError(f"served payload differs from published payload for {service.label}")
        return {"status": "grant", "payload_sha256": hashlib.sha256(payload).hexdigest()}

    def _op_advance_clock(self, step: Step) -> dict:
        self.platform.clock.advance(step.seconds)
        return {"status": "ok", "now": self.platform.clock.now()}

    def _op_revoke_vc(self, step: Step) -> dict:
        vc_id = self.vc_ids.get(step.actor)
        if not vc_id:
            raise ScenarioError(f"actor {step.actor!r} has no credential to revoke")
        self.platform.issuer.revoke(vc_id, self.platform.issuer.admin_token)
        return {"status": "ok", "vc_id": vc_id}

    def _op_deactivate_did(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        self.platform.vdr.deactivate(wallet.did, wallet.deactivate_proof())
        return {"status": "ok"}

    def _op_transfer_at(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        service = self.services[step.service]
        receipt = self._submit(wallet, service.access_token_contract, "transfer", {
            "to": self._wallet(step.to).eoa.hex,
            "amount": str(parse_display(step.amount)),
        })
        if receipt.ok:
            return {"status": "ok"}
        return {"status": "revert", "error": receipt.error}

    def _op_force_revert(self, step: Step) -> dict:
        wallet = self._wallet(step.actor)
        pre_hash = self.platform.chain.state_hash()
        receipt = self._submit(wallet, self.platform.contracts["probe"], "write_then_revert", {})
        if receipt.ok:
            raise ScenarioError("probe unexpectedly succeeded")
        if self.platform.chain.state_hash() != pre_hash:
            raise ScenarioError("forced revert mutated chain state")
        return {"status": "revert", "error": receipt.error}

    # -- fault helpers ------------------------------------------------------------------
    # The holder re-signs the tampered envelope with their own identity key:
    # the outer signature stays valid so the corrupted field itself is what
    # the pipeline must catch.

    @staticmethod
    def _corrupt_wallet_signature(vp: str, wallet: Wallet) -> str:
        header, payload, _, _ = decode_jwt(vp)
        raw = bytearray(bytes.fromhex(payload["walletSignature"]))
        raw[7] ^= 0x40
        payload["walletSignature"] = raw.hex()
        header.pop("alg", None), header.pop("typ", None)
        return encode_jwt(header, payload, wallet.identity.secret)

    @staticmethod
    def _tamper_credential(vp: str, wallet: Wallet) -> str:
        # corrupt the issuer's signature over the credential, leaving the
        # claims readable so the pipeline reaches the signature check
        header, payload, _, _ = decode_jwt(vp)
        inner = payload["vp"]["VerifiableCredential"][0]
        head, body, sig = inner.split(".")
        raw = bytearray(b64url_decode(sig))
        raw[3] ^= 0x20
        payload["vp"]["VerifiableCredential"][0] = head + "." + body + "." + b64url_encode(bytes(raw))
        header.pop("alg", None), header.pop("typ", None)
        return encode_jwt(header, payload, wallet.identity.secret)

    # -- bookkeeping -----------------------------------------------------------------------

    def _connector_for(self, actor: str) -> Connector:
        if actor not in self.platform.connectors:
            self.platform.new_connector(actor, f"http://{actor}.connector.sim")
        return self.platform.connectors[actor]

    def _check_expectation(self, step: Step, record: dict, index: int) -> None:
        if not step.expect:
            return
        for key, expected in step.expect.items():
            actual = record.get(key)
            if actual != expected:
                raise ScenarioError(
                    f"step {index} ({step.op}): expected {key}={expected!r}, got {actual!r} "
                    f"(record: {record})"
                )

    def _assert_invariants(self, index: int) -> None:
        chain = self.platform.chain
        if chain.total_native_supply() != self._supply0:
            raise ScenarioError(f"native supply drifted after step {index}")
        for address, contract in chain.contracts.items():
            if isinstance(contract, AccessTokenContract):
                held = sum(contract.storage["balances"].values())
                outstanding = contract.storage["minted"] - contract.storage["burned"]
                if held != outstanding:
                    raise ScenarioError(
                        f"token ledger at {address} does not reconcile after step {index}"
                    )

    def _actor_by_eoa(self) -> dict[str, str]:
        mapping = {wallet.eoa.hex: name for name, wallet in self.platform.actor_wallets.items()}
        mapping[self.platform.issuer.eoa] = "issuer"
        for label, service in self.services.items():
            mapping[service.service_contract] = f"service:{label}"
            mapping[service.access_token_contract] = f"token:{label}"
        for name, address in self.platform.contracts.items():
            mapping[address] = f"contract:{name}"
        return mapping

    def _native_balances(self) -> dict[str, str]:
        names = self._actor_by_eoa()
        return {
            names.get(address, address): str(amount)
            for address, amount in sorted(self.platform.chain.balances.items())
        }

    def _token_balances(self) -> dict[str, dict[str, str]]:
        names = self._actor_by_eoa()
        out: dict[str, dict[str, str]] = {}
        for label, service in self.services.items():
            contract = self.platform.chain.contracts[service.access_token_contract]
            out[label] = {
                names.get(holder, holder): str(amount)
                for holder, amount in sorted(contract.storage["balances"].items())
            }
        return out


def run_scenario(scenario: Scenario) -> dict:
    return HarnessRunner(scenario).run()
