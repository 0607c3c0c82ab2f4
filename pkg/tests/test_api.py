"""HTTP surface: the full joining/publishing/purchasing/accessing flows
driven exclusively through the FastAPI endpoints."""

import base64
import json

import pytest
from fastapi.testclient import TestClient

from medsim.api.app import create_app
from medsim.scp.chain import Chain
from medsim.units import ONE_TOKEN
from medsim.wallet import Wallet

from .helpers import funded_platform


@pytest.fixture
def platform():
    return funded_platform(seed=21)


@pytest.fixture
def client(platform):
    connector = platform.new_connector("default", "http://testserver")
    app = create_app(platform, connector)
    return TestClient(app)


def create_identity(client, wallet):
    doc = wallet.build_did_document().to_dict()
    response = client.post("/dids", json={"document": doc})
    assert response.status_code == 201, response.text
    wallet.did = response.json()["did"]
    return wallet.did


def join(client, wallet):
    challenge = client.get("/issuer/challenge", params={"did": wallet.did}).json()
    sigma_id, sigma_w = wallet.join_signatures(challenge["nonce"])
    response = client.post("/issuer/credentials", json={
        "did": wallet.did,
        "challenge_nonce": challenge["nonce"],
        "sigma_id": sigma_id.hex,
        "sigma_w": sigma_w.hex,
    })
    assert response.status_code == 200, response.text
    wallet.vc_jwt = response.json()["vc_jwt"]
    return response.json()


def submit_tx(client, wallet, contract, method, args, value="0"):
    tx = wallet.sign_transaction(contract, method, args, value=value)
    response = client.post("/tx", json=tx)
    assert response.status_code == 200, response.text
    receipt = response.json()
    if receipt["status"] == "ok":
        wallet.note_applied(tx)
    return receipt


def publish(client, wallet, contracts, payload=b"payload over http", price=2 * ONE_TOKEN):
    deploy = client.post("/connector/services", json={
        "payload_b64": base64.b64encode(payload).decode(),
        "description": {"name": "http svc", "tags": ["t"]},
    })
    assert deploy.status_code == 201, deploy.text
    hosted = deploy.json()
    receipt = submit_tx(client, wallet, contracts["factory"], "tokenize", {
        "alias": "http svc", "cid": hosted["cid"], "service_url": hosted["service_url"],
        "at_supply": str(3 * ONE_TOKEN), "price": str(price),
    })
    assert receipt["status"] == "ok", receipt["error"]
    return hosted, receipt["result"]


class TestRegistryRoutes:
    def test_did_lifecycle(self, client, platform):
        wallet = platform.actor_wallets["alice"]
        did = create_identity(client, wallet)
        resolved = client.get(f"/dids/{did}")
        assert resolved.status_code == 200
        assert resolved.json()["id"] == did
        assert client.get("/dids/did:medsim:unknown").status_code == 404
        # duplicate create conflicts
        duplicate = client.post("/dids", json={"document": wallet.build_did_document().to_dict()})
        assert duplicate.status_code == 409
        # deactivate, then gone-ish
        proof = wallet.deactivate_proof()
        response = client.request("DELETE", f"/dids/{did}", json={"proof": proof.hex})
        assert response.status_code == 200
        assert client.get(f"/dids/{did}").json()["deactivated"] is True

    def test_update_requires_valid_proof(self, client, platform):
        wallet = platform.actor_wallets["alice"]
        did = create_identity(client, wallet)
        stranger = Wallet.generate()
        new_doc = wallet.build_did_document().to_dict()
        from medsim.crypto.keys import sign_identity
        from medsim.vdr import DidDocument, update_proof_message

        bad = sign_identity(stranger.identity.secret,
                            update_proof_message(did, DidDocument.from_dict(new_doc)))
        response = client.patch(f"/dids/{did}", json={"document": new_doc, "proof": bad.hex})
        assert response.status_code == 400


class TestStorageRoutes:
    def test_put_get_roundtrip(self, client):
        response = client.post("/dds", content=b"some description")
        assert response.status_code == 201
        cid = response.json()["cid"]
        fetched = client.get(f"/dds/{cid}")
        assert fetched.content == b"some description"

    def test_unknown_cid_404(self, client):
        assert client.get("/dds/sha256-" + "00" * 32).status_code == 404

    def test_empty_body_rejected(self, client):
        assert client.post("/dds", content=b"").status_code == 400


class TestLedgerRoutes:
    def test_balance_and_forged_tx(self, client, platform):
        wallet = platform.actor_wallets["alice"]
        balance = client.get(f"/state/balance/{wallet.eoa.hex}").json()
        assert balance["balance"] == str(100 * ONE_TOKEN)
        tx = wallet.sign_transaction(platform.contracts["probe"], "write", {})
        tx["from"] = platform.actor_wallets["bob"].eoa.hex
        assert client.post("/tx", json=tx).status_code == 400

    def test_static_call_stringifies_integers(self, client, platform):
        response = client.post("/call", json={
            "contract": platform.contracts["identity"], "method": "has_valid_status",
            "args": {"eoa": "0x" + "11" * 20},
        })
        assert response.json()["result"] is False
        unknown = client.post("/call", json={
            "contract": "0x" + "22" * 20, "method": "x", "args": {},
        })
        assert unknown.status_code == 404


class TestFullFlowOverHttp:
    def test_join_publish_buy_access(self, client, platform):
        contracts = platform.contracts
        alice, bob = platform.actor_wallets["alice"], platform.actor_wallets["bob"]
        for wallet in (alice, bob):
            create_identity(client, wallet)
            join(client, wallet)
        hosted, tokenized = publish(client, alice, contracts, payload=b"served bytes")

        # catalog via static call shows the offering
        offerings = client.post("/call", json={
            "contract": contracts["factory"], "method": "list_offerings", "args": {},
        }).json()["result"]
        assert len(offerings) == 1
        assert offerings[0]["service_url"] == hosted["service_url"]

        # access before purchase: stage-7 denial with 403
        challenge = client.get("/connector/challenge").json()
        vp = bob.build_presentation(challenge["nonce"])
        denied = client.post(f"/connector/services/{hosted['service_id']}/access", json={"vp": vp})
        assert denied.status_code == 403
        assert denied.json() == {"stage": 7, "reason": "no access token held for this service"}

        # purchase at the exact price
        receipt = submit_tx(client, bob, contracts["exchange"], "buy",
                            {"service": tokenized["service_contract"]}, value=str(2 * ONE_TOKEN))
        assert receipt["status"] == "ok", receipt["error"]

        # access after purchase
        challenge = client.get("/connector/challenge").json()
        vp = bob.build_presentation(challenge["nonce"])
        granted = client.post(f"/connector/services/{hosted['service_id']}/access", json={"vp": vp})
        assert granted.status_code == 200, granted.text
        token = granted.json()["grant_token"]
        payload = client.get(
            f"/connector/services/{hosted['service_id']}/payload",
            headers={"Authorization": f"Bearer {token}"},
        )
        assert payload.status_code == 200
        assert payload.content == b"served bytes"

        # grant is single-use
        again = client.get(
            f"/connector/services/{hosted['service_id']}/payload",
            headers={"Authorization": f"Bearer {token}"},
        )
        assert again.status_code == 401

    def test_revocation_endpoint_gated_by_admin_token(self, client, platform):
        alice = platform.actor_wallets["alice"]
        create_identity(client, alice)
        issued = join(client, alice)
        denied = client.post(f"/issuer/revocations/{issued['vc_id']}",
                             headers={"X-Admin-Token": "wrong"})
        assert denied.status_code == 403
        allowed = client.post(f"/issuer/revocations/{issued['vc_id']}",
                              headers={"X-Admin-Token": platform.issuer.admin_token})
        assert allowed.status_code == 200
        revoked = client.post("/call", json={
            "contract": platform.contracts["identity"], "method": "is_revoked",
            "args": {"vc_id": issued["vc_id"]},
        }).json()["result"]
        assert revoked is True

    def test_events_endpoint(self, client, platform):
        alice = platform.actor_wallets["alice"]
        create_identity(client, alice)
        join(client, alice)
        events = client.get("/events", params={"from_height": 0}).json()
        assert any(e["name"] == "UserAdded" for e in events)


class TestSecretsNeverLeaveTheClient:
    def test_wire_capture_contains_no_secret_material(self, platform):
        """Run the full flow while recording every request body; assert the
        secret scalars never cross the process boundary."""
        connector = platform.new_connector("default", "http://testserver")
        app = create_app(platform, connector)
        captured: list[bytes] = []

        class RecordingClient(TestClient):
            def request(self, method, url, **kwargs):  # noqa: A003
                content = kwargs.get("content")
                if content:
                    captured.append(content if isinstance(content, bytes) else str(content).encode())
                if kwargs.get("json") is not None:
                    captured.append(json.dumps(kwargs["json"]).encode())
                return super().request(method, url, **kwargs)

        client = RecordingClient(app)
        alice, bob = platform.actor_wallets["alice"], platform.actor_wallets["bob"]
        for wallet in (alice, bob):
            create_identity(client, wallet)
            join(client, wallet)
        hosted, tokenized = publish(client, alice, platform.contracts)
        submit_tx(client, bob, platform.contracts["exchange"], "buy",
                  {"service": tokenized["service_contract"]}, value=str(2 * ONE_TOKEN))
        challenge = client.get("/connector/challenge").json()
        vp = bob.build_presentation(challenge["nonce"])
        client.post(f"/connector/services/{hosted['service_id']}/access", json={"vp": vp})

        blob = b"\n".join(captured)
        for wallet in (alice, bob):
            for secret in (wallet.identity.secret, wallet.wallet.secret):
                assert secret.hex().encode() not in blob
                assert secret not in blob
                assert base64.b64encode(secret) not in blob
