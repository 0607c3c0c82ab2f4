"""Wallet CLI end to end against an in-process server."""

import json

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from medsim import clients as clients_module
from medsim.api.app import create_app
from medsim.cli import main
from medsim.crypto.keys import derive_eoa, generate_wallet_keypair
from medsim.units import ONE_TOKEN

from .helpers import funded_platform

ALICE_WSEED = (0xA110).to_bytes(32, "big").hex()
ALICE_ISEED = (0xA111).to_bytes(32, "big").hex()
BOB_WSEED = (0xB0B0).to_bytes(32, "big").hex()
BOB_ISEED = (0xB0B1).to_bytes(32, "big").hex()


@pytest.fixture
def world(monkeypatch, tmp_path):
    platform = funded_platform(seed=3, actors=())  # CLI actors are funded below
    for seed_hex in (ALICE_WSEED, BOB_WSEED):
        eoa = derive_eoa(generate_wallet_keypair(bytes.fromhex(seed_hex)).public)
        platform.chain.genesis_alloc({eoa.hex: 50 * ONE_TOKEN})
    connector = platform.new_connector("default", "http://testserver")
    app = create_app(platform, connector)
    test_client = TestClient(app)
    monkeypatch.setattr(clients_module, "make_http_client", lambda base_url: test_client)
    monkeypatch.setenv("MEDSIM_PASSPHRASE", "pw")
    monkeypatch.setenv("MEDSIM_CONFIG", str(tmp_path / "absent-config.json"))
    runner = CliRunner()
    return platform, runner, tmp_path


def run(runner, tmp_path, actor, *args, expect: int = 0):
    result = runner.invoke(
        main, ["--keystore", str(tmp_path / f"{actor}.keystore.json"), *args],
        catch_exceptions=False,
    )
    assert result.exit_code == expect, f"exit {result.exit_code}: {result.output}"
    return result


def make_identity(runner, tmp_path, actor, wseed, iseed):
    return run(runner, tmp_path, actor, "identity", "create",
               "--wallet-seed", wseed, "--identity-seed", iseed)


class TestCliFlows:
    def test_full_provider_consumer_story(self, world):
        platform, runner, tmp_path = world

        make_identity(runner, tmp_path, "alice", ALICE_WSEED, ALICE_ISEED)
        make_identity(runner, tmp_path, "bob", BOB_WSEED, BOB_ISEED)
        run(runner, tmp_path, "alice", "join")
        run(runner, tmp_path, "bob", "join")

        # fresh member sees an empty catalog
        result = run(runner, tmp_path, "bob", "catalog")
        assert "no offerings yet" in result.output

        payload = tmp_path / "payload.bin"
        payload.write_bytes(b"very exclusive bytes")
        description = tmp_path / "svc.json"
        description.write_text(json.dumps({"name": "Exclusive", "tags": ["demo"]}))
        result = run(runner, tmp_path, "alice", "--json", "publish",
                     "--payload", str(payload), "--description", str(description),
                     "--alias", "exclusive", "--supply", "2", "--price", "1.5")
        published = json.loads(result.output)
        service_contract = published["contracts"]["service_contract"]

        result = run(runner, tmp_path, "bob", "catalog")
        assert "exclusive" in result.output
        assert "1.5" in result.output

        # access before purchase: stage-7 exit code
        result = runner.invoke(
            main, ["--keystore", str(tmp_path / "bob.keystore.json"),
                   "access", "--service", service_contract],
            catch_exceptions=False,
        )
        assert result.exit_code == 47
        assert "stage 7" in result.output

        run(runner, tmp_path, "bob", "buy", "--service", service_contract)

        out_file = tmp_path / "fetched.bin"
        run(runner, tmp_path, "bob", "access", "--service", service_contract,
            "--out", str(out_file))
        assert out_file.read_bytes() == b"very exclusive bytes"

        # balances moved by exactly the price
        bob_eoa = derive_eoa(generate_wallet_keypair(bytes.fromhex(BOB_WSEED)).public)
        assert platform.chain.balances[bob_eoa.hex] == 50 * ONE_TOKEN - parse_price("1.5")

    def test_buy_with_revoked_credential_exits_revert(self, world):
        platform, runner, tmp_path = world
        make_identity(runner, tmp_path, "alice", ALICE_WSEED, ALICE_ISEED)
        make_identity(runner, tmp_path, "bob", BOB_WSEED, BOB_ISEED)
        result = run(runner, tmp_path, "alice", "--json", "join")
        run(runner, tmp_path, "bob", "join")

        payload = tmp_path / "p.bin"
        payload.write_bytes(b"x")
        description = tmp_path / "d.json"
        description.write_text("{}")
        published = json.loads(run(
            runner, tmp_path, "alice", "--json", "publish",
            "--payload", str(payload), "--description", str(description),
            "--alias", "svc", "--price", "1",
        ).output)
        service_contract = published["contracts"]["service_contract"]

        vc_id = json.loads(result.output)["vc_id"]
        platform.issuer.revoke(vc_id, platform.issuer.admin_token)

        result = runner.invoke(
            main, ["--keystore", str(tmp_path / "bob.keystore.json"),
                   "buy", "--service", service_contract],
            catch_exceptions=False,
        )
        assert result.exit_code == 3
        assert "provider" in result.output

    def test_identity_create_refuses_overwrite(self, world):
        platform, runner, tmp_path = world
        make_identity(runner, tmp_path, "alice", ALICE_WSEED, ALICE_ISEED)
        result = runner.invoke(
            main, ["--keystore", str(tmp_path / "alice.keystore.json"),
                   "identity", "create"],
            catch_exceptions=False,
        )
        assert result.exit_code == 1
        assert "already exists" in result.output

    def test_identity_show(self, world):
        platform, runner, tmp_path = world
        make_identity(runner, tmp_path, "alice", ALICE_WSEED, ALICE_ISEED)
        result = run(runner, tmp_path, "alice", "--json", "identity", "show")
        info = json.loads(result.output)
        assert info["did"].startswith("did:medsim:")
        assert info["eoa"].startswith("0x")


def parse_price(text: str) -> int:
    from medsim.units import parse_display

    return parse_display(text)
