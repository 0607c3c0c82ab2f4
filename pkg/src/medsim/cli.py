"""`medsim`: wallet command-line tool driving the four protocol phases.

Thin client over the HTTP services; key material stays local in an encrypted
keystore and only signatures cross the wire.

Exit codes: 0 success, 3 transaction revert, 40+stage for access denials
(41 unparseable presentation ... 47 no proof of purchase), otherwise click
defaults (1 errors, 2 usage).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from medsim import clients
from medsim.errors import KeystoreError, MedsimError
from medsim.keystore import KeystoreFile
from medsim.units import parse_display, to_display
from medsim.wallet import Wallet

EXIT_REVERT = 3
EXIT_DENIAL_BASE = 40

DEFAULT_CONFIG = Path.home() / ".medsim" / "config.json"
DEFAULT_KEYSTORE = Path.home() / ".medsim" / "keystore.json"


class Session:
    """Resolved configuration plus lazy clients and keystore."""

    def __init__(self, config_path: str | None, keystore_path: str | None, as_json: bool):
        self.as_json = as_json
        path = config_path or os.environ.get("MEDSIM_CONFIG") or str(DEFAULT_CONFIG)
        self.config: dict = {}
        if Path(path).exists():
            self.config = json.loads(Path(path).read_text())
        keystore = (
            keystore_path
            or os.environ.get("MEDSIM_KEYSTORE")
            or self.config.get("keystore")
            or str(DEFAULT_KEYSTORE)
        )
        self.keystore = KeystoreFile(Path(keystore))
        self.platform_url = self.config.get("platform_url", "http://127.0.0.1:8000")
        self.connector_url = self.config.get("connector_url", self.platform_url)

    def platform(self) -> clients.PlatformClient:
        return clients.PlatformClient(self.platform_url)

    def connector(self, base_url: str | None = None) -> clients.ConnectorClient:
        return clients.ConnectorClient(base_url or self.connector_url)

    def passphrase(self, confirm: bool = False) -> str:
        env = os.environ.get("MEDSIM_PASSPHRASE")
        if env is not None:
            return env
        return click.prompt("Keystore passphrase", hide_input=True, confirmation_prompt=confirm)

    def load_wallet(self) -> Wallet:
        return self.keystore.load(self.passphrase())

    def emit(self, data: dict, human: str) -> None:
        if self.as_json:
            click.echo(json.dumps(data, indent=2, sort_keys=True))
        else:
            click.echo(human)


pass_session = click.make_pass_decorator(Session)


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Config JSON (platform_url, connector_url, keystore). Env: MEDSIM_CONFIG.")
@click.option("--keystore", "keystore_path", type=click.Path(dir_okay=False), default=None,
              help="Keystore path. Env: MEDSIM_KEYSTORE.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, config_path, keystore_path, as_json):
    """Wallet for the decentralised service marketplace simulator."""
    ctx.obj = Session(config_path, keystore_path, as_json)


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guard(fn):
    """Translate service errors into stable exit codes."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except clients.ServiceError as exc:
            _fail(str(exc))
        except KeystoreError as exc:
            _fail(str(exc))
        except MedsimError as exc:
            _fail(str(exc))

    return wrapper


# -- identity ------------------------------------------------------------------

@main.group()
def identity():
    """Key and DID lifecycle."""


@identity.command("create")
@click.option("--identity-seed", default=None, help="32-byte hex seed (deterministic mode).")
@click.option("--wallet-seed", default=None, help="32-byte hex seed (deterministic mode).")
@pass_session
@_guard
def identity_create(session: Session, identity_seed, wallet_seed):
    """Generate both key pairs, publish the DID document, write the keystore."""
    if session.keystore.exists():
        _fail(f"keystore already exists at {session.keystore.path}")
    wallet = Wallet.generate(
        identity_seed=bytes.fromhex(identity_seed) if identity_seed else None,
        wallet_seed=bytes.fromhex(wallet_seed) if wallet_seed else None,
    )
    did = session.platform().create_did(wallet.build_did_document().to_dict())
    wallet.did = did
    session.keystore.save(wallet, session.passphrase(confirm=True))
    session.emit(
        {"did": did, "eoa": wallet.eoa.hex, "keystore": str(session.keystore.path)},
        f"created identity\n  did: {did}\n  eoa: {wallet.eoa.hex}\n  keystore: {session.keystore.path}",
    )


@identity.command("show")
@pass_session
@_guard
def identity_show(session: Session):
    """Public identity data from the keystore."""
    info = session.keystore.public_info()
    session.emit(info, "\n".join(f"{k}: {v}" for k, v in info.items()))


# -- joining --------------------------------------------------------------------

@main.command()
@pass_session
@_guard
def join(session: Session):
    """Prove DID and account ownership to the issuer; store the credential."""
    wallet = session.load_wallet()
    if not wallet.did:
        _fail("no DID in keystore; run `medsim identity create` first")
    platform = session.platform()
    challenge = platform.issuer_challenge(wallet.did)
    sigma_id, sigma_w = wallet.join_signatures(challenge["nonce"])
    issued = platform.issue_credential(wallet.did, challenge["nonce"], sigma_id.hex, sigma_w.hex)
    wallet.vc_jwt = issued["vc_jwt"]
    session.keystore.save(wallet, session.passphrase())
    session.emit(
        {"vc_id": issued["vc_id"]},
        f"joined the ecosystem\n  credential: {issued['vc_id']}",
    )


# -- publishing -------------------------------------------------------------------

@main.command()
@click.option("--payload", "payload_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="File served to consumers after access is granted.")
@click.option("--description", "description_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON file describing the service (free-form).")
@click.option("--alias", required=True, help="Display name minted into the service NFT.")
@click.option("--supply", default="1", show_default=True, help="Access tokens to mint (whole tokens).")
@click.option("--price", required=True, help="Fixed price per access token (native tokens).")
@pass_session
@_guard
def publish(session: Session, payload_path, description_path, alias, supply, price):
    """Host a service on the connector and tokenize it on-chain."""
    wallet = session.load_wallet()
    payload = Path(payload_path).read_bytes()
    description = json.loads(Path(description_path).read_text())
    platform = session.platform()
    connector = session.connector()

    hosted = connector.deploy_service(payload, description)
    info = platform.info()
    tx = wallet.sign_transaction(
        info["contracts"]["factory"], "tokenize",
        {
            "alias": alias, "cid": hosted["cid"], "service_url": hosted["service_url"],
            "at_supply": str(parse_display(supply)), "price": str(parse_display(price)),
        },
        nonce=platform.nonce(wallet.eoa.hex),
    )
    receipt = platform.submit_tx(tx)
    if receipt["status"] != "ok":
        _fail(f"tokenization reverted: {receipt['error']}", EXIT_REVERT)
    result = receipt["result"]
    session.emit(
        {"hosted": hosted, "contracts": result},
        "published service offering\n"
        f"  service id:     {hosted['service_id']}\n"
        f"  service url:    {hosted['service_url']}\n"
        f"  description:    {hosted['cid']}\n"
        f"  service SC:     {result['service_contract']}\n"
        f"  access token:   {result['access_token_contract']}",
    )


# -- catalog -----------------------------------------------------------------------

@main.command()
@pass_session
@_guard
def catalog(session: Session):
    """List all tokenized offerings with their stored descriptions."""
    platform = session.platform()
    info = platform.info()
    offerings = platform.call(info["contracts"]["factory"], "list_offerings")
    enriched = []
    for offering in offerings:
        entry = dict(offering)
        try:
            entry["description"] = json.loads(platform.get_content(offering["cid"]))
        except (clients.ServiceError, json.JSONDecodeError):
            entry["description"] = None
        enriched.append(entry)
    if session.as_json:
        session.emit({"offerings": enriched}, "")
        return
    if not enriched:
        click.echo("no offerings yet")
        return
    for entry in enriched:
        name = (entry.get("description") or {}).get("name", "")
        click.echo(
            f"{entry['alias']:20s} price {to_display(int(entry['price'])):>8s}  "
            f"service {entry['service_contract']}  owner {entry['owner']}"
            + (f"  ({name})" if name and name != entry["alias"] else "")
        )


# -- purchasing -------------------------------------------------------------------------

@main.command()
@click.option("--service", "service_contract", required=True, help="Service contract address.")
@pass_session
@_guard
def buy(session: Session, service_contract):
    """Purchase one access token at the listed fixed price."""
    wallet = session.load_wallet()
    platform = session.platform()
    info = platform.info()
    exchange = info["contracts"]["exchange"]
    listing = platform.call(exchange, "get_listing", {"service": service_contract})
    if listing is None:
        _fail(f"no listing for service {service_contract}")
    price = int(listing["price"])
    tx = wallet.sign_transaction(
        exchange, "buy", {"service": service_contract},
        value=str(price), nonce=platform.nonce(wallet.eoa.hex),
    )
    receipt = platform.submit_tx(tx)
    if receipt["status"] != "ok":
        _fail(f"purchase reverted: {receipt['error']}", EXIT_REVERT)
    session.emit(
        {"service": service_contract, "price": str(price), "height": receipt["height"]},
        f"purchased access to {service_contract} for {to_display(price)} native tokens",
    )


# -- accessing ------------------------------------------------------------------------------

@main.command()
@click.option("--service", "service_contract", required=True, help="Service contract address.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write the payload here instead of stdout.")
@pass_session
@_guard
def access(session: Session, service_contract, out_path):
    """Present credential and proof of purchase; fetch the service payload."""
    wallet = session.load_wallet()
    if not wallet.vc_jwt:
        _fail("no credential in keystore; run `medsim join` first")
    platform = session.platform()
    info = platform.info()
    offering = platform.call(info["contracts"]["factory"], "offering_of", {"service": service_contract})
    if offering is None:
        _fail(f"unknown service contract {service_contract}")
    base_url, service_id = clients.parse_service_url(offering["service_url"])
    connector = session.connector(base_url)

    challenge = connector.challenge()
    vp = wallet.build_presentation(challenge["nonce"])
    granted, body = connector.request_access(service_id, vp)
    if not granted:
        click.echo(f"access denied at stage {body['stage']}: {body['reason']}", err=True)
        sys.exit(EXIT_DENIAL_BASE + int(body["stage"]))
    payload = connector.fetch_payload(service_id, body["grant_token"])
    if out_path:
        Path(out_path).write_bytes(payload)
        session.emit(
            {"written": out_path, "bytes": len(payload)},
            f"payload written to {out_path} ({len(payload)} bytes)",
        )
    else:
        sys.stdout.buffer.write(payload)


if __name__ == "__main__":
    main()
