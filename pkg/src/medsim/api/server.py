"""`medsim-server`: run the HTTP stack under uvicorn."""

from __future__ import annotations

import json
from pathlib import Path

import click
import uvicorn

from medsim.api.app import create_app
from medsim.platform import Platform, PlatformConfig


def build_app(config_path: str | None, base_url: str) -> tuple:
    if config_path:
        raw = json.loads(Path(config_path).read_text())
        config = PlatformConfig.from_dict(raw)
    else:
        config = PlatformConfig()
    platform = Platform(config)
    connector = platform.new_connector("default", base_url)
    return create_app(platform, connector), platform


@click.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Platform config JSON: actors, seeds, determinism, validity.")
@click.option("--base-url", default=None,
              help="Public base URL used in hosted service URLs (default http://HOST:PORT).")
def main(host: str, port: int, config_path: str | None, base_url: str | None):
    """Serve the registry, storage, ledger, issuer and a default connector."""
    base = base_url or f"http://{host}:{port}"
    app, platform = build_app(config_path, base)
    click.echo(f"issuer DID: {platform.issuer.did}")
    click.echo(f"issuer admin token: {platform.issuer.admin_token}")
    click.echo(f"contracts: {json.dumps(platform.contracts, indent=2)}")
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
