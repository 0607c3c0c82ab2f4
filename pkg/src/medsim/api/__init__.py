"""HTTP surface: FastAPI service exposing registry, storage, ledger, issuer
and connector endpoints."""

from medsim.api.app import create_app

__all__ = ["create_app"]
