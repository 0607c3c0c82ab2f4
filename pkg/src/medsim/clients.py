"""Thin HTTP clients for the platform and connector services.

The CLI (and anything else living outside the server process) talks to the
stack exclusively through these. Tests swap ``make_http_client`` for an
in-process ASGI client.
"""

from __future__ import annotations

import base64
from urllib.parse import urlsplit

import httpx

from medsim.errors import MedsimError


class ServiceError(MedsimError):
    """Non-2xx answer from a service, with the decoded body when available."""

    def __init__(self, status_code: int, body):
        self.status_code = status_code
        self.body = body
        detail = body.get("detail") if isinstance(body, dict) else body
        super().__init__(f"HTTP {status_code}: {detail}")


def make_http_client(base_url: str) -> httpx.Client:
    return httpx.Client(base_url=base_url, timeout=30.0)


def _decode(response: httpx.Response):
    content_type = response.headers.get("content-type", "")
    if content_type.startswith("application/json"):
        return response.json()
    return response.content


def _checked(response: httpx.Response):
    body = _decode(response)
    if response.status_code >= 400:
        raise ServiceError(response.status_code, body)
    return body


def parse_service_url(service_url: str) -> tuple[str, str]:
    """Split a hosted-payload URL into (connector base url, service id)."""
    marker = "/connector/services/"
    split = urlsplit(service_url)
    if marker not in split.path or not split.scheme:
        raise MedsimError(f"not a connector payload URL: {service_url!r}")
    prefix, _, rest = split.path.partition(marker)
    service_id = rest.split("/", 1)[0]
    base = f"{split.scheme}://{split.netloc}{prefix}"
    return base, service_id


class PlatformClient:
    def __init__(self, base_url: str, client: httpx.Client | None = None):
        self._http = client or make_http_client(base_url)

    def info(self) -> dict:
        return _checked(self._http.get("/platform"))

    def create_did(self, document: dict) -> str:
        return _checked(self._http.post("/dids", json={"document": document}))["did"]

    def resolve_did(self, did: str) -> dict:
        return _checked(self._http.get(f"/dids/{did}"))

    def put_content(self, content: bytes) -> str:
        return _checked(self._http.post("/dds", content=content))["cid"]

    def get_content(self, cid: str) -> bytes:
        return _checked(self._http.get(f"/dds/{cid}"))

    def submit_tx(self, tx: dict) -> dict:
        return _checked(self._http.post("/tx", json=tx))

    def call(self, contract: str, method: str, args: dict | None = None):
        body = {"contract": contract, "method": method, "args": args or {}}
        return _checked(self._http.post("/call", json=body))["result"]

    def balance(self, eoa: str) -> int:
        return int(_checked(self._http.get(f"/state/balance/{eoa}"))["balance"])

    def nonce(self, eoa: str) -> int:
        return int(_checked(self._http.get(f"/state/nonce/{eoa}"))["nonce"])

    def issuer_challenge(self, did: str) -> dict:
        return _checked(self._http.get("/issuer/challenge", params={"did": did}))

    def issue_credential(self, did: str, nonce: str, sigma_id_hex: str, sigma_w_hex: str) -> dict:
        return _checked(self._http.post("/issuer/credentials", json={
            "did": did, "challenge_nonce": nonce,
            "sigma_id": sigma_id_hex, "sigma_w": sigma_w_hex,
        }))


class ConnectorClient:
    def __init__(self, base_url: str, client: httpx.Client | None = None):
        self._http = client or make_http_client(base_url)

    def challenge(self) -> dict:
        return _checked(self._http.get("/connector/challenge"))

    def deploy_service(self, payload: bytes, description: dict) -> dict:
        return _checked(self._http.post("/connector/services", json={
            "payload_b64": base64.b64encode(payload).decode(),
            "description": description,
        }))

    def request_access(self, service_id: str, vp_jwt: str) -> tuple[bool, dict]:
        """(granted, body); body is the grant or the {stage, reason} denial."""
        response = self._http.post(f"/connector/services/{service_id}/access", json={"vp": vp_jwt})
        body = _decode(response)
        if response.status_code == 200:
            return True, body
        if response.status_code == 403 and isinstance(body, dict) and "stage" in body:
            return False, body
        raise ServiceError(response.status_code, body)

    def fetch_payload(self, service_id: str, grant_token: str) -> bytes:
        response = self._http.get(
            f"/connector/services/{service_id}/payload",
            headers={"Authorization": f"Bearer {grant_token}"},
        )
        if response.status_code != 200:
            raise ServiceError(response.status_code, _decode(response))
        return response.content
