"""FastAPI application wiring the in-process stack to its HTTP surface."""

from __future__ import annotations

import base64
import binascii
from typing import Any

from fastapi import FastAPI, Header, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from medsim.api import schemas
from medsim.connector import AccessGrant, Connector
from medsim.crypto.keys import Signature
from medsim.errors import (
    BadTransactionError,
    ChallengeError,
    ConnectorError,
    ContentNotFoundError,
    CryptoError,
    DdsError,
    DidDeactivatedError,
    DidNotFoundError,
    DuplicateDidError,
    IssuerError,
    MedsimError,
    Revert,
    ScpError,
    UnknownContractError,
    UnknownMethodError,
    VdrError,
)
from medsim.issuer import CredentialRequest
from medsim.platform import Platform
from medsim.units import DECIMALS
from medsim.vdr import DidDocument

_STATUS_BY_ERROR = (
    (DidNotFoundError, 404),
    (ContentNotFoundError, 404),
    (UnknownContractError, 404),
    (UnknownMethodError, 404),
    (DuplicateDidError, 409),
    (DidDeactivatedError, 410),
    (BadTransactionError, 400),
    (ChallengeError, 400),
    (CryptoError, 400),
    (VdrError, 400),
    (DdsError, 400),
    (ScpError, 400),
    (IssuerError, 400),
    (ConnectorError, 404),
)


def _status_for(exc: MedsimError) -> int:
    for klass, status in _STATUS_BY_ERROR:
        if isinstance(exc, klass):
            return status
    return 400


def stringify_ints(value: Any) -> Any:
    """Render every integer as a decimal string (bools stay bools)."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, list):
        return [stringify_ints(v) for v in value]
    if isinstance(value, dict):
        return {k: stringify_ints(v) for k, v in value.items()}
    return value


def create_app(platform: Platform, connector: Connector | None = None) -> FastAPI:
    """Build the service; ``connector`` hosts the /connector/* routes."""
    app = FastAPI(title="medsim", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.platform = platform
    app.state.connector = connector

    @app.exception_handler(MedsimError)
    async def medsim_error_handler(request: Request, exc: MedsimError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    # -- platform info ------------------------------------------------------------

    @app.get("/platform", response_model=schemas.PlatformInfoResponse)
    def platform_info():
        return schemas.PlatformInfoResponse(
            contracts=platform.contracts,
            issuer_did=platform.issuer.did,
            native_decimals=DECIMALS,
            height=platform.chain.height,
            now=platform.clock.now(),
        )

    # -- verifiable data registry ---------------------------------------------------

    @app.post("/dids", response_model=schemas.CreateDidResponse, status_code=201)
    def create_did(body: schemas.CreateDidRequest):
        document = DidDocument.from_dict(body.document.model_dump())
        return schemas.CreateDidResponse(did=str(platform.vdr.create(document)))

    @app.get("/dids/{did}")
    def resolve_did(did: str):
        return platform.vdr.resolve(did).to_dict()

    @app.patch("/dids/{did}")
    def update_did(did: str, body: schemas.UpdateDidRequest):
        document = DidDocument.from_dict(body.document.model_dump())
        proof = Signature.from_hex("identity", body.proof)
        platform.vdr.update(did, document, proof)
        return {"updated": did}

    @app.delete("/dids/{did}")
    def deactivate_did(did: str, body: schemas.DeactivateDidRequest):
        proof = Signature.from_hex("identity", body.proof)
        platform.vdr.deactivate(did, proof)
        return {"deactivated": did}

    # -- distributed data storage ----------------------------------------------------

    @app.post("/dds", response_model=schemas.PutContentResponse, status_code=201)
    async def put_content(request: Request):
        content = await request.body()
        return schemas.PutContentResponse(cid=str(platform.dds.put(content)))

    @app.get("/dds/{cid}")
    def get_content(cid: str):
        try:
            content = platform.dds.get(cid)
        except ValueError as exc:
            raise DdsError(str(exc)) from exc
        return Response(content=content, media_type="application/octet-stream")

    # -- ledger -------------------------------------------------------------------------

    @app.post("/tx", response_model=schemas.ReceiptResponse)
    def submit_tx(body: schemas.TransactionRequest):
        receipt = platform.chain.submit(body.to_tx())
        payload = receipt.to_dict()
        payload["result"] = stringify_ints(payload["result"])
        return payload

    @app.post("/call", response_model=schemas.CallResponse)
    def call_static(body: schemas.CallRequest):
        result = platform.chain.call_static(body.contract, body.method, body.args)
        return schemas.CallResponse(result=stringify_ints(result))

    @app.get("/events", response_model=list[schemas.EventModel])
    def events(from_height: int = Query(default=0, ge=0)):
        return [e.to_dict() for e in platform.chain.events_from(from_height)]

    @app.get("/state/balance/{eoa}", response_model=schemas.BalanceResponse)
    def balance(eoa: str):
        return schemas.BalanceResponse(
            eoa=eoa.lower(), balance=str(platform.chain.balances.get(eoa.lower(), 0))
        )

    @app.get("/state/nonce/{eoa}")
    def nonce(eoa: str):
        return {"eoa": eoa.lower(), "nonce": platform.chain.nonces.get(eoa.lower(), 0)}

    # -- issuer ----------------------------------------------------------------------------

    @app.get("/issuer/challenge", response_model=schemas.ChallengeResponse)
    def issuer_challenge(did: str = Query(...)):
        challenge = platform.issuer.get_challenge(did)
        return schemas.ChallengeResponse(**challenge.__dict__)

    @app.post("/issuer/credentials", response_model=schemas.CredentialResponse)
    def issue_credential(body: schemas.CredentialRequestModel):
        issued = platform.issuer.issue(CredentialRequest.from_dict(body.model_dump()))
        return schemas.CredentialResponse(**issued)

    @app.post("/issuer/revocations/{vc_id}")
    def revoke_credential(vc_id: str, x_admin_token: str = Header(default="")):
        try:
            platform.issuer.revoke(vc_id, x_admin_token)
        except IssuerError as exc:
            if "admin token" in str(exc):
                return JSONResponse(status_code=403, content={"error": "IssuerError", "detail": str(exc)})
            raise
        return {"revoked": vc_id}

    @app.get("/issuer/did", response_model=schemas.IssuerInfoResponse)
    def issuer_did():
        return schemas.IssuerInfoResponse(did=platform.issuer.did, document=platform.issuer.did_document())

    # -- connector ------------------------------------------------------------------------------

    if connector is not None:
        @app.get("/connector/challenge", response_model=schemas.ChallengeResponse)
        def connector_challenge():
            challenge = connector.get_challenge()
            return schemas.ChallengeResponse(**challenge.__dict__)

        @app.post("/connector/services", response_model=schemas.DeployServiceResponse, status_code=201)
        def deploy_service(body: schemas.DeployServiceRequest):
            try:
                payload = base64.b64decode(body.payload_b64, validate=True)
            except (binascii.Error, ValueError) as exc:
                raise ConnectorError(f"payload_b64 does not decode: {exc}") from exc
            service, cid = connector.deploy_service(payload, body.description)
            return schemas.DeployServiceResponse(
                service_id=service.id, cid=str(cid), service_url=service.service_url
            )

        @app.get("/connector/services")
        def list_services():
            return [
                {"service_id": s.id, "service_url": s.service_url, "description_cid": s.description_cid}
                for s in connector.list_services()
            ]

        @app.post("/connector/services/{service_id}/access")
        def request_access(service_id: str, body: schemas.AccessRequest):
            outcome = connector.request_access(service_id, body.vp)
            if isinstance(outcome, AccessGrant):
                return schemas.AccessGrantResponse(
                    grant_token=outcome.token, expires_at=outcome.expires_at
                ).model_dump()
            return JSONResponse(status_code=403, content=schemas.DenialResponse(
                stage=outcome.stage, reason=outcome.reason
            ).model_dump())

        @app.get("/connector/services/{service_id}/payload")
        def fetch_payload(service_id: str, authorization: str = Header(default="")):
            scheme, _, token = authorization.partition(" ")
            if scheme.lower() != "bearer" or not token:
                return JSONResponse(status_code=401, content={"error": "ConnectorError",
                                                              "detail": "bearer grant token required"})
            try:
                payload = connector.fetch_payload(service_id, token)
            except ConnectorError as exc:
                return JSONResponse(status_code=401, content={"error": "ConnectorError", "detail": str(exc)})
            return Response(content=payload, media_type="application/octet-stream")

    return app
