"""Request/response models for the HTTP surface.

Monetary quantities cross the wire as decimal strings: native and token
amounts exceed 2^53 and would corrupt in JavaScript clients otherwise.
"""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class DidDocumentModel(BaseModel):
    id: str | None = None
    verificationMethod: list[dict]
    deactivated: bool = False


class CreateDidRequest(BaseModel):
    document: DidDocumentModel


class CreateDidResponse(BaseModel):
    did: str


class UpdateDidRequest(BaseModel):
    document: DidDocumentModel
    proof: str  # identity-key signature, hex


class DeactivateDidRequest(BaseModel):
    proof: str


class PutContentResponse(BaseModel):
    cid: str


class TransactionRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    sender: str = Field(alias="from")
    nonce: int
    contract: str
    method: str
    args: dict[str, Any]
    value: str
    signature: str

    def to_tx(self) -> dict:
        return {
            "from": self.sender,
            "nonce": self.nonce,
            "contract": self.contract,
            "method": self.method,
            "args": self.args,
            "value": self.value,
            "signature": self.signature,
        }


class EventModel(BaseModel):
    emitter: str
    name: str
    payload: dict[str, Any]
    tx_height: int


class ReceiptResponse(BaseModel):
    status: str
    events: list[EventModel]
    error: str | None
    result: Any
    height: int | None


class CallRequest(BaseModel):
    contract: str
    method: str
    args: dict[str, Any] = Field(default_factory=dict)


class CallResponse(BaseModel):
    result: Any  # integers rendered as decimal strings


class BalanceResponse(BaseModel):
    eoa: str
    balance: str


class ChallengeResponse(BaseModel):
    nonce: str
    audience: str | None
    issued_at: int
    ttl: int


class CredentialRequestModel(BaseModel):
    did: str
    challenge_nonce: str
    sigma_id: str  # 64-byte hex
    sigma_w: str  # 65-byte r||s||v hex


class CredentialResponse(BaseModel):
    vc_jwt: str
    vc_id: str


class IssuerInfoResponse(BaseModel):
    did: str
    document: dict


class DeployServiceRequest(BaseModel):
    payload_b64: str
    description: dict[str, Any]


class DeployServiceResponse(BaseModel):
    service_id: str
    cid: str
    service_url: str


class AccessRequest(BaseModel):
    vp: str  # compact JWT


class AccessGrantResponse(BaseModel):
    grant_token: str
    expires_at: int


class DenialResponse(BaseModel):
    stage: int
    reason: str


class PlatformInfoResponse(BaseModel):
    contracts: dict[str, str]
    issuer_did: str
    native_decimals: int
    height: int
    now: int
