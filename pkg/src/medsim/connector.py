"""Provider-side connector: hosts service payloads, issues access challenges,
verifies presentations and proof of purchase, and serves granted payloads.

The verification pipeline runs seven ordered stages and reports the first
failing one; any verification error denies access (fail closed).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from medsim.clock import SystemClock
from medsim.crypto.challenges import Challenge, ChallengeStore
from medsim.crypto.jose import JwtError, decode_jwt, verify_jwt
from medsim.crypto.keys import Signature, verify_wallet
from medsim.dds import Cid, Dds
from medsim.encoding import canonical_json
from medsim.entropy import Entropy
from medsim.errors import (
    ChallengeError,
    ConnectorError,
    MalformedDocumentError,
    MalformedSignatureError,
    VdrError,
)
from medsim.scp import Chain
from medsim.vdr import Did, Vdr

GRANT_TTL = 60  # seconds; one payload fetch per grant

STAGE_PARSE = 1
STAGE_HOLDER_DID = 2
STAGE_PRESENTATION = 3
STAGE_CREDENTIAL = 4
STAGE_REVOCATION = 5
STAGE_WALLET_PROOF = 6
STAGE_PURCHASE = 7


@dataclass(frozen=True)
class HostedService:
    id: str
    payload: bytes
    service_url: str
    description_cid: str


@dataclass(frozen=True)
class AccessGrant:
    token: str
    service_id: str
    expires_at: int


@dataclass(frozen=True)
class Denial:
    stage: int
    reason: str


class Connector:
    def __init__(
        self,
        vdr: Vdr,
        dds: Dds,
        chain: Chain,
        identity_contract: str,
        factory_contract: str,
        base_url: str,
        clock=None,
        entropy: Entropy | None = None,
        grant_ttl: int = GRANT_TTL,
    ):
        self._vdr = vdr
        self._dds = dds
        self._chain = chain
        self._identity = identity_contract
        self._factory = factory_contract
        self._base_url = base_url.rstrip("/")
        self._clock = clock or SystemClock()
        self._entropy = entropy or Entropy()
        self._grant_ttl = grant_ttl
        self.challenges = ChallengeStore(clock=self._clock, entropy=self._entropy)
        self._services: dict[str, HostedService] = {}
        self._contracts: dict[str, str] = {}  # service id -> service contract
        self._grants: dict[str, AccessGrant] = {}
        self._counter = 0
        self._lock = threading.Lock()
        self.audit_log: list[dict] = []

    # -- provider-local operations --------------------------------------------------

    def deploy_service(self, payload: bytes, description: dict | bytes) -> tuple[HostedService, Cid]:
        """Host a payload and store its description off-ledger; the returned
        content id goes into the tokenization call."""
        if not payload:
            raise ConnectorError("service payload must not be empty")
        body = description if isinstance(description, bytes) else canonical_json(description)
        cid = self._dds.put(body)
        with self._lock:
            self._counter += 1
            service_id = f"svc-{self._counter}"
            service = HostedService(
                id=service_id,
                payload=payload,
                service_url=f"{self._base_url}/connector/services/{service_id}/payload",
                description_cid=str(cid),
            )
            self._services[service_id] = service
        return service, cid

    def get_service(self, service_id: str) -> HostedService:
        service = self._services.get(service_id)
        if service is None:
            raise ConnectorError(f"no hosted service {service_id!r}")
        return service

    def list_services(self) -> list[HostedService]:
        return list(self._services.values())

    # -- access flow -------------------------------------------------------------------

    def get_challenge(self, consumer_hint: str | None = None) -> Challenge:
        # challenges are not pre-bound to a consumer; the presentation proves
        # who answered
        return self.challenges.issue(audience=None)

    def request_access(self, service_id: str, vp_jwt: str) -> AccessGrant | Denial:
        try:
            service = self.get_service(service_id)
        except ConnectorError:
            raise  # unknown service is a routing error, not a pipeline denial
        outcome = self._verify_presentation(service, vp_jwt)
        self._audit(service_id, outcome)
        return outcome

    def fetch_payload(self, service_id: str, grant_token: str) -> bytes:
        service = self.get_service(service_id)
        with self._lock:
            grant = self._grants.get(grant_token)
            if grant is None or grant.service_id != service_id:
                raise ConnectorError("unknown grant token")
            del self._grants[grant_token]  # single fetch per grant
            if self._clock.now() > grant.expires_at:
                raise ConnectorError("grant expired")
        return service.payload

    # -- the seven-stage pipeline ---------------------------------------------------

    def _verify_presentation(self, service: HostedService, vp_jwt: str) -> AccessGrant | Denial:
        # stage 1: the envelope parses into the expected three-part layout
        try:
            header, payload, _, _ = decode_jwt(vp_jwt)
            kid = str(header["kid"])
            nonce = str(header["nonce"])
            vp = payload["vp"]
            if vp.get("type") != "VerifiablePresentation":
                raise JwtError("payload is not a presentation")
            credentials = vp["VerifiableCredential"]
            if not isinstance(credentials, list) or not credentials:
                raise JwtError("presentation carries no credential")
            vc_jwt = str(credentials[0])
            sigma_a_hex = str(payload["walletSignature"])
            if "#" not in kid:
                raise JwtError("kid carries no key fragment")
        except (JwtError, KeyError, TypeError) as exc:
            return Denial(STAGE_PARSE, f"presentation does not parse: {exc}")

        # stage 2: holder DID from the inner credential, resolvable, member-shaped
        try:
            _, vc_payload, _, _ = decode_jwt(vc_jwt)
            holder_did = str(vc_payload.get("sub", ""))
            if not holder_did:
                raise JwtError("credential names no subject")
            if kid.split("#", 1)[0] != holder_did:
                raise MalformedDocumentError("presentation key id and credential subject disagree")
            holder_doc = self._vdr.resolve(Did.parse(holder_did))
            if holder_doc.deactivated:
                raise MalformedDocumentError("holder DID is deactivated")
            if not holder_doc.is_member_shaped():
                raise MalformedDocumentError("holder document lacks the member verification methods")
            holder_eoa = holder_doc.eoa()
        except (JwtError, VdrError, MalformedDocumentError) as exc:
            return Denial(STAGE_HOLDER_DID, f"holder DID does not resolve: {exc}")

        # stage 3: presentation signature under the holder's identity key, and
        # the expected challenge, unconsumed; consumption happens here
        try:
            verify_jwt(vp_jwt, holder_doc.identity_public_key())
            self.challenges.consume(nonce, audience=None)
        except (JwtError, ChallengeError) as exc:
            return Denial(STAGE_PRESENTATION, f"presentation invalid: {exc}")

        # stage 4: issuer resolves, credential signature and validity window
        try:
            issuer_did = str(vc_payload.get("iss", ""))
            if not issuer_did:
                raise JwtError("credential names no issuer")
            issuer_doc = self._vdr.resolve(Did.parse(issuer_did))
            if issuer_doc.deactivated:
                raise MalformedDocumentError("issuer DID is deactivated")
            verify_jwt(vc_jwt, issuer_doc.identity_public_key())
            now = self._clock.now()
            if not (int(vc_payload.get("nbf", 0)) <= now <= int(vc_payload.get("exp", 0))):
                raise JwtError("credential outside its validity window")
            claimed_eoa = str(vc_payload.get("vc", {}).get("credentialSubject", {}).get("eoa", ""))
            if claimed_eoa.lower() != holder_eoa.hex:
                raise JwtError("credential does not bind the holder's wallet account")
            vc_id = str(vc_payload.get("jti", ""))
            if not vc_id:
                raise JwtError("credential carries no id")
        except (JwtError, VdrError, MalformedDocumentError, ValueError) as exc:
            return Denial(STAGE_CREDENTIAL, f"credential invalid: {exc}")

        # stage 5: on-chain revocation status (unknown ids read as revoked)
        if self._chain.call_static(self._identity, "is_revoked", {"vc_id": vc_id}):
            return Denial(STAGE_REVOCATION, "credential is revoked on-chain")

        # stage 6: wallet signature over the challenge recovers to the document account
        try:
            sigma_a = Signature.from_hex("wallet", sigma_a_hex)
            if not verify_wallet(holder_eoa, nonce.encode("ascii"), sigma_a):
                raise MalformedSignatureError("wallet signature does not recover to the account")
        except MalformedSignatureError as exc:
            return Denial(STAGE_WALLET_PROOF, f"wallet proof invalid: {exc}")

        # stage 7: proof of purchase via the service contract
        contract = self._service_contract(service)
        if contract is None:
            return Denial(STAGE_PURCHASE, "service is not tokenized yet")
        if not self._chain.call_static(contract, "verify_proof_of_purchase", {"consumer": holder_eoa.hex}):
            return Denial(STAGE_PURCHASE, "no access token held for this service")

        with self._lock:
            grant = AccessGrant(
                token=self._entropy.token_hex(32),
                service_id=service.id,
                expires_at=self._clock.now() + self._grant_ttl,
            )
            self._grants[grant.token] = grant
        return grant

    def _service_contract(self, service: HostedService) -> str | None:
        cached = self._contracts.get(service.id)
        if cached:
            return cached
        for offering in self._chain.call_static(self._factory, "list_offerings", {}):
            if offering["service_url"] == service.service_url:
                self._contracts[service.id] = offering["service_contract"]
                return offering["service_contract"]
        return None

    def _audit(self, service_id: str, outcome: AccessGrant | Denial) -> None:
        entry = {"time": self._clock.now(), "service_id": service_id}
        if isinstance(outcome, AccessGrant):
            entry.update(outcome="grant", expires_at=outcome.expires_at)
        else:
            entry.update(outcome="denial", stage=outcome.stage, reason=outcome.reason)
        self.audit_log.append(entry)
