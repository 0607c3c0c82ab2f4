"""Single-use challenges for the credential-issuance and access flows."""

from __future__ import annotations

import threading
from dataclasses import dataclass

from medsim.clock import SystemClock
from medsim.entropy import Entropy
from medsim.errors import (
    AudienceMismatchError,
    ExpiredChallengeError,
    ReplayedChallengeError,
    UnknownChallengeError,
)

DEFAULT_TTL = 300  # seconds


@dataclass(frozen=True)
class Challenge:
    nonce: str  # 64 hex chars
    audience: str | None  # DID or EOA, None when issued anonymously
    issued_at: int
    ttl: int

    @property
    def message(self) -> bytes:
        """The bytes both parties sign: the ASCII nonce."""
        return self.nonce.encode("ascii")

    def expired(self, now: int) -> bool:
        return now > self.issued_at + self.ttl


class ChallengeStore:
    """Issues nonces and consumes each at most once (check-and-consume is atomic)."""

    def __init__(self, clock=None, entropy: Entropy | None = None, default_ttl: int = DEFAULT_TTL):
        self._clock = clock or SystemClock()
        self._entropy = entropy or Entropy()
        self._default_ttl = default_ttl
        self._lock = threading.Lock()
        self._live: dict[str, Challenge] = {}
        self._consumed: set[str] = set()

    def issue(self, audience: str | None = None, ttl: int | None = None) -> Challenge:
        ttl = self._default_ttl if ttl is None else ttl
        if ttl <= 0:
            raise ValueError("challenge ttl must be positive")
        with self._lock:
            while True:
                nonce = self._entropy.token_hex(32)
                if nonce not in self._live and nonce not in self._consumed:
                    break
            challenge = Challenge(nonce, audience, self._clock.now(), ttl)
            self._live[nonce] = challenge
            return challenge

    def consume(self, nonce: str, audience: str | None = None) -> Challenge:
        """Validate and burn a nonce; raises a specific ChallengeError otherwise."""
        with self._lock:
            if nonce in self._consumed:
                raise ReplayedChallengeError(f"challenge already used: {nonce[:16]}…")
            challenge = self._live.get(nonce)
            if challenge is None:
                raise UnknownChallengeError("no such challenge")
            if challenge.expired(self._clock.now()):
                del self._live[nonce]
                raise ExpiredChallengeError("challenge expired")
            if challenge.audience is not None and challenge.audience != audience:
                raise AudienceMismatchError("challenge was issued to a different audience")
            del self._live[nonce]
            self._consumed.add(nonce)
            return challenge
