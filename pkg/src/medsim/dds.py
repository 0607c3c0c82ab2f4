"""Content-addressed storage mock: write-once blobs keyed by SHA-256."""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass

from medsim.errors import ContentNotFoundError, EmptyContentError


@dataclass(frozen=True)
class Cid:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 32:
            raise ValueError("content id must wrap a 32-byte digest")

    def __str__(self) -> str:
        return f"sha256-{self.digest.hex()}"

    @classmethod
    def parse(cls, text: str) -> "Cid":
        if not text.startswith("sha256-") or len(text) != 7 + 64:
            raise ValueError(f"not a sha256-<hex> content id: {text!r}")
        return cls(bytes.fromhex(text[7:]))

    @classmethod
    def of(cls, content: bytes) -> "Cid":
        return cls(hashlib.sha256(content).digest())


class Dds:
    """Idempotent put, integrity-checked get. Safe under concurrency by
    construction: entries are keyed by their own digest and never mutated."""

    def __init__(self):
        self._lock = threading.Lock()
        self._blobs: dict[bytes, bytes] = {}

    def put(self, content: bytes) -> Cid:
        if not content:
            raise EmptyContentError("refusing to store empty content")
        cid = Cid.of(content)
        with self._lock:
            self._blobs.setdefault(cid.digest, content)
        return cid

    def get(self, cid: Cid | str) -> bytes:
        if isinstance(cid, str):
            cid = Cid.parse(cid)
        with self._lock:
            content = self._blobs.get(cid.digest)
        if content is None:
            raise ContentNotFoundError(f"no content stored at {cid}")
        if hashlib.sha256(content).digest() != cid.digest:
            raise AssertionError("stored content no longer matches its digest")
        return content
