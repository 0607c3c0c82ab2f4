"""Randomness source, seedable for deterministic scenario replays."""

from __future__ import annotations

import random
import secrets


class Entropy:
    """Defaults to OS randomness; a seed switches to a deterministic stream."""

    def __init__(self, seed: int | None = None):
        self._rng = random.Random(seed) if seed is not None else None

    def token_bytes(self, n: int) -> bytes:
        if self._rng is not None:
            return self._rng.randbytes(n)
        return secrets.token_bytes(n)

    def token_hex(self, n: int) -> str:
        return self.token_bytes(n).hex()
