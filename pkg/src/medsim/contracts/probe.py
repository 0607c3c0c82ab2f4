"""Diagnostic contract for fault injection: writes state, then reverts on
demand. Used by the harness and the atomicity test suites."""

from __future__ import annotations

from medsim.errors import Revert
from medsim.scp import Contract


class ProbeContract(Contract):
    ABI = frozenset({"write_then_revert", "write", "read"})

    def init(self, ctx):
        self.storage = {"writes": 0}

    def write(self, ctx):
        self.storage["writes"] += 1
        return self.storage["writes"]

    def write_then_revert(self, ctx):
        self.storage["writes"] += 100
        raise Revert("probe revert requested")

    def read(self, ctx):
        return self.storage["writes"]
