"""Router contract: admin-maintained registry of active exchange contracts."""

from __future__ import annotations

from medsim.errors import Revert
from medsim.scp import Contract


class RouterContract(Contract):
    ABI = frozenset({"add_exchange", "remove_exchange", "list"})

    def init(self, ctx, admin, exchanges=()):
        self.storage = {"admin": admin.lower(), "exchanges": list(exchanges)}

    def _require_admin(self, ctx):
        if ctx.caller.lower() != self.storage["admin"]:
            raise Revert("caller is not the router admin")

    def add_exchange(self, ctx, address):
        self._require_admin(ctx)
        if address in self.storage["exchanges"]:
            raise Revert("exchange already registered")
        self.storage["exchanges"].append(address)

    def remove_exchange(self, ctx, address):
        self._require_admin(ctx)
        if address not in self.storage["exchanges"]:
            raise Revert("exchange not registered")
        self.storage["exchanges"].remove(address)

    def list(self, ctx):
        return list(self.storage["exchanges"])
