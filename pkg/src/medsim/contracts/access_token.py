"""Access token: fungible-token contract gating service consumption.

Standard fungible semantics (balance/transfer/approve/transfer_from) plus
owner-only mint and burn. Created by the factory, which mints the initial
supply to the provider and pre-approves the exchange so the sale is live.
"""

from __future__ import annotations

from medsim.errors import Revert
from medsim.scp import Contract, coerce_amount
from medsim.units import DECIMALS


class AccessTokenContract(Contract):
    ABI = frozenset({
        "balance_of", "transfer", "approve", "allowance", "transfer_from",
        "mint", "burn", "total_supply", "owner", "decimals", "minted", "burned",
    })

    def init(self, ctx, owner, supply, exchange):
        supply = coerce_amount(supply)
        owner = owner.lower()
        self.storage = {
            "owner": owner,
            "balances": {owner: supply},
            "allowances": {owner: {exchange.lower(): supply}},
            "minted": supply,
            "burned": 0,
        }
        ctx.emit("Mint", {"to": owner, "amount": str(supply)})

    # -- views -------------------------------------------------------------------

    def balance_of(self, ctx, owner):
        return self.storage["balances"].get(str(owner).lower(), 0)

    def allowance(self, ctx, owner, spender):
        return self.storage["allowances"].get(str(owner).lower(), {}).get(str(spender).lower(), 0)

    def total_supply(self, ctx):
        return self.storage["minted"] - self.storage["burned"]

    def owner(self, ctx):
        return self.storage["owner"]

    def decimals(self, ctx):
        return DECIMALS

    def minted(self, ctx):
        return self.storage["minted"]

    def burned(self, ctx):
        return self.storage["burned"]

    # -- transfers ---------------------------------------------------------------

    def _move(self, source: str, dest: str, amount: int) -> None:
        balances = self.storage["balances"]
        if balances.get(source, 0) < amount:
            raise Revert("insufficient token balance")
        balances[source] -= amount
        balances[dest] = balances.get(dest, 0) + amount
        if balances[source] == 0:
            del balances[source]  # keep storage canonical for state hashing

    def transfer(self, ctx, to, amount):
        amount = coerce_amount(amount)
        self._move(ctx.caller.lower(), str(to).lower(), amount)
        ctx.emit("Transfer", {"from": ctx.caller.lower(), "to": str(to).lower(), "amount": str(amount)})

    def approve(self, ctx, spender, amount):
        # second approve overwrites the first
        amount = coerce_amount(amount)
        owner = ctx.caller.lower()
        spender = str(spender).lower()
        allowances = self.storage["allowances"].setdefault(owner, {})
        if amount == 0:
            allowances.pop(spender, None)
            if not allowances:
                self.storage["allowances"].pop(owner, None)
        else:
            allowances[spender] = amount

    def transfer_from(self, ctx, owner, to, amount):
        amount = coerce_amount(amount)
        owner = str(owner).lower()
        spender = ctx.caller.lower()
        granted = self.storage["allowances"].get(owner, {}).get(spender, 0)
        if granted < amount:
            raise Revert("insufficient allowance")
        self._move(owner, str(to).lower(), amount)
        remaining = granted - amount
        if remaining:
            self.storage["allowances"][owner][spender] = remaining
        else:
            self.storage["allowances"][owner].pop(spender, None)
            if not self.storage["allowances"][owner]:
                del self.storage["allowances"][owner]
        ctx.emit("Transfer", {"from": owner, "to": str(to).lower(), "amount": str(amount)})

    # -- supply management ---------------------------------------------------------

    def _require_owner(self, ctx):
        if ctx.caller.lower() != self.storage["owner"]:
            raise Revert("caller is not the token owner")

    def mint(self, ctx, amount):
        self._require_owner(ctx)
        amount = coerce_amount(amount)
        owner = self.storage["owner"]
        self.storage["balances"][owner] = self.storage["balances"].get(owner, 0) + amount
        self.storage["minted"] += amount
        ctx.emit("Mint", {"to": owner, "amount": str(amount)})

    def burn(self, ctx, amount):
        self._require_owner(ctx)
        amount = coerce_amount(amount)
        owner = self.storage["owner"]
        if self.storage["balances"].get(owner, 0) < amount:
            raise Revert("burn exceeds owner balance")
        self._move_burn(owner, amount)
        ctx.emit("Burn", {"from": owner, "amount": str(amount)})

    def _move_burn(self, owner: str, amount: int) -> None:
        balances = self.storage["balances"]
        balances[owner] -= amount
        if balances[owner] == 0:
            del balances[owner]
        self.storage["burned"] += amount
