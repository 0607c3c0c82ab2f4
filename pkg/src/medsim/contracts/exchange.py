"""Fixed-rate exchange: one whole access token for an exact native price.

The buy path re-checks both parties' credential status at purchase time and
settles both legs inside the surrounding transaction, so a failure at any
point returns the native tokens to the consumer and leaves the provider's
access tokens untouched.
"""

from __future__ import annotations

from medsim.errors import Revert
from medsim.scp import Contract, coerce_amount
from medsim.units import ONE_TOKEN

REASON_UNKNOWN_LISTING = "no listing for this service"
REASON_WRONG_AMOUNT = "attached value does not equal the fixed price"
REASON_CONSUMER_VC = "consumer does not hold a valid credential"
REASON_PROVIDER_VC = "provider does not hold a valid credential"
REASON_ALLOWANCE = "sale allowance exhausted"


class FixedRateExchangeContract(Contract):
    ABI = frozenset({"set_factory", "create_listing", "buy", "get_listing", "listings"})
    PAYABLE = frozenset({"buy"})

    def init(self, ctx, identity, admin):
        self.storage = {
            "identity": identity,
            "admin": admin.lower(),
            "factory": None,
            "listings": {},  # service contract -> {access_token, price, provider}
        }

    def set_factory(self, ctx, factory):
        # one-shot wiring at bootstrap; the factory address exists only after
        # this contract does
        if ctx.caller.lower() != self.storage["admin"]:
            raise Revert("caller is not the exchange admin")
        if self.storage["factory"] is not None:
            raise Revert("factory is already set")
        self.storage["factory"] = factory

    def create_listing(self, ctx, service, access_token, price, provider):
        if ctx.caller != self.storage["factory"]:
            raise Revert("only the factory registers listings")
        price = coerce_amount(price)
        if price <= 0:
            raise Revert("price must be positive")
        self.storage["listings"][service] = {
            "access_token": access_token,
            "price": str(price),
            "provider": provider.lower(),
        }

    def buy(self, ctx, service):
        listing = self.storage["listings"].get(service)
        if listing is None:
            raise Revert(REASON_UNKNOWN_LISTING)
        price = int(listing["price"])
        provider = listing["provider"]
        consumer = ctx.origin.lower()
        if ctx.value != price:
            raise Revert(REASON_WRONG_AMOUNT)
        identity = self.storage["identity"]
        if not ctx.call(identity, "has_valid_status", eoa=consumer):
            raise Revert(REASON_CONSUMER_VC)
        if not ctx.call(identity, "has_valid_status", eoa=provider):
            raise Revert(REASON_PROVIDER_VC)
        token = listing["access_token"]
        if (
            ctx.call(token, "allowance", owner=provider, spender=self.address) < ONE_TOKEN
            or ctx.call(token, "balance_of", owner=provider) < ONE_TOKEN
        ):
            raise Revert(REASON_ALLOWANCE)
        # both legs settle inside this transaction: native to the provider,
        # one access token to the consumer
        ctx.transfer_native(provider, price)
        ctx.call(token, "transfer_from", owner=provider, to=consumer, amount=ONE_TOKEN)
        ctx.emit("AccessPurchased", {
            "service": service, "consumer": consumer,
            "provider": provider, "price": str(price),
        })
        return {"service": service, "price": str(price)}

    def get_listing(self, ctx, service):
        listing = self.storage["listings"].get(service)
        return dict(listing) if listing else None

    def listings(self, ctx):
        return {svc: dict(entry) for svc, entry in self.storage["listings"].items()}
