"""Factory contract: tokenizes services and tracks every deployed offering.

Tokenization checks the caller's credential status, deploys the service NFT
and its access-token contract, hands both to the provider, pre-approves the
exchange for the whole supply and registers the listing.
"""

from __future__ import annotations

from medsim.errors import Revert
from medsim.scp import Contract, coerce_amount
from medsim.units import ONE_TOKEN


class FactoryContract(Contract):
    ABI = frozenset({"tokenize", "list_offerings", "offering_of"})

    def init(self, ctx, identity, exchange):
        self.storage = {
            "identity": identity,
            "exchange": exchange,
            "offerings": [],
        }

    def tokenize(self, ctx, alias, cid, service_url, at_supply, price):
        provider = ctx.origin.lower()
        if not ctx.call(self.storage["identity"], "has_valid_status", eoa=provider):
            raise Revert("caller does not hold a valid credential")
        at_supply = coerce_amount(at_supply)
        price = coerce_amount(price)
        if at_supply < ONE_TOKEN:
            raise Revert("supply below one whole access token")
        if price <= 0:
            raise Revert("price must be positive")
        if not alias or not service_url:
            raise Revert("alias and service url are required")

        at_addr = ctx.deploy(
            "access_token", owner=provider, supply=at_supply, exchange=self.storage["exchange"],
        )
        service_addr = ctx.deploy(
            "service", alias=alias, cid=cid, service_url=service_url,
            owner=provider, access_token=at_addr,
        )
        ctx.call(
            self.storage["exchange"], "create_listing",
            service=service_addr, access_token=at_addr, price=price, provider=provider,
        )
        offering = {
            "alias": alias,
            "cid": cid,
            "service_url": service_url,
            "service_contract": service_addr,
            "access_token_contract": at_addr,
            "owner": provider,
            "price": str(price),
            "at_supply": str(at_supply),
        }
        self.storage["offerings"].append(offering)
        ctx.emit("ServiceTokenized", dict(offering))
        return {"service_contract": service_addr, "access_token_contract": at_addr}

    def list_offerings(self, ctx):
        return [dict(o) for o in self.storage["offerings"]]

    def offering_of(self, ctx, service):
        for offering in self.storage["offerings"]:
            if offering["service_contract"] == service:
                return dict(offering)
        return None
