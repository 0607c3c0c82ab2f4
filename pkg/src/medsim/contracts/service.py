"""Service contract: single-token NFT holding the metadata of one tokenized
service and the proof-of-purchase check against its access token."""

from __future__ import annotations

from medsim.errors import Revert
from medsim.scp import Contract
from medsim.units import ONE_TOKEN


class ServiceContract(Contract):
    ABI = frozenset({"verify_proof_of_purchase", "owner", "metadata", "transfer_ownership"})

    def init(self, ctx, alias, cid, service_url, owner, access_token):
        self.storage = {
            "alias": alias,
            "cid": cid,
            "service_url": service_url,
            "owner": owner.lower(),
            "access_token": access_token,
        }

    def verify_proof_of_purchase(self, ctx, consumer):
        """Owning at least one whole access token is the purchase proof."""
        balance = ctx.call(self.storage["access_token"], "balance_of", owner=str(consumer).lower())
        return balance >= ONE_TOKEN

    def owner(self, ctx):
        return self.storage["owner"]

    def metadata(self, ctx):
        return dict(self.storage)

    def transfer_ownership(self, ctx, new_owner):
        if ctx.caller.lower() != self.storage["owner"]:
            raise Revert("caller does not own this service")
        self.storage["owner"] = str(new_owner).lower()
