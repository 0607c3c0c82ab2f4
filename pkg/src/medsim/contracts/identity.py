"""Identity contract: on-chain credential-status registry, issuer-controlled.

Holds one credential binding per account address and the revocation flags;
every other contract gates its operations through has_valid_status.
"""

from __future__ import annotations

from medsim.errors import Revert
from medsim.scp import Contract


class IdentityContract(Contract):
    ABI = frozenset({"add_user", "has_valid_status", "is_revoked", "revoke", "status_of", "controller"})

    def init(self, ctx, controller):
        self.storage = {
            "controller": controller.lower(),
            "by_eoa": {},  # eoa -> credential id
            "by_id": {},   # credential id -> status record
        }

    def _require_controller(self, ctx):
        if ctx.caller.lower() != self.storage["controller"]:
            raise Revert("caller is not the identity controller")

    def add_user(self, ctx, vc_id, eoa, issuance_date, expiration_date):
        self._require_controller(ctx)
        eoa = str(eoa).lower()
        vc_id = str(vc_id)
        issuance, expiration = int(issuance_date), int(expiration_date)
        if issuance >= expiration:
            raise Revert("issuance date must precede expiration date")
        if eoa in self.storage["by_eoa"]:
            raise Revert("account already holds a credential binding")
        if vc_id in self.storage["by_id"]:
            raise Revert("credential id already registered")
        self.storage["by_eoa"][eoa] = vc_id
        self.storage["by_id"][vc_id] = {
            "user_eoa": eoa,
            "issuance_date": issuance,
            "expiration_date": expiration,
            "revoked": False,
        }
        ctx.emit("UserAdded", {
            "vc_id": vc_id, "eoa": eoa,
            "issuance_date": issuance, "expiration_date": expiration,
        })

    def has_valid_status(self, ctx, eoa):
        vc_id = self.storage["by_eoa"].get(str(eoa).lower())
        if vc_id is None:
            return False
        status = self.storage["by_id"][vc_id]
        return (
            not status["revoked"]
            and status["issuance_date"] <= ctx.now <= status["expiration_date"]
        )

    def is_revoked(self, ctx, vc_id):
        status = self.storage["by_id"].get(str(vc_id))
        if status is None:
            return True  # fail closed on unknown credential ids
        return status["revoked"]

    def revoke(self, ctx, vc_id):
        self._require_controller(ctx)
        status = self.storage["by_id"].get(str(vc_id))
        if status is None:
            raise Revert("unknown credential id")
        if not status["revoked"]:
            status["revoked"] = True
            ctx.emit("VcRevoked", {"vc_id": str(vc_id), "eoa": status["user_eoa"]})

    def status_of(self, ctx, eoa):
        """Full status record, or None when the account holds no binding."""
        vc_id = self.storage["by_eoa"].get(str(eoa).lower())
        if vc_id is None:
            return None
        return {"vc_id": vc_id, **self.storage["by_id"][vc_id]}

    def controller(self, ctx):
        return self.storage["controller"]
