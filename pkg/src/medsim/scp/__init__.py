"""Deterministic simulated contract ledger."""

from medsim.scp.chain import Chain, Context, Contract, Event, Receipt, coerce_amount

__all__ = ["Chain", "Context", "Contract", "Event", "Receipt", "coerce_amount"]
