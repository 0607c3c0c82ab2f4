"""medsim: desk-scale simulator of an SSI-native decentralised service marketplace.

The package wires four simulated infrastructure pieces (verifiable data
registry, content-addressed storage, contract ledger, clock) together with
the actor services (issuer, connector), a wallet CLI and a deterministic
scenario harness.
"""

__version__ = "0.1.0"
