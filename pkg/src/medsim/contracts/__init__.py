"""The six protocol contracts plus a diagnostic probe, as ledger state machines."""

from medsim.contracts.access_token import AccessTokenContract
from medsim.contracts.exchange import FixedRateExchangeContract
from medsim.contracts.factory import FactoryContract
from medsim.contracts.identity import IdentityContract
from medsim.contracts.probe import ProbeContract
from medsim.contracts.router import RouterContract
from medsim.contracts.service import ServiceContract
from medsim.scp import Chain

# code id -> (class, deploy policy); service and access-token instances can
# only come out of the factory
CODE_REGISTRY = {
    "identity": (IdentityContract, "admin"),
    "factory": (FactoryContract, "admin"),
    "router": (RouterContract, "admin"),
    "fixed_rate_exchange": (FixedRateExchangeContract, "admin"),
    "service": (ServiceContract, "internal"),
    "access_token": (AccessTokenContract, "internal"),
    "probe": (ProbeContract, "admin"),
}


def register_protocol_codes(chain: Chain) -> None:
    for code_id, (cls, policy) in CODE_REGISTRY.items():
        chain.register_code(code_id, cls, policy)


def deploy_protocol(chain: Chain, issuer_eoa: str, admin_eoa: str) -> dict[str, str]:
    """Deploy and wire the protocol contracts; returns their addresses.

    The exchange learns the factory address in a second step because the
    factory constructor needs the exchange address first.
    """
    register_protocol_codes(chain)
    identity = chain.deploy("identity", {"controller": issuer_eoa}, deployer=admin_eoa)
    exchange = chain.deploy("fixed_rate_exchange", {"identity": identity, "admin": admin_eoa}, deployer=admin_eoa)
    factory = chain.deploy("factory", {"identity": identity, "exchange": exchange}, deployer=admin_eoa)
    router = chain.deploy("router", {"admin": admin_eoa, "exchanges": [exchange]}, deployer=admin_eoa)
    probe = chain.deploy("probe", {}, deployer=admin_eoa)
    chain.admin_call(exchange, "set_factory", {"factory": factory}, caller=admin_eoa)
    return {
        "identity": identity,
        "exchange": exchange,
        "factory": factory,
        "router": router,
        "probe": probe,
    }


__all__ = [
    "AccessTokenContract",
    "CODE_REGISTRY",
    "FactoryContract",
    "FixedRateExchangeContract",
    "IdentityContract",
    "ProbeContract",
    "RouterContract",
    "ServiceContract",
    "register_protocol_codes",
]
