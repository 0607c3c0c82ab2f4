"""In-process wiring of the whole stack: registry, storage, ledger, issuer,
connectors. Both the HTTP app and the scenario harness boot through here."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from medsim.clock import LogicalClock, SystemClock
from medsim.connector import Connector
from medsim.contracts import deploy_protocol
from medsim.dds import Dds
from medsim.entropy import Entropy
from medsim.errors import ScenarioError
from medsim.issuer import DEFAULT_VALIDITY, Issuer
from medsim.scp import Chain
from medsim.units import parse_display
from medsim.vdr import Vdr
from medsim.wallet import Wallet


@dataclass
class GenesisActor:
    """Named test actor funded at genesis; seeds make the keys reproducible."""

    name: str
    balance: int
    wallet_seed: bytes | None = None
    identity_seed: bytes | None = None


@dataclass
class PlatformConfig:
    deterministic: bool = False
    seed: int = 0
    start_time: int = 1_700_000_000
    vc_validity: int = DEFAULT_VALIDITY
    issuer_admin_token: str | None = None
    actors: list[GenesisActor] = field(default_factory=list)
    extra_allocations: dict[str, int] = field(default_factory=dict)  # eoa -> base units

    @classmethod
    def from_dict(cls, raw: dict) -> "PlatformConfig":
        actors = []
        for name, spec in (raw.get("actors") or {}).items():
            balance = spec.get("balance", "0")
            actors.append(GenesisActor(
                name=name,
                balance=parse_display(balance) if isinstance(balance, str) else int(balance),
                wallet_seed=bytes.fromhex(spec["wallet_seed"]) if spec.get("wallet_seed") else None,
                identity_seed=bytes.fromhex(spec["identity_seed"]) if spec.get("identity_seed") else None,
            ))
        return cls(
            deterministic=bool(raw.get("deterministic", False)),
            seed=int(raw.get("seed", 0)),
            start_time=int(raw.get("start_time", 1_700_000_000)),
            vc_validity=int(raw.get("vc_validity", DEFAULT_VALIDITY)),
            issuer_admin_token=raw.get("issuer_admin_token"),
            actors=actors,
            extra_allocations={k: int(v) for k, v in (raw.get("extra_allocations") or {}).items()},
        )


def derive_seed(seed: int, actor: str, domain: str) -> bytes:
    """Deterministic 32-byte seed for a named actor's key material."""
    digest = hashlib.sha256(f"medsim:{seed}:{actor}:{domain}".encode()).digest()
    if int.from_bytes(digest, "big") == 0:
        raise ScenarioError("degenerate derived seed")
    return digest


class Platform:
    """Bootstrapped stack; contract addresses in .contracts, issuer in .issuer."""

    def __init__(self, config: PlatformConfig | None = None):
        self.config = config or PlatformConfig()
        if self.config.deterministic:
            self.clock = LogicalClock(self.config.start_time)
            self.entropy = Entropy(seed=self.config.seed)
        else:
            self.clock = SystemClock()
            self.entropy = Entropy()
        self.vdr = Vdr()
        self.dds = Dds()
        self.chain = Chain(clock=self.clock)

        issuer_identity_seed = issuer_wallet_seed = None
        if self.config.deterministic:
            issuer_identity_seed = derive_seed(self.config.seed, "issuer", "identity")
            issuer_wallet_seed = derive_seed(self.config.seed, "issuer", "wallet")
        # issuer keys must exist before the identity contract learns its controller
        issuer_wallet = Wallet.generate(identity_seed=issuer_identity_seed, wallet_seed=issuer_wallet_seed)
        self.contracts = deploy_protocol(self.chain, issuer_wallet.eoa.hex, issuer_wallet.eoa.hex)
        self.issuer = Issuer(
            vdr=self.vdr,
            chain=self.chain,
            identity_contract=self.contracts["identity"],
            clock=self.clock,
            entropy=self.entropy,
            validity_seconds=self.config.vc_validity,
            admin_token=self.config.issuer_admin_token,
            wallet=issuer_wallet,
        )

        self.actor_wallets: dict[str, Wallet] = {}
        allocations: dict[str, int] = dict(self.config.extra_allocations)
        for actor in self.config.actors:
            wallet = Wallet.generate(
                identity_seed=actor.identity_seed
                or (derive_seed(self.config.seed, actor.name, "identity") if self.config.deterministic else None),
                wallet_seed=actor.wallet_seed
                or (derive_seed(self.config.seed, actor.name, "wallet") if self.config.deterministic else None),
            )
            self.actor_wallets[actor.name] = wallet
            allocations[wallet.eoa.hex] = allocations.get(wallet.eoa.hex, 0) + actor.balance
        if allocations:
            self.chain.genesis_alloc(allocations)

        self.connectors: dict[str, Connector] = {}

    def new_connector(self, name: str, base_url: str) -> Connector:
        if name in self.connectors:
            raise ScenarioError(f"connector {name!r} already exists")
        connector = Connector(
            vdr=self.vdr,
            dds=self.dds,
            chain=self.chain,
            identity_contract=self.contracts["identity"],
            factory_contract=self.contracts["factory"],
            base_url=base_url,
            clock=self.clock,
            entropy=self.entropy,
        )
        self.connectors[name] = connector
        return connector
