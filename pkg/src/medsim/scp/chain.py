"""Accounts, serialized transaction execution with atomic revert, event log.

Contracts are native state machines: Python classes whose entire mutable
state lives in a JSON-serializable ``storage`` dict, which makes snapshots,
replay determinism and state hashing trivial. Transactions execute strictly
serially; a revert restores the pre-transaction snapshot byte for byte and
drops any buffered events.
"""

from __future__ import annotations

import copy
import hashlib
import threading
from dataclasses import dataclass, field
from typing import Any

from medsim.clock import SystemClock
from medsim.crypto.keccak import keccak256
from medsim.crypto.keys import Signature, recover_wallet
from medsim.encoding import canonical_json
from medsim.errors import (
    BadTransactionError,
    DeployPolicyError,
    MalformedSignatureError,
    Revert,
    UnknownContractError,
    UnknownMethodError,
)

MAX_AMOUNT = 2**128 - 1  # native and token amounts are unsigned 128-bit


def coerce_amount(value: Any) -> int:
    """Monetary quantities travel as ints or decimal strings (JSON safety)."""
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise Revert(f"not an amount: {value!r}")
    try:
        amount = int(value)
    except ValueError:
        raise Revert(f"not an amount: {value!r}") from None
    if not 0 <= amount <= MAX_AMOUNT:
        raise Revert(f"amount out of range: {amount}")
    return amount


@dataclass(frozen=True)
class Event:
    emitter: str
    name: str
    payload: dict
    tx_height: int

    def to_dict(self) -> dict:
        return {
            "emitter": self.emitter,
            "name": self.name,
            "payload": self.payload,
            "tx_height": self.tx_height,
        }


@dataclass
class Receipt:
    status: str  # "ok" | "reverted"
    events: list[Event] = field(default_factory=list)
    error: str | None = None
    result: Any = None
    height: int | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "events": [e.to_dict() for e in self.events],
            "error": self.error,
            "result": self.result,
            "height": self.height,
        }


class Contract:
    """Base class; subclasses whitelist callable methods in ABI."""

    code_id: str = ""
    ABI: frozenset[str] = frozenset()
    PAYABLE: frozenset[str] = frozenset()

    def __init__(self, address: str):
        self.address = address
        self.storage: dict = {}

    def init(self, ctx: "Context", **args) -> None:
        """Constructor; may read ctx and revert."""


class Context:
    """Execution context handed to contract methods."""

    def __init__(self, chain: "Chain", origin: str, caller: str, address: str, value: int, now: int, events: list):
        self.chain = chain
        self.origin = origin  # EOA that signed the transaction
        self.caller = caller  # immediate caller: EOA or contract address
        self.address = address  # contract currently executing
        self.value = value  # native amount attached to this call
        self.now = now
        self._events = events

    def emit(self, name: str, payload: dict) -> None:
        self._events.append((self.address, name, payload))

    def call(self, address: str, method: str, value: int = 0, **args) -> Any:
        """Synchronous cross-contract call inside the same atomic transaction."""
        if value:
            self.chain._move_value(self.address, address, value)
        return self.chain._dispatch(
            origin=self.origin, caller=self.address, address=address,
            method=method, args=args, value=value, now=self.now, events=self._events,
        )

    def transfer_native(self, to: str, amount: int) -> None:
        self.chain._move_value(self.address, to, amount)

    def balance_of_native(self, address: str) -> int:
        return self.chain.balances.get(address.lower(), 0)

    def deploy(self, code_id: str, **constructor_args) -> str:
        """Deploy from contract code (policy "internal")."""
        return self.chain._create_contract(
            code_id, constructor_args, policy_caller=self.address,
            origin=self.origin, now=self.now, events=self._events,
        )


class Chain:
    """Single-writer ledger. All public entry points serialize on one lock."""

    def __init__(self, clock=None):
        self.clock = clock or SystemClock()
        self.balances: dict[str, int] = {}
        self.contracts: dict[str, Contract] = {}
        self.events: list[Event] = []
        self.height = 0
        self.nonces: dict[str, int] = {}
        self._deploy_count = 0
        self._codes: dict[str, tuple[type[Contract], str]] = {}
        self._genesis_sealed = False
        self._lock = threading.RLock()

    # -- bootstrap ------------------------------------------------------------

    def register_code(self, code_id: str, cls: type[Contract], policy: str = "admin") -> None:
        if policy not in ("admin", "internal"):
            raise ValueError(f"unknown deploy policy: {policy}")
        self._codes[code_id] = (cls, policy)

    def genesis_alloc(self, allocations: dict[str, int]) -> None:
        """Mint native balances; only possible before the first transaction."""
        with self._lock:
            if self._genesis_sealed:
                raise BadTransactionError("genesis is sealed; native supply is fixed")
            for address, amount in allocations.items():
                if amount < 0 or amount > MAX_AMOUNT:
                    raise ValueError(f"bad genesis amount for {address}")
                self.balances[address.lower()] = self.balances.get(address.lower(), 0) + amount

    def deploy(self, code_id: str, args: dict, deployer: str) -> str:
        """Admin-policy deploy used at bootstrap; atomic like a transaction."""
        with self._lock:
            snapshot = self._snapshot()
            events: list = []
            try:
                address = self._create_contract(
                    code_id, args, policy_caller=None, origin=deployer,
                    now=self.clock.now(), events=events,
                )
            except Revert:
                self._restore(snapshot)
                raise
            self._commit_events(events)
            return address

    def admin_call(self, contract: str, method: str, args: dict, caller: str) -> Any:
        """Unsigned bootstrap call for wiring contracts; sealed with genesis."""
        with self._lock:
            if self._genesis_sealed:
                raise BadTransactionError("bootstrap calls are sealed after the first transaction")
            snapshot = self._snapshot()
            events: list = []
            try:
                result = self._dispatch(
                    origin=caller, caller=caller, address=contract, method=method,
                    args=dict(args), value=0, now=self.clock.now(), events=events,
                )
            except Revert:
                self._restore(snapshot)
                raise
            self._commit_events(events)
            return result

    # -- public entry points ----------------------------------------------------

    def submit(self, tx: dict) -> Receipt:
        with self._lock:
            sender = self._check_signature(tx)
            expected_nonce = self.nonces.get(sender, 0)
            if tx.get("nonce") != expected_nonce:
                raise BadTransactionError(
                    f"bad nonce for {sender}: got {tx.get('nonce')}, expected {expected_nonce}"
                )
            value = coerce_amount(tx.get("value", "0"))
            now = self.clock.now()
            snapshot = self._snapshot()
            events: list = []
            try:
                if self.balances.get(sender, 0) < value:
                    raise Revert("insufficient native balance for attached value")
                if value:
                    self._move_value(sender, tx["contract"], value)
                result = self._dispatch(
                    origin=sender, caller=sender, address=tx["contract"],
                    method=tx["method"], args=dict(tx.get("args") or {}),
                    value=value, now=now, events=events,
                )
            except Revert as exc:
                self._restore(snapshot)
                return Receipt(status="reverted", error=exc.reason)
            self._genesis_sealed = True
            self.nonces[sender] = expected_nonce + 1
            self.height += 1
            committed = self._commit_events(events)
            return Receipt(status="ok", events=committed, result=result, height=self.height)

    def call_static(self, contract: str, method: str, args: dict | None = None, caller: str | None = None) -> Any:
        """Read-only call: executes against a snapshot that is always restored."""
        with self._lock:
            target = self.contracts.get(contract.lower())
            if target is None:
                raise UnknownContractError(f"no contract at {contract}")
            if method not in target.ABI:
                raise UnknownMethodError(f"{target.code_id} has no method {method!r}")
            snapshot = self._snapshot()
            try:
                return self._dispatch(
                    origin=caller or "0x" + "00" * 20, caller=caller or "0x" + "00" * 20,
                    address=contract, method=method, args=dict(args or {}),
                    value=0, now=self.clock.now(), events=[],
                )
            finally:
                self._restore(snapshot)

    def events_from(self, from_height: int = 0) -> list[Event]:
        with self._lock:
            return [e for e in self.events if e.tx_height >= from_height]

    def state_hash(self) -> str:
        """Hash of the full post-transaction state (events excluded; they are
        an append-only log compared separately)."""
        with self._lock:
            state = {
                "balances": {k: str(v) for k, v in sorted(self.balances.items())},
                "contracts": {
                    addr: {"code": c.code_id, "storage": c.storage}
                    for addr, c in sorted(self.contracts.items())
                },
                "nonces": dict(sorted(self.nonces.items())),
                "height": self.height,
                "deploys": self._deploy_count,
            }
            return hashlib.sha256(canonical_json(state)).hexdigest()

    # -- signature and canonical encoding --------------------------------------

    @staticmethod
    def signing_payload(tx: dict) -> bytes:
        unsigned = {k: tx[k] for k in ("from", "nonce", "contract", "method", "args", "value")}
        return canonical_json(unsigned)

    def _check_signature(self, tx: dict) -> str:
        for key in ("from", "nonce", "contract", "method", "args", "value", "signature"):
            if key not in tx:
                raise BadTransactionError(f"transaction missing field {key!r}")
        sender = str(tx["from"]).lower()
        try:
            sig = Signature.from_hex("wallet", tx["signature"])
            recovered = recover_wallet(self.signing_payload(tx), sig)
        except (MalformedSignatureError, ValueError) as exc:
            raise BadTransactionError(f"unverifiable signature: {exc}") from exc
        if recovered.hex != sender:
            raise BadTransactionError("signature does not recover to the sender address")
        return sender

    # -- execution internals ----------------------------------------------------

    def _move_value(self, source: str, dest: str, amount: int) -> None:
        amount = coerce_amount(amount)
        source, dest = source.lower(), dest.lower()
        if self.balances.get(source, 0) < amount:
            raise Revert(f"insufficient native balance at {source}")
        self.balances[source] -= amount
        self.balances[dest] = self.balances.get(dest, 0) + amount

    def _dispatch(self, origin, caller, address, method, args, value, now, events) -> Any:
        contract = self.contracts.get(address.lower())
        if contract is None:
            raise Revert(f"no contract at {address}")
        if method not in contract.ABI:
            raise Revert(f"{contract.code_id} has no method {method!r}")
        if value and method not in contract.PAYABLE:
            raise Revert(f"method {method!r} does not accept native value")
        ctx = Context(self, origin, caller, contract.address, value, now, events)
        handler = getattr(contract, method)
        try:
            return handler(ctx, **args)
        except Revert:
            raise
        except (TypeError, KeyError, ValueError) as exc:
            # malformed client-supplied arguments surface as reverts
            raise Revert(f"{contract.code_id}.{method} failed: {exc}") from exc

    def _create_contract(self, code_id, constructor_args, policy_caller, origin, now, events) -> str:
        entry = self._codes.get(code_id)
        if entry is None:
            raise Revert(f"unknown code id {code_id!r}")
        cls, policy = entry
        if policy == "internal" and policy_caller is None:
            raise DeployPolicyError(f"code {code_id!r} can only be deployed by a contract")
        address = "0x" + keccak256(b"deploy:" + self._deploy_count.to_bytes(8, "big"))[12:].hex()
        self._deploy_count += 1
        contract = cls(address)
        contract.code_id = code_id
        self.contracts[address] = contract
        ctx = Context(self, origin, policy_caller or origin, address, 0, now, events)
        contract.init(ctx, **constructor_args)
        return address

    # -- snapshots ---------------------------------------------------------------

    def _snapshot(self) -> dict:
        return {
            "balances": dict(self.balances),
            "storages": {addr: copy.deepcopy(c.storage) for addr, c in self.contracts.items()},
            "nonces": dict(self.nonces),
            "deploy_count": self._deploy_count,
            "height": self.height,
        }

    def _restore(self, snapshot: dict) -> None:
        self.balances = snapshot["balances"]
        self.nonces = snapshot["nonces"]
        self._deploy_count = snapshot["deploy_count"]
        self.height = snapshot["height"]
        for addr in list(self.contracts):
            if addr in snapshot["storages"]:
                self.contracts[addr].storage = snapshot["storages"][addr]
            else:
                del self.contracts[addr]

    def _commit_events(self, buffered: list) -> list[Event]:
        committed = [Event(emitter, name, payload, self.height) for emitter, name, payload in buffered]
        self.events.extend(committed)
        return committed

    def total_native_supply(self) -> int:
        with self._lock:
            return sum(self.balances.values())
