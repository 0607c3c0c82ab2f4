"""Scenario files: seed, genesis actors, ordered steps with fault injections."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from medsim.errors import ScenarioError
from medsim.units import parse_display

OPS = {
    "create_identity", "join", "publish", "buy", "access",
    "advance_clock", "revoke_vc", "deactivate_did", "transfer_at", "force_revert",
}

BUY_FAULTS = {"underpay", "overpay"}
ACCESS_FAULTS = {"corrupt_signature", "replay_nonce", "tamper_vc"}


@dataclass(frozen=True)
class Step:
    op: str
    actor: str | None = None
    label: str | None = None       # publish: name the offering
    service: str | None = None     # buy/access/transfer_at: offering label
    alias: str | None = None
    payload_text: str | None = None
    description: dict = field(default_factory=dict)
    supply: str = "1"              # whole tokens, display form
    price: str = "1"
    seconds: int = 0               # advance_clock
    to: str | None = None          # transfer_at target actor
    amount: str = "1"              # transfer_at whole tokens
    fault: str | None = None
    expect: dict | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    start_time: int
    vc_validity: int | None
    actors: dict[str, int]  # name -> genesis balance in base units
    steps: tuple[Step, ...]

    @classmethod
    def from_dict(cls, raw: dict) -> "Scenario":
        try:
            actors = {
                name: parse_display(str(spec.get("balance", "0")))
                for name, spec in dict(raw["actors"]).items()
            }
            steps = tuple(Step(**entry) for entry in raw["steps"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"malformed scenario: {exc}") from exc
        scenario = cls(
            name=str(raw.get("name", "unnamed")),
            seed=int(raw.get("seed", 0)),
            start_time=int(raw.get("start_time", 1_700_000_000)),
            vc_validity=int(raw["vc_validity"]) if "vc_validity" in raw else None,
            actors=actors,
            steps=steps,
        )
        scenario.validate()
        return scenario

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def validate(self) -> None:
        labels: set[str] = set()
        for index, step in enumerate(self.steps):
            where = f"step {index} ({step.op})"
            if step.op not in OPS:
                raise ScenarioError(f"{where}: unknown op")
            needs_actor = step.op != "advance_clock"
            if needs_actor:
                if step.actor not in self.actors:
                    raise ScenarioError(f"{where}: unknown actor {step.actor!r}")
            if step.op == "publish":
                if not step.label:
                    raise ScenarioError(f"{where}: publish needs a label")
                if step.label in labels:
                    raise ScenarioError(f"{where}: duplicate label {step.label!r}")
                labels.add(step.label)
            if step.op in ("buy", "access", "transfer_at"):
                if step.service not in labels:
                    raise ScenarioError(f"{where}: unknown service label {step.service!r}")
            if step.op == "transfer_at" and step.to not in self.actors:
                raise ScenarioError(f"{where}: unknown transfer target {step.to!r}")
            if step.op == "buy" and step.fault not in (None, *BUY_FAULTS):
                raise ScenarioError(f"{where}: unknown buy fault {step.fault!r}")
            if step.op == "access" and step.fault not in (None, *ACCESS_FAULTS):
                raise ScenarioError(f"{where}: unknown access fault {step.fault!r}")
            if step.op == "advance_clock" and step.seconds <= 0:
                raise ScenarioError(f"{where}: advance_clock needs positive seconds")
