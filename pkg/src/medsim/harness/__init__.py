"""Deterministic scenario runner over the in-process stack."""

from medsim.harness.runner import HarnessRunner, run_scenario
from medsim.harness.scenario import Scenario, Step

__all__ = ["HarnessRunner", "Scenario", "Step", "run_scenario"]
