"""`medsim-harness`: run scenario files and emit transcript reports."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from medsim.errors import MedsimError
from medsim.harness.runner import HarnessRunner
from medsim.harness.scenario import Scenario


@click.group()
def main():
    """Deterministic multi-actor protocol runs with fault injection."""


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json-report", "report_path", default=None,
              help="Write the canonical JSON transcript here ('-' for stdout).")
@click.option("--quiet", is_flag=True, help="Suppress per-step lines.")
def run(scenario_file: str, report_path: str | None, quiet: bool):
    """Execute SCENARIO_FILE and verify its embedded expectations."""
    try:
        scenario = Scenario.load(scenario_file)
        runner = HarnessRunner(scenario)
        runner.run()
    except MedsimError as exc:
        click.echo(f"scenario failed: {exc}", err=True)
        sys.exit(1)

    if not quiet:
        for record in runner.step_records:
            detail = record.get("error") or record.get("reason") or ""
            actor = record.get("actor", "-")
            click.echo(
                f"[{record['index']:03d}] {record['op']:16s} {actor:10s} "
                f"{record['status']:8s} {detail}"
            )
        click.echo(f"steps: {len(runner.step_records)}  state hash: {runner.transcript()['state_hash']}")

    if report_path:
        blob = runner.transcript_bytes()
        if report_path == "-":
            sys.stdout.buffer.write(blob + b"\n")
        else:
            Path(report_path).write_bytes(blob + b"\n")
            if not quiet:
                click.echo(f"report written to {report_path}")


if __name__ == "__main__":
    main()
