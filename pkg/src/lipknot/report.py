"""Run reports for the CLI.

A report's payload (command, inputs, outputs, version) is deterministic for
identical inputs; wall-clock timing lives in a separate field that is never
hashed.
"""

import hashlib
import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

import click

from lipknot import __version__


@dataclass
class RunReport:
    command: str
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: Dict[str, Any] = field(default_factory=dict)
    timing: Dict[str, float] = field(default_factory=dict)
    version: str = __version__

    def payload(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": self.outputs,
            "version": self.version,
        }

    def payload_hash(self) -> str:
        text = json.dumps(self.payload(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        data = self.payload()
        data["payload_hash"] = self.payload_hash()
        data["timing"] = dict(self.timing)
        return data

    @contextmanager
    def timed(self, step: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timing[step] = round(time.perf_counter() - start, 6)


def format_duration(seconds: float) -> str:
    """Elapsed time for the summary line; whole milliseconds below one second."""
    if seconds < 1:
        return f"{round(seconds * 1000)} ms"
    minutes, rest = divmod(seconds, 60)
    if not minutes:
        return f"{rest:.2f} s"
    return f"{int(minutes)} min {rest:04.1f} s"


def emit(report: RunReport, quiet: bool = False) -> None:
    """Print the report as JSON on stdout unless quiet."""
    if not quiet:
        click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))


def print_summary(rows: List[Dict[str, Any]], elapsed: Optional[float] = None) -> None:
    """
    Human-readable corpus verification summary on stderr.

    Each row: {"pair", "expected", "actual", "ok"}.
    """
    echo = lambda text="": click.echo(text, err=True)
    echo("=" * 60)
    echo("CORPUS VERIFICATION")
    echo("=" * 60)
    for row in rows:
        icon = "✓" if row["ok"] else "✗"
        echo(f"  {icon} {row['pair']:<36} {row['actual']}")
        if not row["ok"]:
            echo(f"      expected: {row['expected']}")
    echo()
    failed = sum(1 for row in rows if not row["ok"])
    echo("VERDICT")
    echo("-" * 40)
    if failed:
        echo(f"  ✗ {failed} of {len(rows)} expectations not met")
    else:
        echo(f"  ✓ All {len(rows)} expectations met")
    if elapsed is not None:
        echo(f"  Duration:    {format_duration(elapsed)}")
