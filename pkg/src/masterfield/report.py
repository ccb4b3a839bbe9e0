"""Run reports in Markdown and CSV.

Reports are byte-deterministic for a fixed command, configuration and seed:
no timestamps, floats printed with ``repr`` precision, and wall-clock times
only when explicitly requested.
"""

from __future__ import annotations

import csv
import io
import numbers
from dataclasses import dataclass, field
from typing import Any

PROVENANCES = ("exact", "ode", "mc", "conjectural")
CSV_COLUMNS = ("item", "value", "stderr", "provenance", "runtime_ms")


def fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, numbers.Integral):
        return str(int(x))
    if isinstance(x, numbers.Real):
        return repr(float(x))
    if isinstance(x, numbers.Complex):
        return repr(complex(x))
    return str(x)


@dataclass
class ReportItem:
    item: str
    value: Any
    provenance: str
    stderr: float | None = None
    runtime_ms: float | None = None
    note: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


@dataclass
class RunReport:
    command: str
    config: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    items: list[ReportItem] = field(default_factory=list)
    timings: bool = False

    def add(self, item: str, value, provenance: str, stderr=None, runtime_ms=None, note=""):
        self.items.append(
            ReportItem(item, value, provenance, stderr, runtime_ms if self.timings else None, note)
        )

    @property
    def conjectural(self) -> bool:
        return any(i.provenance == "conjectural" for i in self.items)

    def to_markdown(self) -> str:
        lines = [f"# masterfield {self.command}", ""]
        if self.conjectural:
            lines += [
                "> **CONJECTURAL**: rows marked `conjectural` rely on an unproved "
                "formula for surfaces of genus two or more.",
                "",
            ]
        lines.append("## Configuration")
        lines.append("")
        for k in sorted(self.config):
            lines.append(f"- {k}: {fmt(self.config[k])}")
        if self.seed is not None:
            lines.append(f"- seed: {self.seed}")
        lines += ["", "## Results", ""]
        cols = ["item", "value", "stderr", "provenance"]
        if self.timings:
            cols.append("runtime_ms")
        cols.append("note")
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "---|" * len(cols))
        for it in self.items:
            row = [it.item, fmt(it.value), fmt(it.stderr), it.provenance]
            if self.timings:
                row.append(fmt(it.runtime_ms))
            row.append(it.note)
            lines.append("| " + " | ".join(c.replace("|", "\\|") for c in row) + " |")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for it in self.items:
            w.writerow(
                [it.item, fmt(it.value), fmt(it.stderr), it.provenance, fmt(it.runtime_ms)]
            )
        return buf.getvalue()
