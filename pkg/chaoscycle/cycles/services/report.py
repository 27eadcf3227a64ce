"""Ledger rendering: a per-phase cost table and its JSON document."""

from __future__ import annotations

import json
from decimal import Decimal

from chaoscycle.core.enums import Phase
from chaoscycle.core.records import CostLedger
from chaoscycle.core.records import LedgerRow

ROW_LABELS = ("Input tokens", "Output tokens", "API cost ($)", "Time")


def format_duration(seconds: float) -> str:
    if seconds < 60:  # noqa: PLR2004
        return f"{seconds:.1f} s"
    minutes, rest = divmod(round(seconds), 60)
    return f"{minutes} min {rest} s"


def _cells(row: LedgerRow) -> tuple[str, ...]:
    return (
        f"{row.input_tokens:,}",
        f"{row.output_tokens:,}",
        f"{row.api_cost_usd.quantize(Decimal('0.0001')):f}",
        format_duration(row.wall_time_s),
    )


def render_ledger_table(ledger: CostLedger) -> str:
    headers = ["", *(phase.value for phase in Phase), "All"]
    columns = [_cells(ledger.row(phase)) for phase in Phase] + [_cells(ledger.totals)]
    lines = [list(headers)]
    for index, label in enumerate(ROW_LABELS):
        lines.append([label, *(cells[index] for cells in columns)])

    widths = [max(len(line[col]) for line in lines) for col in range(len(headers))]
    rendered = []
    for line in lines:
        first = line[0].ljust(widths[0])
        rest = [cell.rjust(width) for cell, width in zip(line[1:], widths[1:], strict=True)]
        rendered.append(" | ".join([first, *rest]).rstrip())
    rendered.insert(1, "-+-".join("-" * width for width in widths))
    return "\n".join(rendered) + "\n"


def render_ledger_json(ledger: CostLedger) -> str:
    return json.dumps(ledger.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"
