"""Token and cost accounting per cycle phase."""

from __future__ import annotations

import threading
from decimal import Decimal

from chaoscycle.core.enums import AgentRole
from chaoscycle.core.enums import Phase
from chaoscycle.core.records import AgentUsage
from chaoscycle.core.records import CostLedger
from chaoscycle.core.records import Usage
from chaoscycle.core.records import sum_rows
from chaoscycle.core.values import ValueModel


class Pricing(ValueModel):
    """USD per token."""

    price_in: Decimal = Decimal(0)
    price_out: Decimal = Decimal(0)

    def cost(self, input_tokens: int, output_tokens: int) -> Decimal:
        return input_tokens * self.price_in + output_tokens * self.price_out


def record_usage(ledger: CostLedger, phase: Phase, usage: Usage) -> CostLedger:
    rows = dict(ledger.rows)
    rows[phase] = rows[phase].plus(usage)
    return CostLedger(rows=rows, totals=sum_rows([rows[p] for p in Phase]))


class LedgerRecorder:
    """Single writer for a cycle's ledger and agent usage log."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._ledger = CostLedger()
        self._usages: list[AgentUsage] = []

    def record(self, role: AgentRole, phase: Phase, attempts: int, usage: Usage) -> None:
        with self._lock:
            self._ledger = record_usage(self._ledger, phase, usage)
            self._usages.append(AgentUsage(role=role, phase=phase, attempts=attempts, usage=usage))

    @property
    def ledger(self) -> CostLedger:
        with self._lock:
            return self._ledger

    @property
    def usages(self) -> tuple[AgentUsage, ...]:
        with self._lock:
            return tuple(self._usages)
