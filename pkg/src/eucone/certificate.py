"""Outcome objects returned by the optimality tests."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Verdict(str, enum.Enum):
    OPTIMAL = "optimal"
    NOT_OPTIMAL = "not_optimal"
    # a competitor sits inside the tolerance band of a strict inequality
    MARGINAL = "marginal"
    # the sufficient condition's hypothesis does not hold
    UNSUPPORTED = "unsupported"
    INAPPLICABLE = "inapplicable"


@dataclass
class Certificate:
    """Verdict of a test plus the numbers that back it.

    ``witness`` is the id of a violating or informative decision, if any.
    """

    test: str
    verdict: Verdict
    point: str | None = None
    residuals: dict[str, float] = field(default_factory=dict)
    witness: str | None = None
    reason: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self):
        return self.verdict is Verdict.OPTIMAL

    def to_dict(self):
        return {
            "test": self.test,
            "verdict": self.verdict.value,
            "point": self.point,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "witness": self.witness,
            "reason": self.reason,
            "details": self.details,
        }
