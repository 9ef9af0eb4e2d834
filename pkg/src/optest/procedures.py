"""Immutable threshold decision rules.

A :class:`TestProcedure` compares a scalar statistic against a threshold in a
fixed direction.  Equality always rejects (the regions are closed on the
rejection side); the tie has probability zero for continuous models but
matters for discrete ones, so the policy is fixed globally here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from optest.models import SampleBatch, SampleLike, as_batch

__all__ = ["Decision", "Direction", "TestProcedure"]


class Decision(enum.Enum):
    REJECT = "reject"
    ACCEPT = "accept"


class Direction(enum.Enum):
    GE = "ge"
    LE = "le"


@dataclass(frozen=True)
class TestProcedure:
    """Reject when statistic(sample) >= threshold (direction GE) or <= (LE)."""

    statistic_name: str
    statistic: Callable[[SampleBatch], float]
    threshold: float
    direction: Direction
    provenance: str
    row_statistic: Callable[[np.ndarray], np.ndarray] | None = None

    def statistic_value(self, sample: SampleLike) -> float:
        return float(self.statistic(as_batch(sample)))

    def rejects(self, sample: SampleLike) -> bool:
        value = self.statistic_value(sample)
        if self.direction is Direction.GE:
            return value >= self.threshold
        return value <= self.threshold

    def decide(self, sample: SampleLike) -> Decision:
        return Decision.REJECT if self.rejects(sample) else Decision.ACCEPT

    def rejection_mask(self, matrix: np.ndarray) -> np.ndarray:
        """Boolean rejection decisions for a (reps, n) replication matrix."""
        if self.row_statistic is not None:
            values = np.asarray(self.row_statistic(matrix), dtype=np.float64)
        else:
            values = np.array(
                [self.statistic(SampleBatch(tuple(row))) for row in matrix],
                dtype=np.float64)
        if self.direction is Direction.GE:
            return values >= self.threshold
        return values <= self.threshold

    def describe(self) -> dict:
        """JSON-ready descriptor of the rule."""
        return {
            "statistic_name": self.statistic_name,
            "threshold": self.threshold,
            "direction": self.direction.value,
            "provenance": self.provenance,
        }
