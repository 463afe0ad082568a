"""Tower placement frequency over the map grid."""

from __future__ import annotations

from dataclasses import dataclass, field

from towerlab.sim.types import GridMap
from towerlab.telemetry.records import ActionKind, LogRecord, RecordKind


@dataclass
class Heatmap:
    width: int
    height: int
    counts: list[list[int]]  # counts[y][x]
    issues: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


def placement_heatmap(records: list[LogRecord], grid: GridMap) -> Heatmap:
    """Count BUY placements per cell. Sells never decrement: the map shows
    where towers were put, not what survived. Out-of-bounds buys are
    reported and excluded."""
    counts = [[0] * grid.width for _ in range(grid.height)]
    issues: list[str] = []
    for i, record in enumerate(records):
        if record.kind is not RecordKind.ACTION or record.action is not ActionKind.BUY:
            continue
        x, y = record.location
        if not grid.in_bounds((x, y)):
            issues.append(f"record {i}: BUY at ({x}, {y}) outside {grid.width}x{grid.height} map")
            continue
        counts[y][x] += 1
    return Heatmap(width=grid.width, height=grid.height, counts=counts, issues=issues)
