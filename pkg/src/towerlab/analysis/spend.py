"""Per-round expenditure reconstruction from action logs.

The log carries no prices, so gold movements are re-derived from the config:
tower costs from the catalog, upgrade costs from the doubling schedule with
discount auras reconstructed from board geometry, refunds from the phase's
refund rate. Bounty totals come from the round-result system record. The
reconstruction is cross-checked against the reported unspent value whenever
that record is present.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from towerlab.config.model import SessionConfig
from towerlab.sim.types import (
    Archetype,
    TRACK_MULTIPLIER,
    Track,
    distance,
    effect_param,
    round_gold,
)
from towerlab.telemetry.records import ActionKind, LogRecord, RecordKind

EPS = 1e-9


@dataclass
class RoundSummary:
    level: int
    round: int
    starting_gold: int
    buy_costs: int
    upgrade_costs: int
    refunds: int
    bounties: int
    unspent: int  # reconstructed
    reported_unspent: int | None
    consistent: bool
    kills: int | None
    leaks: int | None
    health: int | None
    score: float | None
    chat_count: int
    issues: list[str] = field(default_factory=list)


@dataclass
class _BoardTower:
    spec_id: str
    cell: tuple[int, int]
    levels: dict[Track, int]
    spent: int


class _Board:
    """Just enough placement state to price upgrades and refunds."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.towers: dict[tuple[int, int], _BoardTower] = {}

    def buy(self, spec_id: str, cell: tuple[int, int]) -> int:
        spec = self.config.tower_spec(spec_id)
        if spec is None:
            raise KeyError(spec_id)
        self.towers[cell] = _BoardTower(
            spec_id, cell, {t: 0 for t in Track}, spent=spec.cost
        )
        return spec.cost

    def upgrade(self, cell: tuple[int, int], track: Track, new_level: int) -> int:
        tower = self.towers[cell]
        spec = self.config.tower_spec(tower.spec_id)
        cost = round_gold(
            spec.upgrade_cost * (2 ** (new_level - 1)) * self._discount_multiplier(cell)
        )
        tower.levels[track] = new_level
        tower.spent += cost
        return cost

    def sell(self, cell: tuple[int, int], refund_rate: float) -> int:
        tower = self.towers.pop(cell)
        return round_gold(refund_rate * tower.spent)

    def _discount_multiplier(self, cell: tuple[int, int]) -> float:
        # Mirrors the engine: best single discount, aura radius from the
        # discount tower's own base range and RANGE upgrades only.
        best = 1.0
        pos = (float(cell[0]), float(cell[1]))
        for other in self.towers.values():
            if other.cell == cell:
                continue
            spec = self.config.tower_spec(other.spec_id)
            if spec is None or spec.archetype is not Archetype.DISCOUNT:
                continue
            radius = spec.range * TRACK_MULTIPLIER[Track.RANGE] ** other.levels[Track.RANGE]
            if distance(pos, (float(other.cell[0]), float(other.cell[1]))) <= radius + EPS:
                best = min(best, effect_param(spec, "discount_multiplier"))
        return best


def expenditure_series(records: list[LogRecord], config: SessionConfig) -> list[RoundSummary]:
    summaries: list[RoundSummary] = []
    current: dict | None = None

    def close_round(end_attrs: dict | None) -> None:
        nonlocal current
        if current is None:
            return
        attrs = end_attrs or {}
        reported = _int_or_none(attrs.get("unspent"))
        unspent = (
            current["starting_gold"]
            - current["buys"]
            - current["upgrades"]
            + current["refunds"]
            + _int_or_none(attrs.get("bounties"), 0)
        )
        issues = current["issues"]
        if end_attrs is None:
            issues.append("round has no ROUND_ENDED record; totals are partial")
        consistent = reported is None or reported == unspent
        if not consistent:
            issues.append(f"reconstructed unspent {unspent} != reported {reported}")
        summaries.append(
            RoundSummary(
                level=current["level"],
                round=current["round"],
                starting_gold=current["starting_gold"],
                buy_costs=current["buys"],
                upgrade_costs=current["upgrades"],
                refunds=current["refunds"],
                bounties=_int_or_none(attrs.get("bounties"), 0),
                unspent=unspent,
                reported_unspent=reported,
                consistent=consistent,
                kills=_int_or_none(attrs.get("kills")),
                leaks=_int_or_none(attrs.get("leaks")),
                health=_int_or_none(attrs.get("health")),
                score=_float_or_none(attrs.get("score")),
                chat_count=current["chats"],
                issues=issues,
            )
        )
        current = None

    for i, record in enumerate(records):
        if record.kind is RecordKind.SYSTEM:
            if record.event == "ROUND_START":
                close_round(None)  # previous round missing its end marker
                current = {
                    "level": _int_or_none(record.attributes.get("level"), 0),
                    "round": _int_or_none(record.attributes.get("round"), 0),
                    "starting_gold": _int_or_none(record.attributes.get("starting_gold"), 0),
                    "buys": 0,
                    "upgrades": 0,
                    "refunds": 0,
                    "chats": 0,
                    "board": _Board(config),
                    "attack": False,
                    "issues": [],
                }
            elif record.event == "PHASE_CHANGED" and current is not None:
                if record.attributes.get("phase") == "ATTACK":
                    current["attack"] = True
            elif record.event == "ROUND_ENDED":
                if current is None:
                    summaries.append(_orphan_round(record))
                else:
                    close_round(record.attributes)
            continue
        if current is None:
            continue
        if record.kind is RecordKind.CHAT:
            current["chats"] += 1
            continue
        board: _Board = current["board"]
        try:
            if record.action is ActionKind.BUY:
                current["buys"] += board.buy(record.tower_type.lower(), record.location)
            elif record.action is ActionKind.UPGRADE:
                current["upgrades"] += board.upgrade(
                    record.location, Track(record.track), record.level
                )
            elif record.action is ActionKind.SELL:
                rate = (
                    config.refund_rate_attack if current["attack"] else config.refund_rate_planning
                )
                current["refunds"] += board.sell(record.location, rate)
        except (KeyError, ValueError) as exc:
            current["issues"].append(f"record {i}: cannot price {record.action} ({exc!r})")

    close_round(None)
    return summaries


def _orphan_round(record: LogRecord) -> RoundSummary:
    attrs = record.attributes
    return RoundSummary(
        level=_int_or_none(attrs.get("level"), 0),
        round=_int_or_none(attrs.get("round"), 0),
        starting_gold=0,
        buy_costs=0,
        upgrade_costs=0,
        refunds=0,
        bounties=_int_or_none(attrs.get("bounties"), 0),
        unspent=0,
        reported_unspent=_int_or_none(attrs.get("unspent")),
        consistent=False,
        kills=_int_or_none(attrs.get("kills")),
        leaks=_int_or_none(attrs.get("leaks")),
        health=_int_or_none(attrs.get("health")),
        score=_float_or_none(attrs.get("score")),
        chat_count=0,
        issues=["ROUND_ENDED without a matching ROUND_START"],
    )


def _int_or_none(value, default=None):
    try:
        return int(value)
    except (TypeError, ValueError):
        return default


def _float_or_none(value, default=None):
    try:
        return float(value)
    except (TypeError, ValueError):
        return default
