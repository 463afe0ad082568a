"""Deterministic headless session runner.

Drives a full session (every level x round) from a scripted command
schedule keyed by tick, producing the same telemetry records a live server
session would write. Timestamps derive from the tick counter, so repeated
runs of the same (config, script) are byte-identical. The same machinery
replays a server's intent log to check the broadcast digests.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from towerlab.config.model import SessionConfig
from towerlab.sim import (
    Command,
    CommandKind,
    CommandRejected,
    EventKind,
    GameState,
    Phase,
    TICK_DT,
    Track,
    apply_command,
    init_game,
    state_digest,
    tick,
)
from towerlab.sim.engine import advance_planning, round_score
from towerlab.sim.types import Archetype, CellKind
from towerlab.telemetry.records import (
    ActionKind,
    LogRecord,
    action_record,
    chat_record,
    system_record,
)
from towerlab.telemetry.xmlfmt import serialize_record

TICK_MS = int(TICK_DT * 1000)

CHAT = "CHAT"  # pseudo-kind for scripted chat lines


@dataclass
class BotAction:
    tick: int
    slot: str
    kind: str  # CommandKind value or "CHAT"
    spec_id: str | None = None
    cell: tuple[int, int] | None = None
    track: str | None = None
    text: str = ""

    def to_command(self) -> Command:
        return Command(
            issuer=self.slot,
            kind=CommandKind(self.kind),
            spec_id=self.spec_id,
            cell=self.cell,
            track=Track(self.track) if self.track else None,
        )


SessionScript = dict[tuple[int, int], list[BotAction]]


@dataclass
class RoundResult:
    level: int
    round: int
    outcome: str
    score: float
    unspent: int
    points: int
    health: int
    kills: int
    leaks: int
    bounties: int
    digest: str


@dataclass
class SessionTranscript:
    room_key: str
    records: list[LogRecord] = field(default_factory=list)
    round_results: list[RoundResult] = field(default_factory=list)
    rejected: list[tuple[int, int, BotAction, str]] = field(default_factory=list)

    @property
    def log_text(self) -> str:
        return "".join(serialize_record(r) + "\n" for r in self.records)

    @property
    def log_digest(self) -> str:
        return hashlib.sha256(self.log_text.encode("utf-8")).hexdigest()


def run_session(
    config: SessionConfig,
    script: SessionScript,
    room_key: str = "HEADLS",
    session_start_ms: int = 1_755_000_000_000,
    team_name: str = "scripted team",
    max_ticks_per_round: int = 100_000,
) -> SessionTranscript:
    transcript = SessionTranscript(room_key=room_key)
    clock = _TickClock(session_start_ms)
    transcript.records.append(
        system_record(
            "SESSION_START",
            {"room": room_key, "config": config.name, "team": team_name},
            ts_ms=clock.now(),
        )
    )

    for level_index in range(len(config.levels)):
        for round_index in range(config.rounds_per_level):
            _run_round(config, script, level_index, round_index, clock, transcript, max_ticks_per_round)
    return transcript


def _run_round(
    config: SessionConfig,
    script: SessionScript,
    level_index: int,
    round_index: int,
    clock: "_TickClock",
    transcript: SessionTranscript,
    max_ticks: int,
) -> None:
    state = init_game(config, level_index, round_index)
    actions = sorted(
        script.get((level_index, round_index), []), key=lambda a: a.tick
    )
    counters = {"kills": 0, "leaks": 0, "bounties": 0}
    transcript.records.append(
        system_record(
            "ROUND_START",
            {
                "level": level_index,
                "round": round_index,
                "map": config.levels[level_index].name,
                "starting_gold": config.levels[level_index].starting_gold,
            },
            ts_ms=clock.now(),
        )
    )

    cursor = 0
    guard = 0
    while state.phase is not Phase.ENDED:
        while cursor < len(actions) and actions[cursor].tick <= state.tick:
            action = actions[cursor]
            cursor += 1
            _apply_action(state, action, clock, transcript, counters)
            if state.phase is Phase.ENDED:
                break
        if state.phase is Phase.ENDED:
            break
        if state.phase is Phase.PLANNING:
            state, events = advance_planning(state)
        else:
            state, events = tick(state)
        clock.advance(1)
        _absorb_events(state, events, clock, transcript, counters)
        guard += 1
        if guard > max_ticks:
            raise RuntimeError(f"round {level_index}.{round_index} exceeded {max_ticks} ticks")


def _apply_action(
    state: GameState,
    action: BotAction,
    clock: "_TickClock",
    transcript: SessionTranscript,
    counters: dict[str, int],
) -> None:
    if action.kind == CHAT:
        transcript.records.append(chat_record(action.slot, action.text, ts_ms=clock.now()))
        return
    try:
        state, events = apply_command(state, action.to_command())
    except CommandRejected as rejection:
        transcript.rejected.append((state.level_index, state.round_index, action, rejection.code))
        return
    _absorb_events(state, events, clock, transcript, counters)


def _absorb_events(state, events, clock, transcript, counters) -> None:
    records, result = events_to_records(state, events, clock.now(), counters)
    transcript.records.extend(records)
    if result is not None:
        transcript.round_results.append(result)


def events_to_records(
    state: GameState,
    events,
    ts_ms: int,
    counters: dict[str, int],
) -> tuple[list[LogRecord], RoundResult | None]:
    """Map engine events to telemetry records, tallying round counters.

    Returns the records plus the RoundResult when a ROUND_ENDED was seen.
    Shared by the headless runner and the live server so both produce the
    same session files.
    """
    records: list[LogRecord] = []
    result: RoundResult | None = None
    for event in events:
        if event.kind is EventKind.PLACED:
            records.append(
                action_record(
                    ActionKind.BUY,
                    event.details["spec_id"],
                    event.details["cell"],
                    event.details["owner"],
                    ts_ms=ts_ms,
                )
            )
        elif event.kind is EventKind.SOLD:
            records.append(
                action_record(
                    ActionKind.SELL,
                    event.details["spec_id"],
                    event.details["cell"],
                    event.details["by"],
                    ts_ms=ts_ms,
                )
            )
        elif event.kind is EventKind.UPGRADED:
            records.append(
                action_record(
                    ActionKind.UPGRADE,
                    event.details["spec_id"],
                    event.details["cell"],
                    event.details["by"],
                    ts_ms=ts_ms,
                    track=event.details["track"],
                    level=event.details["level"],
                )
            )
        elif event.kind is EventKind.KILLED:
            counters["kills"] += 1
            counters["bounties"] += event.details["bounty"]
        elif event.kind is EventKind.LEAKED:
            counters["leaks"] += 1
        elif event.kind is EventKind.PHASE_CHANGED:
            records.append(
                system_record("PHASE_CHANGED", {"phase": event.details["phase"]}, ts_ms=ts_ms)
            )
        elif event.kind is EventKind.ROUND_ENDED:
            result = RoundResult(
                level=state.level_index,
                round=state.round_index,
                outcome=event.details["outcome"],
                score=round_score(state),
                unspent=state.total_money,
                points=state.kill_points,
                health=state.health,
                kills=counters["kills"],
                leaks=counters["leaks"],
                bounties=counters["bounties"],
                digest=state_digest(state),
            )
            records.append(
                system_record(
                    "ROUND_ENDED",
                    {
                        "level": result.level,
                        "round": result.round,
                        "outcome": result.outcome,
                        "score": f"{result.score:.6f}",
                        "unspent": result.unspent,
                        "points": result.points,
                        "health": result.health,
                        "kills": result.kills,
                        "leaks": result.leaks,
                        "bounties": result.bounties,
                        "digest": result.digest,
                    },
                    ts_ms=ts_ms,
                )
            )
    return records, result


class _TickClock:
    """Millisecond clock advanced by simulation ticks only."""

    def __init__(self, start_ms: int):
        self._now = start_ms

    def advance(self, ticks: int) -> None:
        self._now += ticks * TICK_MS

    def now(self) -> int:
        return self._now


# ---------------------------------------------------------------------------
# Scripted bots
# ---------------------------------------------------------------------------


def default_bot_schedule(config: SessionConfig, ready_tick: int = 40) -> SessionScript:
    """A fixed, config-derived command schedule for headless play.

    Each player announces and places their first two assigned towers on
    free cells hugging the enemy path, puts two damage upgrades on their
    first tower, and readies up. Rounds of one level share the schedule,
    matching how study sessions repeat rounds.
    """
    script: SessionScript = {}
    for level_index, level in enumerate(config.levels):
        actions: list[BotAction] = []
        spots = _path_adjacent_cells(level.map)
        spot_iter = iter(spots)
        t = 1
        first_cells: list[tuple[str, tuple[int, int]]] = []
        for slot in config.slot_ids:
            assignment = config.team.assignment(slot)
            placed = 0
            for spec_id in (assignment.tower_ids if assignment else [])[:3]:
                cell = next(spot_iter, None)
                if cell is None:
                    break
                actions.append(
                    BotAction(t, slot, CHAT, text=f"{spec_id} going to ({cell[0]}, {cell[1]})")
                )
                actions.append(BotAction(t + 1, slot, "PLACE", spec_id=spec_id, cell=cell))
                if placed == 0:
                    first_cells.append((slot, cell))
                placed += 1
                t += 2
        for slot, cell in first_cells:
            actions.append(BotAction(t, slot, "UPGRADE", cell=cell, track="DAMAGE"))
            actions.append(BotAction(t + 1, slot, "UPGRADE", cell=cell, track="DAMAGE"))
            t += 2
        ready_at = max(ready_tick, t + 1)
        for slot in config.slot_ids:
            actions.append(BotAction(ready_at, slot, "READY"))
            ready_at += 1
        for round_index in range(config.rounds_per_level):
            script[(level_index, round_index)] = list(actions)
    return script


def _path_adjacent_cells(grid) -> list[tuple[int, int]]:
    """Buildable cells hugging the routes, round-robin across routes so
    multi-lane maps get coverage everywhere."""
    per_route: list[list[tuple[int, int]]] = []
    taken: set[tuple[int, int]] = set()
    for route in grid.routes:
        lane: list[tuple[int, int]] = []
        for wx, wy in route.waypoints:
            for dx, dy in ((0, -1), (0, 1), (-1, 0), (1, 0)):
                cell = (wx + dx, wy + dy)
                if not grid.in_bounds(cell) or cell in taken:
                    continue
                if grid.tiles[cell[1]][cell[0]] is CellKind.BUILDABLE:
                    lane.append(cell)
                    taken.add(cell)
        per_route.append(lane)
    if not per_route:
        return [c for c in grid.buildable_cells()]
    spots: list[tuple[int, int]] = []
    for i in range(max(len(lane) for lane in per_route)):
        for lane in per_route:
            if i < len(lane):
                spots.append(lane[i])
    return spots


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def replay_intent_log(config: SessionConfig, intents: list[BotAction], level_index: int,
                      round_index: int) -> str:
    """Re-run one round from an intent log; returns the final state digest."""
    script: SessionScript = {(level_index, round_index): list(intents)}
    transcript = SessionTranscript(room_key="REPLAY")
    clock = _TickClock(0)
    _run_round(config, script, level_index, round_index, clock, transcript, max_ticks=1_000_000)
    return transcript.round_results[-1].digest
