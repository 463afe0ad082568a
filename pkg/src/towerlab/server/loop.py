"""The authoritative per-room game loop.

One loop task owns its room's GameState exclusively. Network handlers only
enqueue intents; the loop drains the queue between fixed timesteps, so
intents apply strictly in server arrival order. Transport is abstracted
behind member outboxes, which lets the same loop run under websockets or
fully in-process for headless tests.
"""

from __future__ import annotations

import asyncio
import json
import time
from dataclasses import dataclass
from pathlib import Path

from towerlab.harness.runner import RoundResult, events_to_records
from towerlab.server import protocol
from towerlab.server.rooms import (
    LeaderboardEntry,
    Member,
    Role,
    Room,
    SessionPhase,
    leaderboard_topk,
    persist_leaderboard,
)
from towerlab.sim import (
    Command,
    CommandKind,
    CommandRejected,
    Phase,
    TICK_DT,
    Track,
    apply_command,
    init_game,
    state_digest,
    tick,
)
from towerlab.sim.engine import advance_planning, round_score
from towerlab.telemetry.records import chat_record, now_ms, normalize_chat_text, system_record

COUNTDOWN_EVERY_TICKS = 20  # once per second
DELTA_EVERY_TICKS = 2  # 10 Hz
SNAPSHOT_EVERY_TICKS = 100  # every 5 s


@dataclass
class Intent:
    member: Member
    seq: int
    type: str
    payload: dict


class GameLoop:
    """Runs a room from lobby to FINISHED."""

    def __init__(
        self,
        room: Room,
        time_scale: float = 1.0,
        between_rounds_seconds: float = 3.0,
        persist_dir: str | Path | None = None,
    ):
        self.room = room
        self.time_scale = time_scale
        self.between_rounds_seconds = between_rounds_seconds
        self.persist_dir = Path(persist_dir) if persist_dir else None
        self._counters: dict[str, int] = {}
        self._leaderboard_path: Path | None = None
        self._intents_path: Path | None = None
        if self.persist_dir is not None:
            self.persist_dir.mkdir(parents=True, exist_ok=True)
            stem = f"{room.room_key}_{now_ms()}"
            self._leaderboard_path = self.persist_dir / f"{stem}.leaderboard.jsonl"
            self._intents_path = self.persist_dir / f"{stem}.intents.jsonl"

    # -- transport-facing helpers -------------------------------------------

    def send(self, member: Member, msg_type: str, payload: dict) -> None:
        if not member.connected:
            return
        member.outbox.put_nowait(
            {
                "seq": member.next_seq(),
                "type": msg_type,
                "room": self.room.room_key,
                "payload": payload,
            }
        )

    def broadcast(self, msg_type: str, payload: dict) -> None:
        for member in self.room.members:
            self.send(member, msg_type, payload)

    def lobby_state(self) -> dict:
        room = self.room
        return {
            "team_name": room.team_name,
            "session_phase": room.session_phase.value,
            "config_name": room.config.name,
            "mode": room.config.mode.value,
            "level": room.current_level,
            "round": room.current_round,
            "players": [
                {
                    "slot": m.slot_id,
                    "name": m.name,
                    "color": m.color,
                    "host": m.is_host,
                    "connected": m.connected,
                }
                for m in room.players
            ],
            "observers": [m.name for m in room.observers],
            "slots_total": len(room.config.team.slots),
        }

    def snapshot_payload(self) -> dict:
        state = self.room.game_state
        return {
            "team_name": self.room.team_name,
            "state": protocol.state_to_wire(state) if state is not None else None,
            "level_info": protocol.level_info_to_wire(state) if state is not None else None,
        }

    # -- logging -------------------------------------------------------------

    def _log_records(self, records) -> None:
        if self.room.sink is None:
            return
        for record in records:
            self.room.sink.record_and_flush(record)

    def _log_system(self, event: str, attrs: dict) -> None:
        self._log_records([system_record(event, attrs, ts_ms=now_ms())])

    # -- session -------------------------------------------------------------

    async def run(self) -> None:
        room = self.room
        self._log_system(
            "SESSION_START",
            {"room": room.room_key, "config": room.config.name, "team": room.team_name,
             "name_seed": room.seed},
        )
        await self._lobby()
        for level_index in range(len(room.config.levels)):
            for round_index in range(room.config.rounds_per_level):
                room.current_level = level_index
                room.current_round = round_index
                room.session_phase = SessionPhase.IN_GAME
                await self._run_round(level_index, round_index)
                room.session_phase = SessionPhase.BETWEEN_ROUNDS
                is_last = (
                    level_index == len(room.config.levels) - 1
                    and round_index == room.config.rounds_per_level - 1
                )
                if not is_last:
                    await self._sleep(self.between_rounds_seconds)
        room.session_phase = SessionPhase.FINISHED
        self.broadcast("LOBBY_STATE", self.lobby_state())
        self._log_system("SESSION_END", {"rounds": len(room.leaderboard)})
        if room.sink is not None:
            room.sink.close()

    async def _sleep(self, seconds: float) -> None:
        if self.time_scale <= 0:
            await asyncio.sleep(0)
        else:
            await asyncio.sleep(seconds / self.time_scale)

    async def _lobby(self) -> None:
        """Wait for the host's READY; relay chat and team-name edits."""
        while True:
            intent = await self.room.intents.get()
            if intent.type == "READY" and intent.member.is_host:
                self.broadcast("LOBBY_STATE", self.lobby_state())
                return
            if intent.type == "CHAT":
                self._relay_chat(intent)
            elif intent.type == "SET_TEAM_NAME":
                name = str(intent.payload.get("name", "")).strip()
                if name:
                    self.room.team_name = name[:64]
                self.broadcast("LOBBY_STATE", self.lobby_state())
            elif intent.type == "PING":
                self.send(intent.member, "GAME_DELTA", {"events": [], "pong": True, "re": intent.seq})
            else:
                self.send(
                    intent.member,
                    "ERROR",
                    {"code": "not_started", "message": "session has not started", "re": intent.seq},
                )

    async def _run_round(self, level_index: int, round_index: int) -> None:
        room = self.room
        state = init_game(room.config, level_index, round_index)
        room.game_state = state
        self._counters = {"kills": 0, "leaks": 0, "bounties": 0}
        self._round_intents: list[dict] = []
        self._log_system(
            "ROUND_START",
            {
                "level": level_index,
                "round": round_index,
                "map": room.config.levels[level_index].name,
                "starting_gold": room.config.levels[level_index].starting_gold,
            },
        )
        self.broadcast("GAME_SNAPSHOT", self.snapshot_payload())
        self._ready_vacant_slots(state)

        pending_events: list = []
        result: RoundResult | None = None
        next_due = time.perf_counter()
        while state.phase is not Phase.ENDED:
            result = self._drain_intents(state, pending_events) or result
            if state.phase is Phase.ENDED:
                break
            if state.phase is Phase.PLANNING:
                state, events = advance_planning(state)
            else:
                state, events = tick(state)
            records, round_result = events_to_records(state, events, now_ms(), self._counters)
            self._log_records(records)
            pending_events.extend(events)
            result = round_result or result

            if state.phase is Phase.PLANNING and state.tick % COUNTDOWN_EVERY_TICKS == 0:
                self.broadcast(
                    "GAME_DELTA",
                    {
                        "tick": state.tick,
                        "events": [],
                        "planning_remaining": round(state.planning_remaining, 3),
                        "ready": dict(state.ready_flags),
                    },
                )
            if state.tick % DELTA_EVERY_TICKS == 0 and (
                pending_events or state.phase is Phase.ATTACK
            ):
                self._flush_deltas(state, pending_events)
            if state.tick % SNAPSHOT_EVERY_TICKS == 0:
                self.broadcast("GAME_SNAPSHOT", self.snapshot_payload())

            if self.time_scale > 0:
                next_due += TICK_DT / self.time_scale
                delay = next_due - time.perf_counter()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    next_due = time.perf_counter()
                    await asyncio.sleep(0)
            else:
                await asyncio.sleep(0)

        self._flush_deltas(state, pending_events)
        assert result is not None
        digest = result.digest
        room.round_digests[(level_index, round_index)] = digest
        entry = LeaderboardEntry(
            team_name=room.team_name,
            level=level_index,
            round=round_index,
            score=result.score,
            unspent=result.unspent,
            points=result.points,
            health=result.health,
            completed_at_ms=now_ms(),
        )
        room.leaderboard.append(entry)
        if self._leaderboard_path is not None:
            persist_leaderboard(self._leaderboard_path, entry)
        if self._intents_path is not None:
            with open(self._intents_path, "a", encoding="utf-8") as handle:
                for item in self._round_intents:
                    handle.write(json.dumps(item, separators=(",", ":")) + "\n")
        room.intent_log.extend(self._round_intents)

        self.broadcast(
            "ROUND_RESULT",
            {
                "level": level_index,
                "round": round_index,
                "outcome": result.outcome,
                "score": result.score,
                "breakdown": {
                    "unspent": result.unspent,
                    "points": result.points,
                    "health": result.health,
                    "kills": result.kills,
                    "leaks": result.leaks,
                    "bounties": result.bounties,
                },
                "digest": digest,
                "team_name": room.team_name,
            },
        )
        self.broadcast(
            "LEADERBOARD",
            {
                "entries": [
                    json.loads(e.to_json()) for e in leaderboard_topk(room.leaderboard, 10)
                ]
            },
        )

    # -- intent handling ------------------------------------------------------

    def _drain_intents(self, state, pending_events) -> RoundResult | None:
        result: RoundResult | None = None
        while True:
            try:
                intent = self.room.intents.get_nowait()
            except asyncio.QueueEmpty:
                return result
            if intent.type == "CHAT":
                self._relay_chat(intent)
                continue
            if intent.type == "PING":
                self.send(intent.member, "GAME_DELTA", {"events": [], "pong": True, "re": intent.seq})
                continue
            if intent.type == "SET_TEAM_NAME":
                self.send(
                    intent.member,
                    "ERROR",
                    {"code": "phase_violation", "message": "team name locked in game", "re": intent.seq},
                )
                continue
            if intent.type not in protocol.GAME_INTENTS:
                self.send(
                    intent.member,
                    "ERROR",
                    {"code": "unknown_intent", "message": intent.type, "re": intent.seq},
                )
                continue
            if intent.member.role is Role.OBSERVER:
                self.send(
                    intent.member,
                    "ERROR",
                    {"code": "observer_cannot_act", "message": "observers cannot play", "re": intent.seq},
                )
                continue
            command = self._to_command(intent)
            if command is None:
                self.send(
                    intent.member,
                    "ERROR",
                    {"code": "missing_field", "message": "malformed intent payload", "re": intent.seq},
                )
                continue
            try:
                state, events = apply_command(state, command)
            except CommandRejected as rejection:
                self.send(
                    intent.member,
                    "ERROR",
                    {"code": rejection.code, "message": str(rejection), "re": intent.seq},
                )
                continue
            self._round_intents.append(
                {
                    "level": state.level_index,
                    "round": state.round_index,
                    "tick": state.tick,
                    "slot": command.issuer,
                    "kind": command.kind.value,
                    "spec_id": command.spec_id,
                    "cell": list(command.cell) if command.cell else None,
                    "track": command.track.value if command.track else None,
                }
            )
            records, round_result = events_to_records(state, events, now_ms(), self._counters)
            self._log_records(records)
            result = round_result or result
            self.broadcast(
                "GAME_DELTA",
                {
                    "tick": state.tick,
                    "events": [protocol.event_to_wire(state, e) for e in events],
                    "re": intent.seq,
                    "by": command.issuer,
                },
            )

    def _to_command(self, intent: Intent) -> Command | None:
        payload = intent.payload
        slot = intent.member.slot_id
        if slot is None:
            return None
        try:
            kind = CommandKind(intent.type)
        except ValueError:
            return None
        cell = None
        if payload.get("cell") is not None:
            raw = payload["cell"]
            if not isinstance(raw, list) or len(raw) != 2:
                return None
            cell = (int(raw[0]), int(raw[1]))
        track = None
        if payload.get("track"):
            try:
                track = Track(str(payload["track"]).upper())
            except ValueError:
                return None
        spec_id = payload.get("tower_type")
        return Command(
            issuer=slot,
            kind=kind,
            spec_id=str(spec_id).lower() if spec_id is not None else None,
            cell=cell,
            track=track,
        )

    def _relay_chat(self, intent: Intent) -> None:
        raw = str(intent.payload.get("text", ""))
        text, truncated = normalize_chat_text(raw)
        if not text:
            return
        self.broadcast(
            "CHAT_RELAY",
            {
                "name": intent.member.name,
                "slot": intent.member.slot_id,
                "color": intent.member.color,
                "text": text,
            },
        )
        records = [chat_record(intent.member.name, text, ts_ms=now_ms())]
        if truncated:
            records.append(
                system_record("CHAT_TRUNCATED", {"user": intent.member.name}, ts_ms=now_ms())
            )
        self._log_records(records)

    def _ready_vacant_slots(self, state) -> None:
        """Slots without a bound player never block the planning phase;
        their synthetic READY commands are logged so replays line up."""
        for slot_id in list(state.ready_flags):
            if self.room.member_for_slot(slot_id) is not None:
                continue
            try:
                _, events = apply_command(state, Command(issuer=slot_id, kind=CommandKind.READY))
            except CommandRejected:
                continue
            self._round_intents.append(
                {
                    "level": state.level_index,
                    "round": state.round_index,
                    "tick": state.tick,
                    "slot": slot_id,
                    "kind": "READY",
                    "spec_id": None,
                    "cell": None,
                    "track": None,
                }
            )
            records, _ = events_to_records(state, events, now_ms(), self._counters)
            self._log_records(records)

    def _flush_deltas(self, state, pending_events: list) -> None:
        payload = {
            "tick": state.tick,
            "events": [protocol.event_to_wire(state, e) for e in pending_events],
        }
        if state.phase in (Phase.ATTACK, Phase.ENDED):
            payload["sync"] = protocol.sync_to_wire(state)
        self.broadcast("GAME_DELTA", payload)
        pending_events.clear()


async def run_round_loop(
    room: Room,
    time_scale: float = 1.0,
    between_rounds_seconds: float = 3.0,
    persist_dir: str | Path | None = None,
) -> None:
    """Drive a room's full session (planning countdowns, ticks, results)."""
    await GameLoop(
        room,
        time_scale=time_scale,
        between_rounds_seconds=between_rounds_seconds,
        persist_dir=persist_dir,
    ).run()
