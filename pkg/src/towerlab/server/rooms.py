"""Room lifecycle: keys, slots, colors, tokens, team names, leaderboards."""

from __future__ import annotations

import asyncio
import json
import random
import secrets
import string
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from towerlab.config.model import SessionConfig

ROOM_KEY_ALPHABET = string.ascii_uppercase + string.digits
ROOM_KEY_LENGTH = 6

#: Word pools for suggested team names; sampled with the per-room seed so a
#: session's name suggestion is reproducible from its log header.
_NAME_ADJECTIVES = (
    "brave", "sneaky", "gilded", "rowdy", "quiet", "turbo", "velvet", "feral",
    "cosmic", "mossy", "iron", "maroon", "jolly", "arcane", "swift", "plucky",
)
_NAME_NOUNS = (
    "badgers", "carrots", "wizards", "pigeons", "anvils", "comets", "ferns",
    "lanterns", "otters", "pylons", "walruses", "gargoyles", "teapots",
    "mantises", "yaks", "marmots",
)


class RoomError(Exception):
    """Join/create failure with a stable machine code."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(message or code)
        self.code = code


class SessionPhase(str, Enum):
    LOBBY = "LOBBY"
    IN_GAME = "IN_GAME"
    BETWEEN_ROUNDS = "BETWEEN_ROUNDS"
    FINISHED = "FINISHED"


class Role(str, Enum):
    PLAYER = "PLAYER"
    OBSERVER = "OBSERVER"


@dataclass
class Member:
    member_id: int
    name: str
    role: Role
    token: str
    slot_id: str | None  # None for observers
    color: str
    is_host: bool = False
    connected: bool = False  # flips when a transport binds this member
    seq: int = 0
    outbox: asyncio.Queue = field(default_factory=asyncio.Queue)

    def next_seq(self) -> int:
        self.seq += 1
        return self.seq

    def bind_connection(self) -> None:
        """Attach a fresh transport: drop stale queued messages and restart
        the per-connection sequence numbering at 1."""
        self.connected = True
        while not self.outbox.empty():
            self.outbox.get_nowait()
        self.seq = 0


@dataclass
class LeaderboardEntry:
    team_name: str
    level: int
    round: int
    score: float
    unspent: int
    points: int
    health: int
    completed_at_ms: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "team": self.team_name,
                "level": self.level,
                "round": self.round,
                "score": self.score,
                "unspent": self.unspent,
                "points": self.points,
                "health": self.health,
                "completed_at_ms": self.completed_at_ms,
            },
            separators=(",", ":"),
        )


def leaderboard_topk(store: list[LeaderboardEntry], k: int) -> list[LeaderboardEntry]:
    """Best scores first; equal scores rank by earlier completion."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(store, key=lambda e: (-e.score, e.completed_at_ms))
    return ranked[:k]


class Room:
    def __init__(self, room_key: str, config: SessionConfig, seed: int):
        self.room_key = room_key
        self.config = config
        self.seed = seed
        rng = random.Random(seed)
        self.team_name = f"{rng.choice(_NAME_ADJECTIVES)} {rng.choice(_NAME_NOUNS)}"
        self.session_phase = SessionPhase.LOBBY
        self.members: list[Member] = []
        self.intents: asyncio.Queue = asyncio.Queue()
        self.intent_log: list[dict] = []
        self.leaderboard: list[LeaderboardEntry] = []
        self.round_digests: dict[tuple[int, int], str] = {}
        self.current_level = 0
        self.current_round = 0
        self.game_state = None
        self.sink = None  # TelemetrySink, attached by the service
        self._next_member_id = 1

    # -- membership ---------------------------------------------------------

    @property
    def players(self) -> list[Member]:
        return [m for m in self.members if m.role is Role.PLAYER]

    @property
    def observers(self) -> list[Member]:
        return [m for m in self.members if m.role is Role.OBSERVER]

    @property
    def host(self) -> Member:
        return next(m for m in self.members if m.is_host)

    def member_by_token(self, token: str) -> Member | None:
        for member in self.members:
            if secrets.compare_digest(member.token, token):
                return member
        return None

    def free_slot_id(self) -> str | None:
        used = {m.slot_id for m in self.players}
        for slot in self.config.team.slots:
            if slot.slot_id not in used:
                return slot.slot_id
        return None

    def add_member(self, name: str, role: Role, is_host: bool = False) -> Member:
        if not name.strip():
            raise RoomError("name_empty", "display name must not be empty")
        if role is Role.PLAYER:
            if self.session_phase is not SessionPhase.LOBBY:
                raise RoomError("session_started", "players can only join in the lobby")
            slot_id = self.free_slot_id()
            if slot_id is None:
                raise RoomError("room_full", f"all {len(self.config.team.slots)} slots taken")
            color = self.config.team.assignment(slot_id).color
        else:
            slot_id = None
            color = "#888888"
        member = Member(
            member_id=self._next_member_id,
            name=name.strip(),
            role=role,
            token=secrets.token_hex(16),  # 128 bits
            slot_id=slot_id,
            color=color,
            is_host=is_host,
        )
        self._next_member_id += 1
        self.members.append(member)
        return member

    def member_for_slot(self, slot_id: str) -> Member | None:
        for member in self.players:
            if member.slot_id == slot_id:
                return member
        return None


class RoomManager:
    def __init__(self, seed: int | None = None):
        self.rooms: dict[str, Room] = {}
        # Seeded manager gives reproducible keys/team names for tests.
        self._rng = random.Random(seed) if seed is not None else None

    def _rand_key(self) -> str:
        if self._rng is not None:
            return "".join(self._rng.choice(ROOM_KEY_ALPHABET) for _ in range(ROOM_KEY_LENGTH))
        return "".join(secrets.choice(ROOM_KEY_ALPHABET) for _ in range(ROOM_KEY_LENGTH))

    def create_room(
        self,
        host_name: str,
        config: SessionConfig,
        host_role: Role = Role.PLAYER,
    ) -> tuple[Room, Member]:
        key = self._rand_key()
        while key in self.rooms:  # collision: regenerate
            key = self._rand_key()
        seed = self._rng.randrange(2**31) if self._rng is not None else secrets.randbits(31)
        room = Room(key, config, seed)
        host = room.add_member(host_name, host_role, is_host=True)
        self.rooms[key] = room
        return room, host

    def get(self, room_key: str) -> Room:
        room = self.rooms.get(room_key)
        if room is None:
            raise RoomError("unknown_room", room_key)
        return room

    def join_room(self, room_key: str, name: str, role: Role) -> tuple[Room, Member]:
        room = self.get(room_key)
        return room, room.add_member(name, role)

    def reconnect(self, room_key: str, token: str) -> tuple[Room, Member]:
        room = self.get(room_key)
        member = room.member_by_token(token)
        if member is None:
            raise RoomError("bad_token", "no member with that session token")
        member.connected = True
        return room, member

    def close_room(self, room_key: str) -> None:
        self.rooms.pop(room_key, None)


def persist_leaderboard(path: Path, entry: LeaderboardEntry) -> None:
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(entry.to_json() + "\n")
