"""Networked session service: rooms, authoritative loop, wire protocol."""

from towerlab.server.rooms import (
    LeaderboardEntry,
    Member,
    Room,
    RoomError,
    RoomManager,
    leaderboard_topk,
)
from towerlab.server.loop import run_round_loop
from towerlab.server.service import build_app

__all__ = [
    "LeaderboardEntry",
    "Member",
    "Room",
    "RoomError",
    "RoomManager",
    "build_app",
    "leaderboard_topk",
    "run_round_loop",
]
