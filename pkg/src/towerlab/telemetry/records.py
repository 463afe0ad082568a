"""Typed log records for chat, tower interactions and system events."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

CHAT_TEXT_CAP = 500


class RecordKind(str, Enum):
    CHAT = "CHAT"
    ACTION = "ACTION"
    SYSTEM = "SYSTEM"


class ActionKind(str, Enum):
    BUY = "BUY"
    SELL = "SELL"
    UPGRADE = "UPGRADE"


@dataclass
class LogRecord:
    """One logged line.

    Timestamps are integer UTC milliseconds; None marks records parsed from
    sources that carry no timestamp.
    """

    kind: RecordKind
    ts_ms: int | None = None
    user: str = ""
    text: str = ""  # CHAT
    action: ActionKind | None = None  # ACTION
    tower_type: str = ""  # ACTION: spec id, uppercased
    location: tuple[int, int] | None = None  # ACTION
    track: str = ""  # ACTION UPGRADE only
    level: int | None = None  # ACTION UPGRADE only
    event: str = ""  # SYSTEM
    attributes: dict[str, str] = field(default_factory=dict)  # SYSTEM


def now_ms() -> int:
    return int(datetime.now(timezone.utc).timestamp() * 1000)


def normalize_chat_text(text: str) -> tuple[str, bool]:
    """Newlines become single spaces; overlong text is capped.

    Returns (normalized text, True when truncation happened).
    """
    flat = text.replace("\r\n", " ").replace("\n", " ").replace("\r", " ")
    if len(flat) > CHAT_TEXT_CAP:
        return flat[:CHAT_TEXT_CAP], True
    return flat, False


def chat_record(user: str, text: str, ts_ms: int | None = None) -> LogRecord:
    flat, _ = normalize_chat_text(text)
    return LogRecord(RecordKind.CHAT, ts_ms=ts_ms, user=user, text=flat)


def action_record(
    action: ActionKind,
    tower_type: str,
    location: tuple[int, int],
    user: str,
    ts_ms: int | None = None,
    track: str = "",
    level: int | None = None,
) -> LogRecord:
    return LogRecord(
        RecordKind.ACTION,
        ts_ms=ts_ms,
        user=user,
        action=action,
        tower_type=tower_type.upper(),
        location=location,
        track=track,
        level=level,
    )


def system_record(event: str, attributes: dict[str, object] | None = None,
                  ts_ms: int | None = None) -> LogRecord:
    attrs = {k: str(v) for k, v in (attributes or {}).items()}
    return LogRecord(RecordKind.SYSTEM, ts_ms=ts_ms, event=event, attributes=attrs)
