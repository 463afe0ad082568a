"""The XML-tag line format for session logs.

One record per line. Chat lines look like

    <ts>2026-08-11T14:00:05.123Z</ts> <speaker>tjwill</speaker> <chat_text>willdo</chat_text>

and tower interactions like

    <ts>...</ts> <action>BUY</action> <tower_type>DISCOUNT</tower_type> <location>(10, 0)</location> <user>ManedWlf</user>

UPGRADE actions insert <upgrade_track> and <level> before <location>. The
parser tolerates a missing <ts> prefix (timestamp recorded as unknown) and
system-event lines are an extension invisible to consumers of the two core
shapes above.
"""

from __future__ import annotations

import re
from datetime import datetime, timezone

from towerlab.telemetry.records import ActionKind, LogRecord, RecordKind

_TAG_RE = re.compile(r"<(\w+)>(.*?)</(\w+)>")
_LOCATION_RE = re.compile(r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _unescape(text: str) -> str:
    return text.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")


def format_ts(ts_ms: int) -> str:
    dt = datetime.fromtimestamp(ts_ms / 1000.0, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ts_ms % 1000:03d}Z"


def parse_ts(text: str) -> int:
    dt = datetime.strptime(text, "%Y-%m-%dT%H:%M:%S.%fZ").replace(tzinfo=timezone.utc)
    return int(round(dt.timestamp() * 1000))


def serialize_record(record: LogRecord) -> str:
    parts: list[str] = []
    if record.ts_ms is not None:
        parts.append(f"<ts>{format_ts(record.ts_ms)}</ts>")
    if record.kind is RecordKind.CHAT:
        parts.append(f"<speaker>{_escape(record.user)}</speaker>")
        parts.append(f"<chat_text>{_escape(record.text)}</chat_text>")
    elif record.kind is RecordKind.ACTION:
        assert record.action is not None and record.location is not None
        parts.append(f"<action>{record.action.value}</action>")
        parts.append(f"<tower_type>{_escape(record.tower_type)}</tower_type>")
        if record.action is ActionKind.UPGRADE:
            parts.append(f"<upgrade_track>{_escape(record.track)}</upgrade_track>")
            parts.append(f"<level>{record.level}</level>")
        x, y = record.location
        parts.append(f"<location>({x}, {y})</location>")
        parts.append(f"<user>{_escape(record.user)}</user>")
    else:
        parts.append(f"<event>{_escape(record.event)}</event>")
        for key, value in record.attributes.items():
            parts.append(f"<detail>{_escape(key)}={_escape(value)}</detail>")
    return " ".join(parts)


def parse_log(text: str) -> tuple[list[LogRecord], list[str]]:
    """Parse a whole log; bad lines are reported, never fatal.

    Returns (records, errors); each error names its 1-based line number.
    """
    records: list[LogRecord] = []
    errors: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        record, error = _parse_line(line)
        if error is not None:
            errors.append(f"line {lineno}: {error}")
        if record is not None:
            records.append(record)
    return records, errors


def _parse_line(line: str) -> tuple[LogRecord | None, str | None]:
    pairs: list[tuple[str, str]] = []
    for match in _TAG_RE.finditer(line):
        open_tag, value, close_tag = match.groups()
        if open_tag != close_tag:
            return None, f"mismatched tag pair <{open_tag}>...</{close_tag}>"
        pairs.append((open_tag, value))
    if not pairs:
        return None, "no recognizable tags"
    leftover = _TAG_RE.sub("", line).strip()
    if leftover.startswith("<") or leftover.endswith(">"):
        return None, f"malformed tag text {leftover!r}"

    fields = {}
    details: list[tuple[str, str]] = []
    for tag, value in pairs:
        if tag == "detail":
            key, _, val = value.partition("=")
            details.append((_unescape(key), _unescape(val)))
        elif tag in fields:
            return None, f"duplicate tag <{tag}>"
        else:
            fields[tag] = value

    ts_ms = None
    if "ts" in fields:
        try:
            ts_ms = parse_ts(fields["ts"])
        except ValueError:
            return None, f"bad timestamp {fields['ts']!r}"

    if "speaker" in fields:
        if "chat_text" not in fields:
            return None, "chat line missing <chat_text>"
        return (
            LogRecord(
                RecordKind.CHAT,
                ts_ms=ts_ms,
                user=_unescape(fields["speaker"]),
                text=_unescape(fields["chat_text"]),
            ),
            None,
        )

    if "action" in fields:
        action_raw = fields["action"]
        if action_raw not in ActionKind._value2member_map_:
            return None, f"unknown action value {action_raw!r}"
        action = ActionKind(action_raw)
        for needed in ("tower_type", "location", "user"):
            if needed not in fields:
                return None, f"action line missing <{needed}>"
        loc_match = _LOCATION_RE.match(fields["location"])
        if loc_match is None:
            return None, f"bad location {fields['location']!r}"
        track = ""
        level = None
        if action is ActionKind.UPGRADE:
            if "upgrade_track" not in fields or "level" not in fields:
                return None, "upgrade line missing <upgrade_track> or <level>"
            track = _unescape(fields["upgrade_track"])
            try:
                level = int(fields["level"])
            except ValueError:
                return None, f"bad level {fields['level']!r}"
        return (
            LogRecord(
                RecordKind.ACTION,
                ts_ms=ts_ms,
                user=_unescape(fields["user"]),
                action=action,
                tower_type=_unescape(fields["tower_type"]),
                location=(int(loc_match.group(1)), int(loc_match.group(2))),
                track=track,
                level=level,
            ),
            None,
        )

    if "event" in fields:
        return (
            LogRecord(
                RecordKind.SYSTEM,
                ts_ms=ts_ms,
                event=_unescape(fields["event"]),
                attributes=dict(details),
            ),
            None,
        )

    return None, f"unrecognized record shape with tags {sorted(fields)}"
