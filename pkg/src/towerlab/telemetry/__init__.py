"""Session event logging: XML-tag line format, local files, REST delivery."""

from towerlab.telemetry.records import (
    ActionKind,
    CHAT_TEXT_CAP,
    LogRecord,
    RecordKind,
    action_record,
    chat_record,
    normalize_chat_text,
    system_record,
)
from towerlab.telemetry.xmlfmt import parse_log, serialize_record
from towerlab.telemetry.sink import SinkConfig, TelemetrySink

__all__ = [
    "ActionKind",
    "CHAT_TEXT_CAP",
    "LogRecord",
    "RecordKind",
    "SinkConfig",
    "TelemetrySink",
    "action_record",
    "chat_record",
    "normalize_chat_text",
    "parse_log",
    "serialize_record",
    "system_record",
]
