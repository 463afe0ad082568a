"""Headless session driving: scripted bots, transcripts, replay checking."""

from towerlab.harness.runner import (
    BotAction,
    RoundResult,
    SessionScript,
    SessionTranscript,
    default_bot_schedule,
    events_to_records,
    replay_intent_log,
    run_session,
)

__all__ = [
    "BotAction",
    "RoundResult",
    "SessionScript",
    "SessionTranscript",
    "default_bot_schedule",
    "events_to_records",
    "replay_intent_log",
    "run_session",
]
