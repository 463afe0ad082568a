"""Log format and sink tests."""

from __future__ import annotations

import random
import re
import threading
import time
from pathlib import Path

import pytest

from stub_rest import StubCollector

from towerlab.telemetry import (
    ActionKind,
    LogRecord,
    RecordKind,
    SinkConfig,
    TelemetrySink,
    action_record,
    chat_record,
    normalize_chat_text,
    parse_log,
    serialize_record,
    system_record,
)

DATA_DIR = Path(__file__).parent / "data"
TAG_TOKEN_RE = re.compile(r"<(\w+)>(.*?)</\1>")


def tag_tokens(text: str) -> list[tuple[str, str]]:
    return TAG_TOKEN_RE.findall(text)


# ---------------------------------------------------------------------------
# serialize_record
# ---------------------------------------------------------------------------


class TestSerialize:
    def test_chat_line_shape(self):
        line = serialize_record(chat_record("tjwill", "willdo", ts_ms=1_700_000_000_123))
        assert line.endswith("<speaker>tjwill</speaker> <chat_text>willdo</chat_text>")
        assert line.startswith("<ts>")

    def test_buy_line_shape(self):
        record = action_record(ActionKind.BUY, "multi", (13, 5), "schou01", ts_ms=0)
        line = serialize_record(record)
        assert (
            "<action>BUY</action> <tower_type>MULTI</tower_type> "
            "<location>(13, 5)</location> <user>schou01</user>"
        ) in line

    def test_upgrade_inserts_track_and_level_before_location(self):
        record = action_record(
            ActionKind.UPGRADE, "basic", (3, 4), "bob", ts_ms=0, track="DAMAGE", level=2
        )
        tags = [tag for tag, _ in tag_tokens(serialize_record(record))]
        assert tags == ["ts", "action", "tower_type", "upgrade_track", "level", "location", "user"]

    def test_escaping_round_trip(self):
        record = chat_record("amy", "<3 & more >.<", ts_ms=5)
        line = serialize_record(record)
        assert "&lt;3 &amp; more &gt;.&lt;" in line
        parsed, errors = parse_log(line)
        assert not errors
        assert parsed[0].text == "<3 & more >.<"

    def test_timestamp_whole_milliseconds(self):
        record = chat_record("amy", "hi", ts_ms=1_722_430_245_007)
        line = serialize_record(record)
        assert "<ts>" in line and line.split("</ts>")[0].endswith(".007Z")
        parsed, _ = parse_log(line)
        assert parsed[0].ts_ms == 1_722_430_245_007


# ---------------------------------------------------------------------------
# parse_log
# ---------------------------------------------------------------------------


class TestParse:
    def test_snippet_parses_to_16_records(self):
        text = (DATA_DIR / "table4b.log").read_text()
        records, errors = parse_log(text)
        assert errors == []
        assert len(records) == 16
        chats = [r for r in records if r.kind is RecordKind.CHAT]
        actions = [r for r in records if r.kind is RecordKind.ACTION]
        assert len(chats) == 3 and len(actions) == 13
        assert sum(1 for c in chats if c.user == "tjwill") == 2
        assert sum(1 for c in chats if c.user == "schou01") == 1
        assert all(a.action is ActionKind.BUY for a in actions)
        assert any(a.tower_type == "MAP" and a.location == (0, 14) for a in actions)
        assert any(a.tower_type == "DISCOUNT" and a.location == (10, 0) for a in actions)
        assert all(r.ts_ms is None for r in records)  # snippet carries no <ts>

    def test_snippet_reserialization_token_exact(self):
        text = (DATA_DIR / "table4b.log").read_text()
        records, _ = parse_log(text)
        round_tripped = "\n".join(serialize_record(r) for r in records)
        assert tag_tokens(round_tripped) == tag_tokens(text)

    def test_empty_input(self):
        assert parse_log("") == ([], [])

    def test_unknown_action_reported_with_line_number(self):
        text = (
            "<action>BUY</action> <tower_type>MAP</tower_type> <location>(1, 1)</location> <user>a</user>\n"
            "<action>PAINT</action> <tower_type>MAP</tower_type> <location>(1, 1)</location> <user>a</user>\n"
            "<speaker>a</speaker> <chat_text>still parsed</chat_text>\n"
        )
        records, errors = parse_log(text)
        assert len(records) == 2  # parsing continued past the bad line
        assert len(errors) == 1 and "line 2" in errors[0] and "PAINT" in errors[0]

    def test_malformed_tag_pair_reported(self):
        records, errors = parse_log("<speaker>a</chat_text> <chat_text>x</chat_text>")
        assert records == []
        assert errors and "mismatched" in errors[0]

    @pytest.mark.parametrize("seed", range(10))
    def test_random_round_trip_100_records_each(self, seed):
        rng = random.Random(seed)
        records = [random_record(rng) for _ in range(100)]
        text = "\n".join(serialize_record(r) for r in records)
        parsed, errors = parse_log(text)
        assert errors == []
        assert parsed == records


def random_record(rng: random.Random) -> LogRecord:
    ts = rng.randrange(0, 2_000_000_000_000) if rng.random() < 0.8 else None
    kind = rng.choice(list(RecordKind))
    user = rng.choice(["tjwill", "ManedWlf", "schou01", "ym2552", "Ann & Bob", "x<y>z"])
    if kind is RecordKind.CHAT:
        text = rng.choice(
            ["gogogo", "sell the diamonds in tile (8,9)", "<3", "a&b", "50 seconds D:", "ok  двигаем"]
        )
        return chat_record(user, text, ts_ms=ts)
    if kind is RecordKind.ACTION:
        action = rng.choice(list(ActionKind))
        kwargs = {}
        if action is ActionKind.UPGRADE:
            kwargs = {"track": rng.choice(["RANGE", "DAMAGE", "FIRERATE"]), "level": rng.randrange(1, 4)}
        return action_record(
            action,
            rng.choice(["basic", "MAP", "multi", "discount"]),
            (rng.randrange(0, 16), rng.randrange(0, 16)),
            user,
            ts_ms=ts,
            **kwargs,
        )
    return system_record(
        rng.choice(["ROUND_ENDED", "PHASE_CHANGED", "SESSION_START"]),
        {"key one": "value with spaces", "outcome": rng.choice(["WIN", "LOSE"]), "odd": "a=b&c"},
        ts_ms=ts,
    )


class TestChatNormalization:
    def test_newlines_become_spaces(self):
        text, truncated = normalize_chat_text("go\nteam\r\nnow")
        assert text == "go team now" and truncated is False

    def test_cap_at_500(self):
        text, truncated = normalize_chat_text("x" * 600)
        assert len(text) == 500 and truncated is True


# ---------------------------------------------------------------------------
# Sink: durability, batching, retry, dead letters
# ---------------------------------------------------------------------------


@pytest.fixture()
def stub_server():
    server = StubCollector()
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server
    server.shutdown()
    thread.join()


def wait_until(predicate, timeout=5.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        if predicate():
            return True
        time.sleep(0.01)
    return False


class TestSink:
    def test_batch_of_one_posts_every_record_in_order(self, tmp_path, stub_server):
        sink = TelemetrySink(
            tmp_path, "ROOM01", 0,
            SinkConfig(endpoint=stub_server.endpoint, batch_size=1, flush_interval=0.2),
        )
        for i in range(5):
            sink.record_and_flush(chat_record("amy", f"msg {i}", ts_ms=i))
        sink.close()
        assert wait_until(lambda: len(stub_server.posts) == 5)
        bodies = [body for _, _, body in stub_server.posts]
        assert [b.split("msg ")[1].split("<")[0] for b in bodies] == ["0", "1", "2", "3", "4"]
        assert all(path == "/log" for path, _, _ in stub_server.posts)
        assert all(session == "ROOM01" for _, session, _ in stub_server.posts)

    def test_500_records_batch_50_make_10_posts(self, tmp_path, stub_server):
        sink = TelemetrySink(
            tmp_path, "ROOM02", 0,
            SinkConfig(endpoint=stub_server.endpoint, batch_size=50, flush_interval=5.0),
        )
        for i in range(500):
            sink.record_and_flush(chat_record("amy", f"msg {i}", ts_ms=i))
        sink.close()
        assert wait_until(lambda: len(stub_server.posts) == 10)
        time.sleep(0.1)
        assert len(stub_server.posts) == 10
        joined = "\n".join(body for _, _, body in stub_server.posts).splitlines()
        assert len(joined) == 500
        assert [line.split("msg ")[1].split("<")[0] for line in joined] == [
            str(i) for i in range(500)
        ]

    def test_offline_endpoint_dead_letters_everything(self, tmp_path):
        sink = TelemetrySink(
            tmp_path, "ROOM03", 0,
            SinkConfig(
                endpoint="http://127.0.0.1:1",  # nothing listens here
                batch_size=4,
                flush_interval=0.1,
                max_attempts=2,
                backoff_seconds=0.01,
                request_timeout=0.2,
            ),
        )
        for i in range(10):
            sink.record_and_flush(chat_record("amy", f"msg {i}", ts_ms=i))
        sink.close()
        local = sink.log_path.read_text()
        dead = sink.dead_letter_path.read_text()
        assert dead == local
        assert len(local.splitlines()) == 10

    def test_local_file_complete_before_delivery(self, tmp_path, stub_server):
        sink = TelemetrySink(
            tmp_path, "ROOM04", 0,
            SinkConfig(endpoint=stub_server.endpoint, batch_size=5, flush_interval=1.0),
        )
        stub_server.sink_path = sink.log_path
        for i in range(25):
            sink.record_and_flush(chat_record("amy", f"msg {i}", ts_ms=i))
        sink.close()
        assert wait_until(lambda: len(stub_server.posts) == 5)
        assert all(stub_server.local_snapshot_complete)

    def test_flush_interval_ships_partial_batches(self, tmp_path, stub_server):
        sink = TelemetrySink(
            tmp_path, "ROOM05", 0,
            SinkConfig(endpoint=stub_server.endpoint, batch_size=100, flush_interval=0.05),
        )
        sink.record_and_flush(chat_record("amy", "lonely", ts_ms=1))
        assert wait_until(lambda: len(stub_server.posts) >= 1, timeout=3.0)
        sink.close()

    def test_session_file_name(self, tmp_path):
        sink = TelemetrySink(tmp_path, "AB12CD", 1_722_430_245_000, SinkConfig())
        sink.close()
        assert sink.log_path.name == "AB12CD_20240731T125045Z.log"

    def test_batch_size_must_be_positive(self):
        with pytest.raises(ValueError):
            SinkConfig(batch_size=0)
