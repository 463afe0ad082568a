"""HTTP + WebSocket front of the session service.

Endpoints:
  POST /rooms                create a room (host name, preset or config text)
  GET  /healthz              liveness with room/player counts
  WS   /ws                   the game protocol; first message must be JOIN
  GET  /...                  static client bundle, when a directory is given
"""

from __future__ import annotations

import asyncio
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from towerlab.config import builtin_preset, parse_config, validate_config
from towerlab.config.document import ConfigError
from towerlab.server import protocol
from towerlab.server.loop import GameLoop, Intent
from towerlab.server.rooms import Role, RoomError, RoomManager, SessionPhase
from towerlab.telemetry.records import now_ms
from towerlab.telemetry.sink import SinkConfig, TelemetrySink


class ServiceState:
    def __init__(
        self,
        manager: RoomManager,
        time_scale: float = 1.0,
        persist_dir: str | None = None,
        log_sink_url: str | None = None,
        between_rounds_seconds: float = 3.0,
        default_config_text: str | None = None,
    ):
        self.manager = manager
        self.time_scale = time_scale
        self.persist_dir = persist_dir
        self.log_sink_url = log_sink_url
        self.between_rounds_seconds = between_rounds_seconds
        self.default_config_text = default_config_text
        self.loops: dict[str, GameLoop] = {}
        self.tasks: dict[str, asyncio.Task] = {}


def build_app(
    manager: RoomManager | None = None,
    time_scale: float = 1.0,
    persist_dir: str | None = None,
    log_sink_url: str | None = None,
    static_dir: str | None = None,
    between_rounds_seconds: float = 3.0,
    default_config_text: str | None = None,
) -> FastAPI:
    app = FastAPI(title="towerlab session server")
    service = ServiceState(
        manager or RoomManager(),
        time_scale=time_scale,
        persist_dir=persist_dir,
        log_sink_url=log_sink_url,
        between_rounds_seconds=between_rounds_seconds,
        default_config_text=default_config_text,
    )
    app.state.service = service

    @app.get("/healthz")
    async def healthz():
        rooms = service.manager.rooms
        return {
            "ok": True,
            "rooms": len(rooms),
            "players": sum(len(r.players) for r in rooms.values()),
            "in_game": sum(1 for r in rooms.values() if r.session_phase is SessionPhase.IN_GAME),
        }

    @app.post("/rooms")
    async def create_room(body: dict):
        host_name = str(body.get("host_name", "")).strip()
        role = Role.OBSERVER if str(body.get("host_role", "PLAYER")).upper() == "OBSERVER" else Role.PLAYER
        try:
            if "config_text" in body:
                config = parse_config(str(body["config_text"]))
            elif "preset" in body:
                config = builtin_preset(str(body["preset"]))
            elif service.default_config_text is not None:
                config = parse_config(service.default_config_text)
            else:
                config = builtin_preset("case-study")
        except (ConfigError, KeyError) as exc:
            return JSONResponse({"error": "invalid_config", "detail": str(exc)}, status_code=400)
        issues = validate_config(config)
        if issues:
            return JSONResponse(
                {"error": "invalid_config", "detail": [str(i) for i in issues[:10]]},
                status_code=400,
            )
        if not host_name:
            return JSONResponse({"error": "name_empty"}, status_code=400)
        room, host = service.manager.create_room(host_name, config, role)
        if service.persist_dir:
            room.sink = TelemetrySink(
                service.persist_dir,
                room.room_key,
                now_ms(),
                SinkConfig(endpoint=service.log_sink_url),
            )
        loop = GameLoop(
            room,
            time_scale=service.time_scale,
            between_rounds_seconds=service.between_rounds_seconds,
            persist_dir=service.persist_dir,
        )
        service.loops[room.room_key] = loop
        service.tasks[room.room_key] = asyncio.create_task(loop.run())
        return {
            "room_key": room.room_key,
            "token": host.token,
            "slot": host.slot_id,
            "color": host.color,
            "team_name": room.team_name,
        }

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        try:
            await _serve_connection(service, ws)
        except WebSocketDisconnect:
            pass

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="client")

    return app


async def _serve_connection(service: ServiceState, ws: WebSocket) -> None:
    # The first message binds the connection to a room member.
    first = protocol.decode(await ws.receive_text())
    if first.get("type") != "JOIN":
        await _send_raw(ws, 1, "ERROR", "", {"code": "join_first", "re": first.get("seq", 0)})
        await ws.close()
        return
    room_key = str(first.get("room", ""))
    payload = first.get("payload") or {}
    loop = service.loops.get(room_key)
    try:
        room = service.manager.get(room_key)
        if payload.get("token"):
            room, member = service.manager.reconnect(room_key, str(payload["token"]))
        else:
            role = Role.OBSERVER if str(payload.get("role", "PLAYER")).upper() == "OBSERVER" else Role.PLAYER
            room, member = service.manager.join_room(room_key, str(payload.get("name", "")), role)
    except RoomError as err:
        await _send_raw(ws, 1, "ERROR", room_key, {"code": err.code, "message": str(err),
                                                   "re": first.get("seq", 0)})
        await ws.close()
        return

    member.bind_connection()

    if loop is not None:
        loop.send(
            member,
            "LOBBY_STATE",
            {**loop.lobby_state(), "you": {"slot": member.slot_id, "name": member.name,
                                           "color": member.color, "token": member.token,
                                           "role": member.role.value}},
        )
        if room.game_state is not None and room.session_phase is SessionPhase.IN_GAME:
            loop.send(member, "GAME_SNAPSHOT", loop.snapshot_payload())
        loop.broadcast("LOBBY_STATE", loop.lobby_state())

    writer = asyncio.create_task(_pump_outbox(ws, member))
    try:
        while True:
            message = protocol.decode(await ws.receive_text())
            msg_type = str(message.get("type", ""))
            if msg_type == "JOIN":
                continue  # already bound
            if msg_type not in protocol.INTENT_TYPES:
                if loop is not None:
                    loop.send(member, "ERROR", {"code": "unknown_intent", "message": msg_type,
                                                "re": message.get("seq", 0)})
                continue
            room.intents.put_nowait(
                Intent(
                    member=member,
                    seq=int(message.get("seq", 0)),
                    type=msg_type,
                    payload=message.get("payload") or {},
                )
            )
    finally:
        member.connected = False
        writer.cancel()


async def _pump_outbox(ws: WebSocket, member) -> None:
    while True:
        message = await member.outbox.get()
        await ws.send_text(protocol.encode(message))


async def _send_raw(ws: WebSocket, seq: int, msg_type: str, room: str, payload: dict) -> None:
    await ws.send_text(protocol.encode({"seq": seq, "type": msg_type, "room": room, "payload": payload}))
