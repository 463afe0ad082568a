"""Wire schema helpers.

Every message on the socket is one JSON object per line:

    {"seq": n, "type": TYPE, "room": KEY, "payload": {...}}

Client intents: JOIN, SET_TEAM_NAME, CHAT, PLACE, SELL, UPGRADE, READY,
SELECT, PING. Server messages: LOBBY_STATE, GAME_SNAPSHOT, GAME_DELTA,
CHAT_RELAY, ERROR, ROUND_RESULT, LEADERBOARD. Sequence numbers are
per-recipient, strictly increasing without gaps; ERROR and delta replies
carry the triggering intent's seq in payload.re.
"""

from __future__ import annotations

import json
from typing import Any

from towerlab.sim.engine import effective_stats, upgrade_cost_quote
from towerlab.sim.types import (
    MAX_UPGRADE_LEVEL,
    GameState,
    Phase,
    ScoreMode,
    SimEvent,
    Track,
    round_gold,
)

INTENT_TYPES = {
    "JOIN",
    "SET_TEAM_NAME",
    "CHAT",
    "PLACE",
    "SELL",
    "UPGRADE",
    "READY",
    "SELECT",
    "PING",
}
GAME_INTENTS = {"PLACE", "SELL", "UPGRADE", "READY", "SELECT"}


def encode(message: dict) -> str:
    return json.dumps(message, separators=(",", ":"), ensure_ascii=False)


def decode(line: str) -> dict:
    message = json.loads(line)
    if not isinstance(message, dict):
        raise ValueError("message must be a JSON object")
    return message


def event_to_wire(state: GameState, event: SimEvent) -> dict:
    details: dict[str, Any] = {}
    for key, value in event.details.items():
        details[key] = list(value) if isinstance(value, tuple) else value
    if event.kind.value in ("PLACED", "UPGRADED"):
        tower = state.tower_by_id(event.details["tower_id"])
        if tower is not None:
            details["tower"] = _tower_to_wire(state, tower)
    return {"kind": event.kind.value, "tick": event.tick, "details": details}


def state_to_wire(state: GameState) -> dict:
    """Render-ready snapshot of the authoritative state."""
    return {
        "level": state.level_index,
        "round": state.round_index,
        "mode": state.mode.value,
        "phase": state.phase.value,
        "tick": state.tick,
        "planning_remaining": round(state.planning_remaining, 3),
        "money": dict(state.money),
        "health": state.health,
        "kill_points": state.kill_points,
        "outcome": state.outcome.value,
        "ready": dict(state.ready_flags),
        "towers": [_tower_to_wire(state, t) for t in state.towers],
        "traps": [
            {"cell": list(t.cell), "charges": t.charges, "owner_tower": t.owner_tower_id}
            for t in state.traps
        ],
        "enemies": [
            {
                "spawn_index": e.spawn_index,
                "variant": e.variant_id,
                "route": e.route_id,
                "progress": round(e.progress, 4),
                "health": round(e.health, 3),
                "effects": [eff.kind.value for eff in e.active_effects if eff.remaining > 0],
            }
            for e in state.enemies
        ],
    }


def _tower_to_wire(state: GameState, t) -> dict:
    rng, dmg, rate = effective_stats(state, t)
    rate_planning = state.phase is Phase.PLANNING
    refund_rate = (
        state.config.refund_rate_planning if rate_planning else state.config.refund_rate_attack
    )
    return {
        "id": t.tower_id,
        "spec": t.spec_id,
        "owner": t.owner,
        "cell": list(t.cell),
        "levels": {track.value: lv for track, lv in t.levels.items()},
        # Authority stays server-side: clients render these, never derive them.
        "effective": {"range": round(rng, 4), "damage": round(dmg, 4), "firerate": round(rate, 4)},
        "upgrade_costs": {
            track.value: (
                upgrade_cost_quote(state, t, track)
                if t.levels[track] < MAX_UPGRADE_LEVEL
                else None
            )
            for track in Track
        },
        "sell_refund": round_gold(refund_rate * t.spent_total),
    }


def sync_to_wire(state: GameState) -> dict:
    """Compact 10 Hz authoritative update shipped inside GAME_DELTA."""
    weights = state.config.score
    if weights.mode is ScoreMode.LINEAR:
        running = (
            weights.w_unspent * state.total_money
            + weights.w_points * state.kill_points
            + weights.w_health * state.health
        )
    else:
        running = None
    return {
        "tick": state.tick,
        "phase": state.phase.value,
        "money": dict(state.money),
        "health": state.health,
        "kill_points": state.kill_points,
        "running_score": running,
        "enemies": [
            {
                "spawn_index": e.spawn_index,
                "variant": e.variant_id,
                "route": e.route_id,
                "progress": round(e.progress, 4),
                "health": round(e.health, 3),
                "effects": [eff.kind.value for eff in e.active_effects if eff.remaining > 0],
            }
            for e in state.enemies
        ],
    }


def level_info_to_wire(state: GameState) -> dict:
    """Static description of the current level for client rendering."""
    config = state.config
    level = config.levels[state.level_index]
    grid = level.map
    from towerlab.config.document import render_grid

    visible_names = config.visibility.tower_names
    visible_descriptions = config.visibility.tower_descriptions
    catalog = []
    for spec in config.tower_catalog:
        entry: dict[str, Any] = {
            "id": spec.spec_id,
            "archetype": spec.archetype.value,
            "cost": spec.cost,
            "range": spec.range,
            "damage": spec.damage,
            "firerate": spec.firerate,
        }
        if visible_names:
            entry["name"] = spec.display_name
        if visible_descriptions:
            entry["description"] = spec.description
        catalog.append(entry)
    previews = {}
    if config.visibility.spawn_preview:
        previews = {
            script.script_id: [variant for variant, _ in script.entries]
            for script in level.spawn_scripts
        }
    return {
        "mode": config.mode.value,
        "level": state.level_index,
        "round": state.round_index,
        "level_name": level.name,
        "planning_seconds": level.planning_seconds,
        "interact_during_attack": config.interact_during_attack,
        "map": {
            "width": grid.width,
            "height": grid.height,
            "grid": render_grid(grid).splitlines(),
            "routes": [
                {"id": r.route_id, "waypoints": [[x, y] for x, y in r.waypoints]}
                for r in grid.routes
            ],
            "base": list(grid.base_cell),
        },
        "catalog": catalog,
        "enemy_catalog": [
            {
                "id": v.variant_id,
                "health": v.max_health,
                "speed": v.speed,
                "points": v.points,
                "bounty": v.bounty,
            }
            for v in config.enemy_catalog
        ],
        "assignments": {slot.slot_id: list(slot.tower_ids) for slot in config.team.slots},
        "colors": {slot.slot_id: slot.color for slot in config.team.slots},
        "visibility": {
            "tower_names": config.visibility.tower_names,
            "tower_descriptions": config.visibility.tower_descriptions,
            "coordinate_grid": config.visibility.coordinate_grid,
            "spawn_preview": config.visibility.spawn_preview,
        },
        "comm": {
            "text_chat": config.comm.text_chat,
            "voice": config.comm.voice,
            "push_to_talk": config.comm.push_to_talk,
        },
        "spawn_previews": previews,
        "score_mode": config.score.mode.value,
    }
