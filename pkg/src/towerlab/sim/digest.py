"""Canonical state serialization for digesting and replay comparison.

Field order is fixed, integers are exact and reals are rendered with six
decimal digits, so two runs that reach the same state produce byte-identical
text and therefore identical digests.
"""

from __future__ import annotations

import hashlib

from towerlab.sim.types import GameState


def _f(value: float) -> str:
    return f"{value:.6f}"


def canonical_state_text(state: GameState) -> str:
    lines = [
        f"phase={state.phase.value}",
        f"tick={state.tick}",
        f"outcome={state.outcome.value}",
        f"level={state.level_index}",
        f"round={state.round_index}",
        f"mode={state.mode.value}",
        f"planning_remaining={_f(state.planning_remaining)}",
        f"attack_start_tick={state.attack_start_tick}",
        f"health={state.health}",
        f"kill_points={state.kill_points}",
        f"spawn_cursor={state.spawn_cursor}",
        f"next_tower_id={state.next_tower_id}",
        f"next_spawn_index={state.next_spawn_index}",
        f"selection={state.selection_result}",
        "layout_score=" + ("" if state.layout_score is None else _f(state.layout_score)),
    ]
    for pool in sorted(state.money):
        lines.append(f"money {pool}={state.money[pool]}")
    for slot in sorted(state.ready_flags):
        lines.append(f"ready {slot}={int(state.ready_flags[slot])}")
    for tower in sorted(state.towers, key=lambda t: t.tower_id):
        levels = ",".join(f"{tr.value}:{lv}" for tr, lv in sorted(tower.levels.items()))
        lines.append(
            f"tower id={tower.tower_id} spec={tower.spec_id} owner={tower.owner}"
            f" cell={tower.cell[0]},{tower.cell[1]} levels={levels}"
            f" cooldown={_f(tower.cooldown_remaining)} spent={tower.spent_total}"
        )
    for trap in sorted(state.traps, key=lambda t: (t.owner_tower_id, t.cell)):
        lines.append(
            f"trap owner={trap.owner_tower_id} cell={trap.cell[0]},{trap.cell[1]}"
            f" charges={trap.charges} recharge={_f(trap.recharge_remaining)}"
        )
    for enemy in sorted(state.enemies, key=lambda e: e.spawn_index):
        effects = ";".join(
            f"{eff.kind.value}:{_f(eff.magnitude)}:{_f(eff.remaining)}:{_f(eff.immunity_remaining)}"
            for eff in enemy.active_effects
        )
        lines.append(
            f"enemy idx={enemy.spawn_index} variant={enemy.variant_id}"
            f" route={enemy.route_id} progress={_f(enemy.progress)}"
            f" health={_f(enemy.health)} effects={effects}"
        )
    return "\n".join(lines) + "\n"


def state_digest(state: GameState) -> str:
    return hashlib.sha256(canonical_state_text(state).encode("utf-8")).hexdigest()
