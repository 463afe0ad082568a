"""Game rules: placement, upgrades, combat, economy, phases and scoring.

All functions are deterministic and free of I/O. State objects are advanced
in place and returned together with the events the transition produced;
rejected commands raise before any mutation, leaving the state untouched.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

from towerlab.sim.types import (
    ATTACKING_ARCHETYPES,
    MAX_UPGRADE_LEVEL,
    TICK_DT,
    TRACK_MULTIPLIER,
    Archetype,
    Cell,
    Command,
    CommandKind,
    EffectKind,
    EffectState,
    EnemyInstance,
    EventKind,
    GameMode,
    GameState,
    MoneyModel,
    Outcome,
    PendingSpawn,
    Phase,
    ScoreMode,
    ScoreWeights,
    SellPolicy,
    SimEvent,
    TowerInstance,
    TowerSpec,
    Track,
    TrapInstance,
    distance,
    effect_param,
    round_gold,
)

if TYPE_CHECKING:
    from towerlab.config.model import SessionConfig

EPS = 1e-9

SHARED_POOL = "team"


class CommandRejected(Exception):
    """A player intent the rules refuse; carries a stable machine code."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(message or code)
        self.code = code


class StateError(ValueError):
    """An operation was invoked against the wrong phase or mode."""


def _reject(code: str, message: str = "") -> CommandRejected:
    return CommandRejected(code, message)


# ---------------------------------------------------------------------------
# Round setup
# ---------------------------------------------------------------------------


def init_game(config: SessionConfig, level_index: int, round_index: int) -> GameState:
    """Fresh round state for one (level, round) of a validated config."""
    if not 0 <= level_index < len(config.levels):
        raise IndexError(f"level index {level_index} out of range")
    if not 0 <= round_index < config.rounds_per_level:
        raise IndexError(f"round index {round_index} out of range")

    level = config.levels[level_index]
    pools = _initial_pools(config, level.starting_gold)

    planning_ticks = max(0, math.ceil(level.planning_seconds / TICK_DT - EPS))
    state = GameState(
        config=config,
        level_index=level_index,
        round_index=round_index,
        mode=config.mode,
        phase=Phase.PLANNING,
        tick=0,
        planning_remaining=planning_ticks * TICK_DT,
        attack_start_tick=-1,
        money=pools,
        health=level.starting_health,
        towers=[],
        traps=[],
        enemies=[],
        pending_spawns=_build_spawn_queue(level),
        spawn_cursor=0,
        kill_points=0,
        ready_flags={slot: False for slot in config.slot_ids},
        outcome=Outcome.ONGOING,
        next_tower_id=1,
        next_spawn_index=0,
        planning_end_tick=planning_ticks,
    )

    for pre in level.preplaced_towers:
        spec = config.tower_spec(pre.spec_id)
        if spec is None:
            raise KeyError(f"preplaced tower references unknown spec {pre.spec_id!r}")
        _add_tower(state, spec, owner="", cell=pre.cell, cost=spec.cost)

    if planning_ticks == 0 and state.mode is GameMode.TOWER_DEFENSE:
        state.phase = Phase.ATTACK
        state.attack_start_tick = 0
    return state


def _initial_pools(config: SessionConfig, starting_gold: int) -> dict[str, int]:
    if config.money_model is MoneyModel.SHARED:
        return {SHARED_POOL: starting_gold}
    slots = config.slot_ids
    share, remainder = divmod(starting_gold, len(slots))
    return {slot: share + (1 if i < remainder else 0) for i, slot in enumerate(slots)}


def _build_spawn_queue(level) -> list[PendingSpawn]:
    queue: list[tuple[int, int, int, PendingSpawn]] = []
    for si, script in enumerate(level.spawn_scripts):
        for ei, (variant_id, spawn_time) in enumerate(script.entries):
            spawn_tick = max(0, math.ceil(spawn_time / TICK_DT - EPS))
            queue.append(
                (
                    spawn_tick,
                    si,
                    ei,
                    PendingSpawn(
                        spawn_tick=spawn_tick,
                        script_id=script.script_id,
                        route_id=script.route_id,
                        variant_id=variant_id,
                    ),
                )
            )
    queue.sort(key=lambda item: (item[0], item[1], item[2]))
    return [item[3] for item in queue]


def _add_tower(state: GameState, spec: TowerSpec, owner: str, cell: Cell, cost: int) -> TowerInstance:
    tower = TowerInstance(
        tower_id=state.next_tower_id,
        spec_id=spec.spec_id,
        owner=owner,
        cell=cell,
        spent_total=cost,
    )
    state.next_tower_id += 1
    state.towers.append(tower)
    _bump_towers_rev(state)
    if spec.archetype is Archetype.OBSTACLE:
        trap_cell = _nearest_free_path_cell(state, cell, spec.range)
        if trap_cell is not None:
            charges = int(effect_param(spec, "trap_charges"))
            state.traps.append(
                TrapInstance(
                    owner_tower_id=tower.tower_id,
                    cell=trap_cell,
                    charges=charges,
                    max_charges=charges,
                    recharge_remaining=effect_param(spec, "trap_recharge"),
                )
            )
    return tower


def _nearest_free_path_cell(state: GameState, cell: Cell, radius: float) -> Cell | None:
    grid = state.config.levels[state.level_index].map
    best: tuple[float, int, int] | None = None
    for y in range(grid.height):
        for x in range(grid.width):
            if grid.tiles[y][x].name != "PATH":
                continue
            if state.trap_at((x, y)) is not None:
                continue
            d = distance((float(cell[0]), float(cell[1])), (float(x), float(y)))
            if d <= radius + EPS:
                key = (d, y, x)
                if best is None or key < best:
                    best = key
    if best is None:
        return None
    return (best[2], best[1])


# ---------------------------------------------------------------------------
# Money pools
# ---------------------------------------------------------------------------


def _pool_of(state: GameState, slot: str) -> str:
    if state.config.money_model is MoneyModel.SHARED:
        return SHARED_POOL
    return slot


def _credit_bounty(state: GameState, amount: int) -> None:
    if state.config.money_model is MoneyModel.SHARED:
        state.money[SHARED_POOL] += amount
        return
    # Equal split; remainder goes to the earliest slots in join order.
    slots = state.config.slot_ids
    share, remainder = divmod(amount, len(slots))
    for i, slot in enumerate(slots):
        state.money[slot] += share + (1 if i < remainder else 0)


# ---------------------------------------------------------------------------
# Derived stats
# ---------------------------------------------------------------------------


def _spec_of(state: GameState, tower: TowerInstance) -> TowerSpec:
    spec = state.config.tower_spec(tower.spec_id)
    assert spec is not None, tower.spec_id
    return spec


def _towers_rev(state: GameState) -> int:
    return state.__dict__.get("_rev", 0)


def _bump_towers_rev(state: GameState) -> None:
    # Invalidates the aura cache; bumped on every place/sell/upgrade.
    state.__dict__["_rev"] = state.__dict__.get("_rev", 0) + 1


def _aura_radius(state: GameState, tower: TowerInstance) -> float:
    """Reach of a passive aura (SUPPORT buff, DISCOUNT pricing).

    Uses the tower's own base range with its RANGE upgrades only; support
    buffs never extend other auras, which keeps stats order-independent.
    """
    spec = _spec_of(state, tower)
    return spec.range * TRACK_MULTIPLIER[Track.RANGE] ** tower.levels[Track.RANGE]


def _support_buff(state: GameState, tower: TowerInstance) -> float:
    rev = _towers_rev(state)
    cache = state.__dict__.get("_buffs")
    if cache is None or cache[0] != rev:
        cache = (rev, {})
        state.__dict__["_buffs"] = cache
    buffs = cache[1]
    if tower.tower_id in buffs:
        return buffs[tower.tower_id]

    best = 0.0
    pos = (float(tower.cell[0]), float(tower.cell[1]))
    for other in state.towers:
        if other.tower_id == tower.tower_id:
            continue
        spec = _spec_of(state, other)
        if spec.archetype is not Archetype.SUPPORT:
            continue
        radius = _aura_radius(state, other)
        if distance(pos, (float(other.cell[0]), float(other.cell[1]))) <= radius + EPS:
            best = max(best, effect_param(spec, "support_buff"))
    buffs[tower.tower_id] = best
    return best


def effective_stats(state: GameState, tower: TowerInstance) -> tuple[float, float, float]:
    """(range, damage, firerate) after upgrades and any support buff."""
    spec = _spec_of(state, tower)
    rng = spec.range * TRACK_MULTIPLIER[Track.RANGE] ** tower.levels[Track.RANGE]
    dmg = spec.damage * TRACK_MULTIPLIER[Track.DAMAGE] ** tower.levels[Track.DAMAGE]
    rate = spec.firerate * TRACK_MULTIPLIER[Track.FIRERATE] ** tower.levels[Track.FIRERATE]
    buff = 1.0 + _support_buff(state, tower)
    return rng * buff, dmg * buff, rate * buff


def _discount_multiplier(state: GameState, tower: TowerInstance) -> float:
    """Best (lowest) single upgrade-cost multiplier; discounts never stack."""
    best = 1.0
    pos = (float(tower.cell[0]), float(tower.cell[1]))
    for other in state.towers:
        if other.tower_id == tower.tower_id:
            continue
        spec = _spec_of(state, other)
        if spec.archetype is not Archetype.DISCOUNT:
            continue
        radius = _aura_radius(state, other)
        if distance(pos, (float(other.cell[0]), float(other.cell[1]))) <= radius + EPS:
            best = min(best, effect_param(spec, "discount_multiplier"))
    return best


def upgrade_cost_quote(state: GameState, tower: TowerInstance, track: Track) -> int:
    """Gold required for the tower's next level on `track`, discounts applied."""
    spec = _spec_of(state, tower)
    level = tower.levels[track]
    return round_gold(spec.upgrade_cost * (2**level) * _discount_multiplier(state, tower))


def _current_speed(state: GameState, enemy: EnemyInstance) -> float:
    variant = state.config.enemy_variant(enemy.variant_id)
    assert variant is not None, enemy.variant_id
    speed = variant.speed
    slow = enemy.effect(EffectKind.SLOW)
    if slow is not None and slow.remaining > EPS:
        speed *= slow.magnitude
    fear = enemy.effect(EffectKind.FEAR)
    if fear is not None and fear.remaining > EPS:
        speed *= fear.magnitude
    return speed


def _enemy_position(state: GameState, enemy: EnemyInstance) -> tuple[float, float]:
    cache = state.__dict__.get("_positions")
    if cache is not None and cache[0] == state.tick:
        pos = cache[1].get(enemy.spawn_index)
        if pos is not None:
            return pos
    grid = state.config.levels[state.level_index].map
    return grid.route(enemy.route_id).position_at(enemy.progress)


# ---------------------------------------------------------------------------
# Targeting
# ---------------------------------------------------------------------------


def select_target(state: GameState, tower: TowerInstance) -> EnemyInstance | None:
    """Furthest-progress living enemy in range; ties go to the oldest spawn.

    MAP towers ignore range and consider every living enemy.
    """
    spec = _spec_of(state, tower)
    if spec.archetype not in ATTACKING_ARCHETYPES:
        raise StateError(f"{spec.archetype.value} towers do not acquire targets")
    if spec.archetype is Archetype.MAP:
        candidates = [e for e in state.enemies if e.health > 0]
    else:
        rng, _, _ = effective_stats(state, tower)
        pos = (float(tower.cell[0]), float(tower.cell[1]))
        candidates = [
            e
            for e in state.enemies
            if e.health > 0 and distance(pos, _enemy_position(state, e)) <= rng + EPS
        ]
    if not candidates:
        return None
    return max(candidates, key=lambda e: (e.progress, -e.spawn_index))


def _ray_hits(
    state: GameState,
    origin: tuple[float, float],
    direction: tuple[float, float],
    max_dist: float,
    halfwidth: float,
) -> list[tuple[float, EnemyInstance]]:
    """Living enemies near the ray, as (distance along ray, enemy) pairs."""
    dx, dy = direction
    norm = math.hypot(dx, dy)
    if norm < EPS:
        return []
    dx, dy = dx / norm, dy / norm
    hits = []
    for enemy in state.enemies:
        if enemy.health <= 0:
            continue
        ex, ey = _enemy_position(state, enemy)
        rx, ry = ex - origin[0], ey - origin[1]
        along = rx * dx + ry * dy
        if along < -EPS:
            continue
        perp = abs(rx * dy - ry * dx)
        if perp > halfwidth + EPS:
            continue
        if math.hypot(rx, ry) > max_dist + EPS:
            continue
        hits.append((along, enemy))
    return hits


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def apply_command(state: GameState, cmd: Command) -> tuple[GameState, list[SimEvent]]:
    """Validate and apply one player intent; raises CommandRejected otherwise."""
    if cmd.issuer not in state.ready_flags:
        raise _reject("unknown_player", f"no slot {cmd.issuer!r}")
    _check_phase(state, cmd)

    if cmd.kind is CommandKind.PLACE:
        return _cmd_place(state, cmd)
    if cmd.kind is CommandKind.SELL:
        return _cmd_sell(state, cmd)
    if cmd.kind is CommandKind.UPGRADE:
        return _cmd_upgrade(state, cmd)
    if cmd.kind is CommandKind.READY:
        return _cmd_ready(state, cmd)
    if cmd.kind is CommandKind.SELECT:
        return _cmd_select(state, cmd)
    raise _reject("unknown_command", str(cmd.kind))


def _check_phase(state: GameState, cmd: Command) -> None:
    if state.phase is Phase.ENDED:
        raise _reject("phase_violation", "round already ended")
    if cmd.kind is CommandKind.READY:
        if state.phase is not Phase.PLANNING:
            raise _reject("phase_violation", "READY only during planning")
        return
    if cmd.kind is CommandKind.SELECT:
        if state.mode is not GameMode.OBJECT_SELECTION:
            raise _reject("phase_violation", "SELECT requires selection mode")
        if state.phase is not Phase.PLANNING:
            raise _reject("phase_violation", "SELECT only during planning")
        return
    # PLACE / SELL / UPGRADE
    if state.phase is Phase.ATTACK and not state.config.interact_during_attack:
        raise _reject("phase_violation", "interaction disabled during attack")


def _require_cell(state: GameState, cmd: Command) -> Cell:
    if cmd.cell is None:
        raise _reject("missing_field", f"{cmd.kind.value} requires a cell")
    grid = state.config.levels[state.level_index].map
    if not grid.in_bounds(cmd.cell):
        raise _reject("out_of_bounds", f"cell {cmd.cell} outside map")
    return cmd.cell


def _cmd_place(state: GameState, cmd: Command) -> tuple[GameState, list[SimEvent]]:
    if cmd.spec_id is None:
        raise _reject("missing_field", "PLACE requires a tower type")
    spec = state.config.tower_spec(cmd.spec_id)
    if spec is None:
        raise _reject("unknown_tower", cmd.spec_id)
    assignment = state.config.team.assignment(cmd.issuer)
    if assignment is None or spec.spec_id not in assignment.tower_ids:
        raise _reject("tower_not_assigned", f"{cmd.issuer} cannot build {spec.spec_id}")
    cell = _require_cell(state, cmd)
    grid = state.config.levels[state.level_index].map
    if grid.kind_at(cell).name != "BUILDABLE":
        raise _reject("cell_not_buildable", f"{cell} is {grid.kind_at(cell).value}")
    if state.tower_at(cell) is not None:
        raise _reject("cell_occupied", str(cell))
    if spec.archetype is Archetype.OBSTACLE:
        if _nearest_free_path_cell(state, cell, spec.range) is None:
            raise _reject("no_path_in_range", f"no free path cell within {spec.range}")
    pool = _pool_of(state, cmd.issuer)
    if state.money[pool] < spec.cost:
        raise _reject("insufficient_funds", f"{spec.spec_id} costs {spec.cost}")

    state.money[pool] -= spec.cost
    tower = _add_tower(state, spec, owner=cmd.issuer, cell=cell, cost=spec.cost)
    details: dict[str, object] = {
        "tower_id": tower.tower_id,
        "spec_id": spec.spec_id,
        "owner": cmd.issuer,
        "cell": cell,
        "cost": spec.cost,
    }
    trap = next((t for t in state.traps if t.owner_tower_id == tower.tower_id), None)
    if trap is not None:
        details["trap_cell"] = trap.cell
    return state, [SimEvent(EventKind.PLACED, state.tick, details)]


def _cmd_sell(state: GameState, cmd: Command) -> tuple[GameState, list[SimEvent]]:
    cell = _require_cell(state, cmd)
    tower = state.tower_at(cell)
    if tower is None:
        raise _reject("no_tower_at_cell", str(cell))
    if (
        state.config.sell_policy is SellPolicy.OWNER_ONLY
        and tower.owner
        and tower.owner != cmd.issuer
    ):
        raise _reject("not_tower_owner", f"{cell} belongs to {tower.owner}")

    rate = (
        state.config.refund_rate_planning
        if state.phase is Phase.PLANNING
        else state.config.refund_rate_attack
    )
    refund = round_gold(rate * tower.spent_total)
    pool = _pool_of(state, tower.owner or cmd.issuer)
    state.money[pool] += refund
    state.towers.remove(tower)
    state.traps = [t for t in state.traps if t.owner_tower_id != tower.tower_id]
    _bump_towers_rev(state)
    details = {
        "tower_id": tower.tower_id,
        "spec_id": tower.spec_id,
        "owner": tower.owner,
        "by": cmd.issuer,
        "cell": cell,
        "refund": refund,
    }
    return state, [SimEvent(EventKind.SOLD, state.tick, details)]


def _cmd_upgrade(state: GameState, cmd: Command) -> tuple[GameState, list[SimEvent]]:
    cell = _require_cell(state, cmd)
    tower = state.tower_at(cell)
    if tower is None:
        raise _reject("no_tower_at_cell", str(cell))
    if cmd.track is None:
        raise _reject("unknown_track", "UPGRADE requires a track")
    track = cmd.track
    if tower.levels[track] >= MAX_UPGRADE_LEVEL:
        raise _reject("max_upgrade_level", f"{track.value} already at max")
    cost = upgrade_cost_quote(state, tower, track)
    pool = _pool_of(state, cmd.issuer)
    if state.money[pool] < cost:
        raise _reject("insufficient_funds", f"upgrade costs {cost}")

    state.money[pool] -= cost
    tower.levels[track] += 1
    tower.spent_total += cost
    _bump_towers_rev(state)
    details = {
        "tower_id": tower.tower_id,
        "spec_id": tower.spec_id,
        "by": cmd.issuer,
        "cell": cell,
        "track": track.value,
        "level": tower.levels[track],
        "cost": cost,
    }
    return state, [SimEvent(EventKind.UPGRADED, state.tick, details)]


def _cmd_ready(state: GameState, cmd: Command) -> tuple[GameState, list[SimEvent]]:
    # Toggling lets a player unlatch until the team is unanimous.
    state.ready_flags[cmd.issuer] = not state.ready_flags[cmd.issuer]
    events: list[SimEvent] = []
    if all(state.ready_flags.values()):
        _finish_planning(state, events)
    return state, events


def _cmd_select(state: GameState, cmd: Command) -> tuple[GameState, list[SimEvent]]:
    cell = _require_cell(state, cmd)
    selected = state.tower_at(cell)
    if selected is None:
        raise _reject("no_tower_at_cell", str(cell))
    level = state.config.levels[state.level_index]
    if level.selection_target is None:
        raise _reject("mode_violation", "level has no selection target")
    target = state.tower_at(level.selection_target)
    if target is None:
        raise _reject("mode_violation", "selection target tower missing")
    events: list[SimEvent] = []
    evaluate_selection(state, selected.tower_id, target.tower_id, _events=events)
    return state, events


# ---------------------------------------------------------------------------
# Phase progression
# ---------------------------------------------------------------------------


def advance_planning(state: GameState) -> tuple[GameState, list[SimEvent]]:
    """One planning-phase tick; fires the phase transition on expiry."""
    if state.phase is not Phase.PLANNING:
        raise StateError("advance_planning outside PLANNING")
    state.tick += 1
    state.planning_remaining = max(0.0, (state.planning_end_tick - state.tick) * TICK_DT)
    events: list[SimEvent] = []
    if state.tick >= state.planning_end_tick:
        _finish_planning(state, events)
    return state, events


def _finish_planning(state: GameState, events: list[SimEvent]) -> None:
    if state.mode is GameMode.TOWER_DEFENSE:
        state.phase = Phase.ATTACK
        state.attack_start_tick = state.tick
        events.append(
            SimEvent(EventKind.PHASE_CHANGED, state.tick, {"phase": Phase.ATTACK.value})
        )
        return
    if state.mode is GameMode.OBJECT_SELECTION:
        # Planning ended without a selection: the round is failed.
        state.selection_result = state.selection_result or "incorrect"
        _end_round(state, Outcome.LOSE, events)
        return
    # OBJECT_MANIPULATION: grade the board against the reference layout.
    level = state.config.levels[state.level_index]
    score = evaluate_layout(state, level.reference_layout)
    state.layout_score = score
    _end_round(state, Outcome.WIN if score >= 1.0 - EPS else Outcome.LOSE, events)


def _end_round(state: GameState, outcome: Outcome, events: list[SimEvent]) -> None:
    state.outcome = outcome
    state.phase = Phase.ENDED
    events.append(
        SimEvent(EventKind.PHASE_CHANGED, state.tick, {"phase": Phase.ENDED.value})
    )
    details: dict[str, object] = {
        "outcome": outcome.value,
        "level": state.level_index,
        "round": state.round_index,
        "unspent": state.total_money,
        "points": state.kill_points,
        "health": state.health,
    }
    if state.selection_result:
        details["selection"] = state.selection_result
    if state.layout_score is not None:
        details["layout_score"] = state.layout_score
    events.append(SimEvent(EventKind.ROUND_ENDED, state.tick, details))


# ---------------------------------------------------------------------------
# The attack tick
# ---------------------------------------------------------------------------


def tick(state: GameState) -> tuple[GameState, list[SimEvent]]:
    """Advance one fixed timestep of the attack phase.

    Pipeline order per tick: spawn, effect decay, movement (with trap
    crossings), poison damage, tower fire, deaths, leaks, end check.
    """
    if state.phase is not Phase.ATTACK:
        raise StateError("tick outside ATTACK")
    state.tick += 1
    events: list[SimEvent] = []
    elapsed_ticks = state.tick - state.attack_start_tick

    _step_spawn(state, elapsed_ticks, events)
    _step_decay(state)
    _step_move(state)
    _step_poison(state)
    _step_fire(state, events)
    _step_deaths(state, events)
    _step_leaks(state, events)
    _step_end_check(state, events)
    return state, events


def _step_spawn(state: GameState, elapsed_ticks: int, events: list[SimEvent]) -> None:
    while (
        state.spawn_cursor < len(state.pending_spawns)
        and state.pending_spawns[state.spawn_cursor].spawn_tick <= elapsed_ticks
    ):
        pending = state.pending_spawns[state.spawn_cursor]
        state.spawn_cursor += 1
        variant = state.config.enemy_variant(pending.variant_id)
        assert variant is not None, pending.variant_id
        enemy = EnemyInstance(
            variant_id=pending.variant_id,
            route_id=pending.route_id,
            progress=0.0,
            health=variant.max_health,
            spawn_index=state.next_spawn_index,
        )
        state.next_spawn_index += 1
        state.enemies.append(enemy)
        events.append(
            SimEvent(
                EventKind.SPAWNED,
                state.tick,
                {
                    "spawn_index": enemy.spawn_index,
                    "variant_id": enemy.variant_id,
                    "route_id": enemy.route_id,
                    "script_id": pending.script_id,
                },
            )
        )


def _step_decay(state: GameState) -> None:
    for enemy in state.enemies:
        kept: list[EffectState] = []
        for eff in enemy.active_effects:
            if eff.remaining > 0:
                eff.remaining = max(0.0, eff.remaining - TICK_DT)
            elif eff.kind is EffectKind.FEAR:
                eff.immunity_remaining = max(0.0, eff.immunity_remaining - TICK_DT)
            if eff.remaining > 0 or (
                eff.kind is EffectKind.FEAR and eff.immunity_remaining > 0
            ):
                kept.append(eff)
        enemy.active_effects = kept
    for trap in state.traps:
        trap.recharge_remaining -= TICK_DT
        if trap.recharge_remaining <= 0:
            trap.charges = trap.max_charges
            owner = state.tower_by_id(trap.owner_tower_id)
            period = 10.0
            if owner is not None:
                period = effect_param(_spec_of(state, owner), "trap_recharge")
            trap.recharge_remaining += period


def _step_move(state: GameState) -> None:
    grid = state.config.levels[state.level_index].map
    positions: dict[int, tuple[float, float]] = {}
    for enemy in state.enemies:
        route = grid.route(enemy.route_id)
        speed = _current_speed(state, enemy)
        fear = enemy.effect(EffectKind.FEAR)
        feared = fear is not None and fear.remaining > EPS
        delta = speed * TICK_DT * (-1.0 if feared else 1.0)
        old = enemy.progress
        enemy.progress = min(float(route.total_length), max(0.0, old + delta))
        if state.traps:
            _apply_trap_crossings(state, route, enemy, old, enemy.progress)
        positions[enemy.spawn_index] = route.position_at(enemy.progress)
    # Positions are fixed for the rest of the tick; later steps reuse them.
    state.__dict__["_positions"] = (state.tick, positions)


def _apply_trap_crossings(state, route, enemy, old: float, new: float) -> None:
    old_idx = route.cell_index(old)
    new_idx = route.cell_index(new)
    if new_idx == old_idx:
        return
    step = 1 if new_idx > old_idx else -1
    for idx in range(old_idx + step, new_idx + step, step):
        trap = state.trap_at(route.waypoints[idx])
        if trap is None or trap.charges <= 0:
            continue
        owner = state.tower_by_id(trap.owner_tower_id)
        if owner is None:
            continue
        _, dmg, _ = effective_stats(state, owner)
        enemy.health -= dmg
        trap.charges -= 1


def _step_poison(state: GameState) -> None:
    for enemy in state.enemies:
        poison = enemy.effect(EffectKind.POISON)
        if poison is not None and poison.remaining > EPS:
            enemy.health -= poison.magnitude * TICK_DT


def _step_fire(state: GameState, events: list[SimEvent]) -> None:
    for tower in state.towers:
        spec = _spec_of(state, tower)
        if spec.archetype not in ATTACKING_ARCHETYPES:
            continue
        tower.cooldown_remaining -= TICK_DT
        if tower.cooldown_remaining > EPS:
            continue
        rng, dmg, rate = effective_stats(state, tower)
        if _fire(state, tower, spec, rng, dmg):
            # Accumulate so the firing cadence tracks 1/rate, not tick grid.
            tower.cooldown_remaining += 1.0 / rate
        else:
            tower.cooldown_remaining = 0.0


def _fire(state: GameState, tower: TowerInstance, spec: TowerSpec, rng: float, dmg: float) -> bool:
    arch = spec.archetype
    pos = (float(tower.cell[0]), float(tower.cell[1]))

    if arch is Archetype.MAP:
        living = [e for e in state.enemies if e.health > 0]
        for enemy in living:
            enemy.health -= dmg
        return bool(living)

    if arch is Archetype.MULTISHOT:
        halfwidth = effect_param(spec, "ray_halfwidth")
        fired = False
        for direction in ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)):
            hits = _ray_hits(state, pos, direction, rng, halfwidth)
            if not hits:
                continue
            first = min(hits, key=lambda h: (h[0], h[1].spawn_index))[1]
            first.health -= dmg
            fired = True
        return fired

    target = select_target(state, tower)
    if target is None:
        return False

    if arch is Archetype.PIERCING:
        tpos = _enemy_position(state, target)
        direction = (tpos[0] - pos[0], tpos[1] - pos[1])
        if abs(direction[0]) < EPS and abs(direction[1]) < EPS:
            target.health -= dmg
            return True
        halfwidth = effect_param(spec, "ray_halfwidth")
        for _, enemy in _ray_hits(state, pos, direction, rng, halfwidth):
            enemy.health -= dmg
        return True

    if arch is Archetype.SPLASH:
        radius = effect_param(spec, "splash_radius")
        center = _enemy_position(state, target)
        for enemy in state.enemies:
            if enemy.health <= 0:
                continue
            if distance(center, _enemy_position(state, enemy)) <= radius + EPS:
                enemy.health -= dmg
        return True

    if arch is Archetype.SNIPER:
        ref = effect_param(spec, "reference_speed")
        cap = effect_param(spec, "speed_damage_cap")
        factor = min(cap, max(1.0, _current_speed(state, target) / ref))
        target.health -= dmg * factor
        return True

    target.health -= dmg
    if arch is Archetype.POISON:
        _merge_effect(
            target,
            EffectKind.POISON,
            magnitude=effect_param(spec, "poison_dps"),
            duration=effect_param(spec, "poison_duration"),
            stronger=lambda new, cur: new > cur,
        )
    elif arch is Archetype.SLOW:
        _merge_effect(
            target,
            EffectKind.SLOW,
            magnitude=effect_param(spec, "slow_multiplier"),
            duration=effect_param(spec, "slow_duration"),
            stronger=lambda new, cur: new < cur,
        )
    elif arch is Archetype.FEAR:
        apply_fear(
            target,
            magnitude=effect_param(spec, "fear_multiplier"),
            duration=effect_param(spec, "fear_duration"),
            immunity=effect_param(spec, "fear_immunity"),
        )
    return True


def _merge_effect(enemy: EnemyInstance, kind: EffectKind, magnitude: float, duration: float, stronger) -> None:
    current = enemy.effect(kind)
    if current is None or current.remaining <= EPS:
        if current is not None:
            enemy.active_effects.remove(current)
        enemy.active_effects.append(EffectState(kind, magnitude, duration))
        return
    if stronger(magnitude, current.magnitude):
        current.magnitude = magnitude
        current.remaining = duration
    elif magnitude == current.magnitude:
        current.remaining = max(current.remaining, duration)


def apply_fear(enemy: EnemyInstance, magnitude: float, duration: float, immunity: float) -> bool:
    """Fear the enemy unless a fear effect or its immunity window is active."""
    if enemy.effect(EffectKind.FEAR) is not None:
        return False
    enemy.active_effects.append(
        EffectState(EffectKind.FEAR, magnitude, duration, immunity_remaining=immunity)
    )
    return True


def apply_slow(enemy: EnemyInstance, multiplier: float, duration: float) -> None:
    """Strongest-wins slow with duration refresh (exposed for scenario tests)."""
    _merge_effect(
        enemy,
        EffectKind.SLOW,
        magnitude=multiplier,
        duration=duration,
        stronger=lambda new, cur: new < cur,
    )


def _step_deaths(state: GameState, events: list[SimEvent]) -> None:
    survivors: list[EnemyInstance] = []
    for enemy in state.enemies:
        if enemy.health > 0:
            survivors.append(enemy)
            continue
        variant = state.config.enemy_variant(enemy.variant_id)
        assert variant is not None
        _credit_bounty(state, variant.bounty)
        state.kill_points += variant.points
        events.append(
            SimEvent(
                EventKind.KILLED,
                state.tick,
                {
                    "spawn_index": enemy.spawn_index,
                    "variant_id": enemy.variant_id,
                    "bounty": variant.bounty,
                    "points": variant.points,
                },
            )
        )
    state.enemies = survivors


def _step_leaks(state: GameState, events: list[SimEvent]) -> None:
    grid = state.config.levels[state.level_index].map
    remaining: list[EnemyInstance] = []
    for i, enemy in enumerate(state.enemies):
        route = grid.route(enemy.route_id)
        if state.health > 0 and enemy.progress >= route.total_length - EPS:
            state.health -= 1
            events.append(
                SimEvent(
                    EventKind.LEAKED,
                    state.tick,
                    {"spawn_index": enemy.spawn_index, "variant_id": enemy.variant_id},
                )
            )
            if state.health <= 0:
                # Base destroyed: later arrivals stay on the field unleaked.
                remaining.extend(state.enemies[i + 1 :])
                break
        else:
            remaining.append(enemy)
    state.enemies = remaining


def _step_end_check(state: GameState, events: list[SimEvent]) -> None:
    if state.health <= 0:
        _end_round(state, Outcome.LOSE, events)
        return
    if state.spawn_cursor >= len(state.pending_spawns) and not state.enemies:
        _end_round(state, Outcome.WIN, events)


# ---------------------------------------------------------------------------
# Scoring and evaluation
# ---------------------------------------------------------------------------


def compute_score(state: GameState, weights: ScoreWeights) -> float:
    if state.outcome is Outcome.ONGOING:
        raise StateError("score requested while the round is ongoing")
    if weights.mode is ScoreMode.BINARY:
        return 1.0 if state.outcome is Outcome.WIN else 0.0
    return (
        weights.w_unspent * state.total_money
        + weights.w_points * state.kill_points
        + weights.w_health * state.health
    )


def round_score(state: GameState) -> float:
    """Score for round results: layout fraction in manipulation mode,
    otherwise the configured weighting."""
    if state.mode is GameMode.OBJECT_MANIPULATION and state.layout_score is not None:
        return state.layout_score
    return compute_score(state, state.config.score)


def spawn_preview(state: GameState, spawn_point_id: str) -> list[str]:
    level = state.config.levels[state.level_index]
    for script in level.spawn_scripts:
        if script.script_id == spawn_point_id:
            return [variant_id for variant_id, _ in script.entries]
    raise _reject("unknown_spawn_point", spawn_point_id)


def evaluate_selection(
    state: GameState,
    selected_tower_id: int,
    target_tower_id: int,
    _events: list[SimEvent] | None = None,
) -> bool:
    if state.mode is not GameMode.OBJECT_SELECTION:
        raise _reject("mode_violation", "selection scoring requires selection mode")
    if state.tower_by_id(selected_tower_id) is None or state.tower_by_id(target_tower_id) is None:
        raise _reject("mode_violation", "selection ids must reference placed towers")
    correct = selected_tower_id == target_tower_id
    state.selection_result = "correct" if correct else "incorrect"
    events = _events if _events is not None else []
    _end_round(state, Outcome.WIN if correct else Outcome.LOSE, events)
    return correct


def evaluate_layout(state: GameState, reference) -> float:
    if state.mode is not GameMode.OBJECT_MANIPULATION:
        raise _reject("mode_violation", "layout scoring requires manipulation mode")
    if not reference:
        return 1.0
    matched = 0
    for ref in reference:
        tower = state.tower_at(ref.cell)
        if tower is None or tower.spec_id != ref.spec_id:
            continue
        spec = _spec_of(state, tower)
        if spec.orientation == ref.orientation:
            matched += 1
    return matched / len(reference)
