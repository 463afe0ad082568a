"""Shared scenario builders for the test suite."""

from __future__ import annotations

from towerlab.config.model import (
    LevelSpec,
    SessionConfig,
    TeamSetup,
    TowerAssignment,
)
from towerlab.sim.types import (
    Archetype,
    Cell,
    CellKind,
    EnemyInstance,
    EnemyVariant,
    GameMode,
    GameState,
    GridMap,
    MoneyModel,
    PathRoute,
    ScoreMode,
    ScoreWeights,
    SellPolicy,
    SpawnScript,
    TowerSpec,
)

COLORS = ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6", "#bcf60c"]


def lane_map(length: int = 10, height: int = 8, lane_y: int = 0) -> GridMap:
    """Straight west-to-east lane on row `lane_y`, base at its east end."""
    width = length + 1
    tiles = [[CellKind.BUILDABLE for _ in range(width)] for _ in range(height)]
    waypoints = [(x, lane_y) for x in range(width)]
    for x, y in waypoints:
        tiles[y][x] = CellKind.PATH
    tiles[lane_y][length] = CellKind.BASE
    return GridMap(
        width=width,
        height=height,
        tiles=tiles,
        routes=[PathRoute("lane", waypoints)],
        base_cell=(length, lane_y),
    )


def basic_tower(
    spec_id: str = "turret",
    archetype: Archetype = Archetype.BASIC,
    cost: int = 100,
    range_: float = 3.0,
    damage: float = 10.0,
    firerate: float = 1.0,
    upgrade_cost: int = 100,
    **effect_params: float,
) -> TowerSpec:
    return TowerSpec(
        spec_id,
        archetype,
        cost=cost,
        range=range_,
        damage=damage,
        firerate=firerate,
        upgrade_cost=upgrade_cost,
        effect_params=dict(effect_params),
    )


def walker(variant_id: str = "walker", health: float = 100.0, speed: float = 1.0,
           points: int = 10, bounty: int = 15) -> EnemyVariant:
    return EnemyVariant(variant_id, max_health=health, speed=speed, points=points, bounty=bounty)


def lane_config(
    towers: list[TowerSpec],
    enemies: list[EnemyVariant] | None = None,
    spawn_entries: list[tuple[str, float]] | None = None,
    length: int = 10,
    height: int = 8,
    lane_y: int = 0,
    slots: dict[str, list[str]] | None = None,
    starting_gold: int = 10_000,
    starting_health: int = 10,
    planning_seconds: float = 0.0,
    interact_during_attack: bool = True,
    money_model: MoneyModel = MoneyModel.SHARED,
    sell_policy: SellPolicy = SellPolicy.ANYONE,
    score: ScoreWeights | None = None,
) -> SessionConfig:
    """One-level tower-defense config on a straight lane."""
    enemies = enemies if enemies is not None else [walker()]
    if slots is None:
        slots = {"p1": [spec.spec_id for spec in towers]}
    team = TeamSetup(
        [
            TowerAssignment(slot_id, list(ids), COLORS[i])
            for i, (slot_id, ids) in enumerate(slots.items())
        ]
    )
    scripts = []
    if spawn_entries:
        scripts.append(SpawnScript("s1", "lane", list(spawn_entries)))
    level = LevelSpec(
        name="lane",
        map=lane_map(length, height, lane_y),
        spawn_scripts=scripts,
        starting_gold=starting_gold,
        starting_health=starting_health,
        planning_seconds=planning_seconds,
    )
    return SessionConfig(
        name="scenario",
        mode=GameMode.TOWER_DEFENSE,
        levels=[level],
        rounds_per_level=1,
        team=team,
        tower_catalog=list(towers),
        enemy_catalog=enemies,
        money_model=money_model,
        interact_during_attack=interact_during_attack,
        sell_policy=sell_policy,
        score=score or ScoreWeights(mode=ScoreMode.LINEAR, w_unspent=1.0, w_points=1.0, w_health=10.0),
    )


def traversal_ticks(
    length: int,
    speed: float,
    slow_at: int | None,
    multiplier: float,
    duration: float,
) -> int:
    """Ticks for a lone enemy to cross a lane, optionally slowed mid-walk."""
    from towerlab.sim import Phase, init_game, tick
    from towerlab.sim.engine import apply_slow

    config = lane_config(
        [basic_tower()], enemies=[walker(speed=speed)], spawn_entries=[("walker", 0.0)],
        length=length, planning_seconds=0.0,
    )
    state = init_game(config, 0, 0)
    ticks = 0
    while state.phase is Phase.ATTACK:
        if slow_at is not None and ticks == slow_at and state.enemies:
            apply_slow(state.enemies[0], multiplier, duration)
        state, _ = tick(state)
        ticks += 1
        assert ticks < 100_000
    return ticks


def inject_enemy(
    state: GameState,
    variant_id: str,
    progress: float,
    route_id: str = "lane",
    health: float | None = None,
) -> EnemyInstance:
    """Drop an enemy straight into the state for targeting-level tests."""
    variant = state.config.enemy_variant(variant_id)
    assert variant is not None
    enemy = EnemyInstance(
        variant_id=variant_id,
        route_id=route_id,
        progress=progress,
        health=health if health is not None else variant.max_health,
        spawn_index=state.next_spawn_index,
    )
    state.next_spawn_index += 1
    state.enemies.append(enemy)
    return enemy
