"""Deterministic fixed-timestep tower-defense state machine."""

from towerlab.sim.types import (
    TICK_RATE,
    TICK_DT,
    Archetype,
    CellKind,
    Command,
    CommandKind,
    EffectKind,
    EffectState,
    EnemyInstance,
    EnemyVariant,
    EventKind,
    GameMode,
    GameState,
    GridMap,
    MoneyModel,
    Outcome,
    PathRoute,
    Phase,
    ScoreMode,
    ScoreWeights,
    SimEvent,
    SpawnScript,
    TowerInstance,
    TowerSpec,
    Track,
    TrapInstance,
)
from towerlab.sim.engine import (
    CommandRejected,
    advance_planning,
    apply_command,
    compute_score,
    effective_stats,
    evaluate_layout,
    evaluate_selection,
    init_game,
    select_target,
    spawn_preview,
    tick,
    upgrade_cost_quote,
)
from towerlab.sim.digest import canonical_state_text, state_digest

__all__ = [
    "TICK_RATE",
    "TICK_DT",
    "Archetype",
    "CellKind",
    "Command",
    "CommandKind",
    "CommandRejected",
    "EffectKind",
    "EffectState",
    "EnemyInstance",
    "EnemyVariant",
    "EventKind",
    "GameMode",
    "GameState",
    "GridMap",
    "MoneyModel",
    "Outcome",
    "PathRoute",
    "Phase",
    "ScoreMode",
    "ScoreWeights",
    "SimEvent",
    "SpawnScript",
    "TowerInstance",
    "TowerSpec",
    "Track",
    "TrapInstance",
    "advance_planning",
    "apply_command",
    "canonical_state_text",
    "compute_score",
    "effective_stats",
    "evaluate_layout",
    "evaluate_selection",
    "init_game",
    "select_target",
    "spawn_preview",
    "state_digest",
    "tick",
    "upgrade_cost_quote",
]
