"""Design-checklist report: maps a config back to the Q1-Q10 answers."""

from __future__ import annotations

from towerlab.config.model import ChecklistAnswers, SessionConfig
from towerlab.sim.types import GameMode, MoneyModel, ScoreMode


def estimated_attack_seconds(config: SessionConfig, level_index: int) -> float:
    """Scripted attack duration: last spawn plus that enemy's full traversal."""
    level = config.levels[level_index]
    longest = 0.0
    for script in level.spawn_scripts:
        route = level.map.route(script.route_id)
        for variant_id, seconds in script.entries:
            variant = config.enemy_variant(variant_id)
            if variant is None or variant.speed <= 0:
                continue
            longest = max(longest, seconds + route.total_length / variant.speed)
    return longest


def _q1(config: SessionConfig) -> str:
    if config.mode is GameMode.OBJECT_SELECTION:
        return "binary: was the correct object selected"
    if config.mode is GameMode.OBJECT_MANIPULATION:
        return "fraction of reference layout matched in cell and orientation"
    if config.score.mode is ScoreMode.BINARY:
        return "binary win/lose"
    w = config.score
    return (
        f"weighted score: unspent money (x{w.w_unspent:g}), "
        f"enemy kill points (x{w.w_points:g}), base health (x{w.w_health:g})"
    )


def _q2(config: SessionConfig) -> str:
    parts = []
    for i, level in enumerate(config.levels):
        attack = estimated_attack_seconds(config, i)
        total = level.planning_seconds + attack
        parts.append(
            f"{level.name}: ~{level.planning_seconds:.0f}s planning + ~{attack:.0f}s attack"
            f" = ~{total / 60:.1f} min"
        )
    return "; ".join(parts)


def _q3(config: SessionConfig) -> str:
    spawn_counts = [len(level.spawn_scripts) for level in config.levels]
    buildable = [len(level.map.buildable_cells()) for level in config.levels]
    repeats = config.rounds_per_level
    if len(config.levels) == 1:
        return f"single level repeated {repeats}x at fixed difficulty"
    rising = all(a < b for a, b in zip(spawn_counts, spawn_counts[1:]))
    shrinking = all(a >= b for a, b in zip(buildable, buildable[1:]))
    trend = (
        "difficulty scales up: spawn points "
        + "->".join(str(c) for c in spawn_counts)
        + (", buildable space shrinks" if shrinking else "")
    )
    if not rising:
        trend = "levels vary without a strict difficulty ramp"
    return f"{trend}; each level repeated {repeats}x"


def _q4(config: SessionConfig) -> str:
    slots = config.team.slots
    return f"{len(slots)} human player slots: " + ", ".join(s.slot_id for s in slots)


def _q5(config: SessionConfig) -> str:
    sets = [frozenset(s.tower_ids) for s in config.team.slots]
    if all(not s for s in sets):
        return "no build roles; all players share the same controls"
    if len(set(sets)) == 1:
        return "symmetric roles: every player holds the same tower set"
    overlap = set.intersection(*(set(s) for s in sets)) if sets else set()
    counts = sorted(len(s) for s in sets)
    spread = f"{counts[0]}-{counts[-1]}" if counts[0] != counts[-1] else str(counts[0])
    if not overlap:
        return f"asymmetric roles: disjoint tower sets of {spread} towers per player"
    return f"partially overlapping roles ({len(overlap)} shared towers)"


def _q6(config: SessionConfig) -> str:
    sets = [frozenset(s.tower_ids) for s in config.team.slots]
    if all(not s for s in sets):
        return "interdependence comes from shared observation, not build rights"
    if len(set(sets)) == 1:
        return "players are interchangeable; coordination is optional"
    pooled = "a shared money pool" if config.money_model is MoneyModel.SHARED else "individual budgets"
    return f"each player controls towers nobody else can build, spending from {pooled}"


def _q8(config: SessionConfig) -> str:
    parts = ["all players see the same authoritative state simultaneously"]
    parts.append(
        "money pool is shared" if config.money_model is MoneyModel.SHARED else "each player sees an individual budget"
    )
    vis = config.visibility
    hidden = [
        label
        for flag, label in [
            (vis.tower_names, "tower names"),
            (vis.tower_descriptions, "tower descriptions"),
            (vis.coordinate_grid, "coordinate grid"),
            (vis.spawn_preview, "spawn preview"),
        ]
        if not flag
    ]
    if hidden:
        parts.append("hidden: " + ", ".join(hidden))
    return "; ".join(parts)


def _q9(config: SessionConfig) -> str:
    stressed = []
    for i, level in enumerate(config.levels):
        attack = estimated_attack_seconds(config, i)
        tight_time = level.planning_seconds < attack
        tight_gold = level.min_win_cost is not None and level.starting_gold < level.min_win_cost
        if tight_time or tight_gold:
            stressed.append(level.name)
    if stressed:
        return "high stress: " + ", ".join(stressed) + " give less time or gold than a planned win needs"
    return "low/moderate stress: planning time and gold comfortably cover a scripted win"


def _q10(config: SessionConfig) -> str:
    media = []
    if config.comm.text_chat:
        media.append("text")
    if config.comm.voice:
        media.append("voice (push-to-talk)" if config.comm.push_to_talk else "voice")
    return " and ".join(media) if media else "none"


def checklist_report(config: SessionConfig) -> ChecklistAnswers:
    """Deterministic Q1-Q10 answers; identical configs yield identical answers."""
    return ChecklistAnswers(
        q1_evaluation=_q1(config),
        q2_duration=_q2(config),
        q3_repetition=_q3(config),
        q4_team=_q4(config),
        q5_role_symmetry=_q5(config),
        q6_interdependence=_q6(config),
        q7_solution_space=config.solution_space_note or "solution space not annotated by the author",
        q8_information=_q8(config),
        q9_stress=_q9(config),
        q10_medium=_q10(config),
    )
