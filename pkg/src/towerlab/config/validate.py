"""Structural validation of parsed session configs.

Every violation is reported with a stable code (the enumeration below is
part of the public interface) and the path of the offending element.
A config that passes can be loaded by the simulation for every
(level, round) pair without error.
"""

from __future__ import annotations

from dataclasses import dataclass

from towerlab.config.model import SessionConfig
from towerlab.sim.types import ATTACKING_ARCHETYPES, Archetype, CellKind, GameMode

#: code -> human summary; validation only ever emits codes listed here.
VALIDATION_CODES = {
    "NO_LEVELS": "config must declare at least one level",
    "BAD_ROUNDS": "rounds_per_level must be >= 1",
    "BAD_TEAM_SIZE": "team must have 1..8 slots",
    "DUPLICATE_SLOT": "slot ids must be unique",
    "COLORS_NOT_UNIQUE": "player colors must be pairwise distinct",
    "ASSIGNMENT_UNKNOWN_TOWER": "assignment references a tower id missing from the catalog",
    "DUPLICATE_TOWER_ID": "tower catalog ids must be unique",
    "DUPLICATE_ENEMY_ID": "enemy catalog ids must be unique",
    "BAD_TOWER_STAT": "tower stat violates its bounds",
    "BAD_ENEMY_STAT": "enemy stats must all be positive",
    "MAP_TOO_SMALL": "maps must be at least 4x4 tiles",
    "BASE_KIND_MISMATCH": "base_cell must lie on a BASE tile",
    "ROUTE_EMPTY": "routes need at least two waypoints",
    "ROUTE_OUT_OF_BOUNDS": "route waypoint outside the map",
    "ROUTE_NOT_ADJACENT": "route not 4-adjacent",
    "ROUTE_REPEATED_CELL": "route repeats a cell consecutively",
    "ROUTE_OFF_PATH": "route crosses a non-path tile",
    "ROUTE_NOT_TERMINATING": "route must end at the base cell",
    "DUPLICATE_ROUTE_ID": "route ids must be unique within a level",
    "SPAWN_UNKNOWN_ROUTE": "spawn script references an unknown route",
    "SPAWN_ROUTE_SHARED": "each route may carry at most one spawn script",
    "SPAWN_TIMES_DECREASING": "spawn times must be non-decreasing",
    "SPAWN_UNKNOWN_VARIANT": "spawn entry references an unknown enemy variant",
    "DUPLICATE_SCRIPT_ID": "spawn script ids must be unique within a level",
    "BAD_LEVEL_FIELD": "level scalar field out of bounds",
    "NO_BUILDABLE_CELLS": "tower-defense levels need buildable space",
    "PREPLACED_INVALID": "pre-placed tower is malformed",
    "SELECTION_TARGET_MISSING": "selection target missing or not a pre-placed tower",
    "REFERENCE_LAYOUT_MISSING": "manipulation levels need a reference layout",
    "PREPLACED_REQUIRED": "object modes require pre-placed towers in each level",
    "OBJECT_MODE_NEEDS_PLANNING": "object modes need planning_seconds > 0",
}


@dataclass
class ValidationIssue:
    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.path}: {self.message}"


def _issue(issues: list[ValidationIssue], code: str, path: str, message: str = "") -> None:
    assert code in VALIDATION_CODES, code
    issues.append(ValidationIssue(code, path, message or VALIDATION_CODES[code]))


def validate_config(config: SessionConfig) -> list[ValidationIssue]:
    """All structural problems found; an empty list means the config is ok."""
    issues: list[ValidationIssue] = []

    if not config.levels:
        _issue(issues, "NO_LEVELS", "levels")
    if config.rounds_per_level < 1:
        _issue(issues, "BAD_ROUNDS", "rounds_per_level")
    if not 1 <= len(config.team.slots) <= 8:
        _issue(issues, "BAD_TEAM_SIZE", "team")

    _check_catalogs(config, issues)
    _check_team(config, issues)
    for i, level in enumerate(config.levels):
        _check_level(config, level, f"levels[{i}]", issues)
    return issues


def _check_catalogs(config: SessionConfig, issues: list[ValidationIssue]) -> None:
    seen: set[str] = set()
    for i, spec in enumerate(config.tower_catalog):
        path = f"towers[{i}]"
        if spec.spec_id in seen:
            _issue(issues, "DUPLICATE_TOWER_ID", path, spec.spec_id)
        seen.add(spec.spec_id)
        if spec.cost < 0:
            _issue(issues, "BAD_TOWER_STAT", f"{path}.cost", "cost must be >= 0")
        if spec.range < 0:
            _issue(issues, "BAD_TOWER_STAT", f"{path}.range", "range must be >= 0")
        if spec.archetype in ATTACKING_ARCHETYPES and spec.firerate <= 0:
            _issue(issues, "BAD_TOWER_STAT", f"{path}.firerate", "attacking towers need firerate > 0")
        if spec.archetype in (Archetype.DISCOUNT, Archetype.SUPPORT) and spec.damage != 0:
            _issue(issues, "BAD_TOWER_STAT", f"{path}.damage", "aura towers must have damage 0")
    seen = set()
    for i, variant in enumerate(config.enemy_catalog):
        path = f"enemies[{i}]"
        if variant.variant_id in seen:
            _issue(issues, "DUPLICATE_ENEMY_ID", path, variant.variant_id)
        seen.add(variant.variant_id)
        if min(variant.max_health, variant.speed) <= 0 or min(variant.points, variant.bounty) <= 0:
            _issue(issues, "BAD_ENEMY_STAT", path, variant.variant_id)


def _check_team(config: SessionConfig, issues: list[ValidationIssue]) -> None:
    slot_ids: set[str] = set()
    colors: set[str] = set()
    for i, slot in enumerate(config.team.slots):
        path = f"team[{i}]"
        if slot.slot_id in slot_ids:
            _issue(issues, "DUPLICATE_SLOT", path, slot.slot_id)
        slot_ids.add(slot.slot_id)
        if slot.color in colors:
            _issue(issues, "COLORS_NOT_UNIQUE", f"{path}.color", slot.color)
        colors.add(slot.color)
        for tower_id in slot.tower_ids:
            if config.tower_spec(tower_id) is None:
                _issue(issues, "ASSIGNMENT_UNKNOWN_TOWER", f"{path}.towers", tower_id)


def _check_level(config: SessionConfig, level, path: str, issues: list[ValidationIssue]) -> None:
    grid = level.map
    if grid.width < 4 or grid.height < 4:
        _issue(issues, "MAP_TOO_SMALL", f"{path}.grid", f"{grid.width}x{grid.height}")
        return
    if not grid.in_bounds(grid.base_cell) or grid.kind_at(grid.base_cell) is not CellKind.BASE:
        _issue(issues, "BASE_KIND_MISMATCH", f"{path}.grid", str(grid.base_cell))

    if level.starting_gold < 0:
        _issue(issues, "BAD_LEVEL_FIELD", f"{path}.starting_gold", "must be >= 0")
    if level.starting_health < 1:
        _issue(issues, "BAD_LEVEL_FIELD", f"{path}.starting_health", "must be >= 1")
    if level.planning_seconds < 0:
        _issue(issues, "BAD_LEVEL_FIELD", f"{path}.planning_seconds", "must be >= 0")

    route_ids: set[str] = set()
    for i, route in enumerate(grid.routes):
        rpath = f"{path}.routes[{i}]"
        if route.route_id in route_ids:
            _issue(issues, "DUPLICATE_ROUTE_ID", rpath, route.route_id)
        route_ids.add(route.route_id)
        _check_route(grid, route, rpath, issues)

    script_ids: set[str] = set()
    scripted_routes: set[str] = set()
    for i, script in enumerate(level.spawn_scripts):
        spath = f"{path}.spawns[{i}]"
        if script.script_id in script_ids:
            _issue(issues, "DUPLICATE_SCRIPT_ID", spath, script.script_id)
        script_ids.add(script.script_id)
        if script.route_id not in route_ids:
            _issue(issues, "SPAWN_UNKNOWN_ROUTE", spath, script.route_id)
        elif script.route_id in scripted_routes:
            _issue(issues, "SPAWN_ROUTE_SHARED", spath, script.route_id)
        scripted_routes.add(script.route_id)
        last = float("-inf")
        for j, (variant_id, seconds) in enumerate(script.entries):
            if config.enemy_variant(variant_id) is None:
                _issue(issues, "SPAWN_UNKNOWN_VARIANT", f"{spath}.entries[{j}]", variant_id)
            if seconds < last:
                _issue(issues, "SPAWN_TIMES_DECREASING", f"{spath}.entries[{j}]", f"{seconds} after {last}")
            last = max(last, seconds)

    preplaced_cells: set[tuple[int, int]] = set()
    for i, pre in enumerate(level.preplaced_towers):
        ppath = f"{path}.preplaced[{i}]"
        if config.tower_spec(pre.spec_id) is None:
            _issue(issues, "PREPLACED_INVALID", ppath, f"unknown tower {pre.spec_id!r}")
            continue
        if not grid.in_bounds(pre.cell) or grid.kind_at(pre.cell) is not CellKind.BUILDABLE:
            _issue(issues, "PREPLACED_INVALID", ppath, f"cell {pre.cell} not buildable")
        if pre.cell in preplaced_cells:
            _issue(issues, "PREPLACED_INVALID", ppath, f"cell {pre.cell} used twice")
        preplaced_cells.add(pre.cell)

    if config.mode is GameMode.TOWER_DEFENSE:
        if not any(
            grid.tiles[y][x] is CellKind.BUILDABLE and (x, y) not in preplaced_cells
            for y in range(grid.height)
            for x in range(grid.width)
        ):
            _issue(issues, "NO_BUILDABLE_CELLS", f"{path}.grid")
    else:
        if level.planning_seconds <= 0:
            _issue(issues, "OBJECT_MODE_NEEDS_PLANNING", f"{path}.planning_seconds")
        if not level.preplaced_towers:
            _issue(issues, "PREPLACED_REQUIRED", f"{path}.preplaced")

    if config.mode is GameMode.OBJECT_SELECTION:
        if level.selection_target is None or level.selection_target not in preplaced_cells:
            _issue(issues, "SELECTION_TARGET_MISSING", f"{path}.selection_target")
    if config.mode is GameMode.OBJECT_MANIPULATION and not level.reference_layout:
        _issue(issues, "REFERENCE_LAYOUT_MISSING", f"{path}.reference_layout")


def _check_route(grid, route, rpath: str, issues: list[ValidationIssue]) -> None:
    if len(route.waypoints) < 2:
        _issue(issues, "ROUTE_EMPTY", rpath)
        return
    for j, cell in enumerate(route.waypoints):
        if not grid.in_bounds(cell):
            _issue(issues, "ROUTE_OUT_OF_BOUNDS", f"{rpath}.waypoints[{j}]", str(cell))
            return
        kind = grid.kind_at(cell)
        if kind not in (CellKind.PATH, CellKind.BASE):
            _issue(issues, "ROUTE_OFF_PATH", f"{rpath}.waypoints[{j}]", f"{cell} is {kind.value}")
    for j in range(1, len(route.waypoints)):
        ax, ay = route.waypoints[j - 1]
        bx, by = route.waypoints[j]
        if (ax, ay) == (bx, by):
            _issue(issues, "ROUTE_REPEATED_CELL", f"{rpath}.waypoints[{j}]", str((bx, by)))
        elif abs(ax - bx) + abs(ay - by) != 1:
            _issue(issues, "ROUTE_NOT_ADJACENT", f"{rpath}.waypoints[{j}]", f"{(ax, ay)} -> {(bx, by)}")
    if route.waypoints[-1] != grid.base_cell:
        _issue(issues, "ROUTE_NOT_TERMINATING", rpath, f"ends at {route.waypoints[-1]}")
