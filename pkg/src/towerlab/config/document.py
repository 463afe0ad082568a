"""Configuration document format: parsing and serialization.

The document is one UTF-8 YAML file. Maps are authored as ASCII tile grids
(`.` buildable, `#` blocked, `>` path, `S` spawn head, `B` base) together
with an explicit route list that gives waypoint order. The grammar is part
of the public interface; see docs in the README.

Parsing stops at syntax and typing: structural errors (broken routes, bad
references) are the validator's job.
"""

from __future__ import annotations

from typing import Any

import yaml

from towerlab.config.model import (
    CommSettings,
    LayoutRef,
    LevelSpec,
    PreplacedTower,
    SellPolicy,
    SessionConfig,
    TeamSetup,
    TowerAssignment,
    VisibilitySettings,
)
from towerlab.sim.types import (
    Archetype,
    CellKind,
    EnemyVariant,
    GameMode,
    GridMap,
    MoneyModel,
    PathRoute,
    ScoreMode,
    ScoreWeights,
    SpawnScript,
    TowerSpec,
)

GRID_CHARS = {
    ".": CellKind.BUILDABLE,
    "#": CellKind.BLOCKED,
    ">": CellKind.PATH,
    "S": CellKind.PATH,  # spawn head, still a path cell
    "B": CellKind.BASE,
}


class ConfigError(Exception):
    """Parse failure; `errors` lists every problem found."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors[:5]) + ("..." if len(errors) > 5 else ""))
        self.errors = errors


class _Reader:
    """Typed field extraction over raw YAML data, collecting errors by path."""

    def __init__(self) -> None:
        self.errors: list[str] = []

    def fail(self, path: str, message: str) -> None:
        self.errors.append(f"{path}: {message}")

    def mapping(self, value: Any, path: str, allowed: set[str], required: set[str]) -> dict:
        if not isinstance(value, dict):
            self.fail(path, f"expected a mapping, got {type(value).__name__}")
            return {}
        for key in value:
            if key not in allowed:
                self.fail(path, f"unknown field {key!r}")
        for key in required:
            if key not in value:
                self.fail(path, f"missing required field {key!r}")
        return value

    def str_(self, data: dict, key: str, path: str, default: str | None = None) -> str:
        value = data.get(key, default)
        if not isinstance(value, str):
            self.fail(f"{path}.{key}", "expected a string")
            return ""
        return value

    def int_(self, data: dict, key: str, path: str, default: int | None = None) -> int:
        value = data.get(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(f"{path}.{key}", "expected an integer")
            return 0
        return value

    def float_(self, data: dict, key: str, path: str, default: float | None = None) -> float:
        value = data.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"{path}.{key}", "expected a number")
            return 0.0
        return float(value)

    def bool_(self, data: dict, key: str, path: str, default: bool | None = None) -> bool:
        value = data.get(key, default)
        if not isinstance(value, bool):
            self.fail(f"{path}.{key}", "expected a boolean")
            return False
        return bool(value)

    def list_(self, data: dict, key: str, path: str, default: list | None = None) -> list:
        value = data.get(key, default if default is not None else [])
        if not isinstance(value, list):
            self.fail(f"{path}.{key}", "expected a list")
            return []
        return value

    def enum(self, data: dict, key: str, path: str, enum_cls, default=None):
        raw = data.get(key, default.value if default is not None else None)
        if not isinstance(raw, str) or raw not in enum_cls._value2member_map_:
            options = "/".join(m.value for m in enum_cls)
            self.fail(f"{path}.{key}", f"expected one of {options}")
            return next(iter(enum_cls))
        return enum_cls(raw)

    def cell(self, value: Any, path: str) -> tuple[int, int]:
        if (
            not isinstance(value, list)
            or len(value) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in value)
        ):
            self.fail(path, "expected a [x, y] pair of integers")
            return (0, 0)
        return (value[0], value[1])


def parse_config(text: str) -> SessionConfig:
    """Parse a configuration document; raises ConfigError on any problem."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError([f"syntax error{where}: {getattr(exc, 'problem', exc)}"])
    if raw is None:
        raise ConfigError(["document is empty"])

    r = _Reader()
    top = r.mapping(
        raw,
        "config",
        allowed={
            "name",
            "mode",
            "rounds_per_level",
            "money_model",
            "interact_during_attack",
            "sell_policy",
            "refund_rate_planning",
            "refund_rate_attack",
            "solution_space_note",
            "comm",
            "visibility",
            "score",
            "team",
            "towers",
            "enemies",
            "levels",
        },
        required={"name", "mode", "rounds_per_level", "team", "towers", "enemies", "levels"},
    )
    if r.errors:
        raise ConfigError(r.errors)

    config = SessionConfig(
        name=r.str_(top, "name", "config"),
        mode=r.enum(top, "mode", "config", GameMode),
        levels=[_read_level(r, lvl, f"levels[{i}]") for i, lvl in enumerate(r.list_(top, "levels", "config"))],
        rounds_per_level=r.int_(top, "rounds_per_level", "config"),
        team=_read_team(r, r.list_(top, "team", "config")),
        tower_catalog=[_read_tower(r, t, f"towers[{i}]") for i, t in enumerate(r.list_(top, "towers", "config"))],
        enemy_catalog=[_read_enemy(r, e, f"enemies[{i}]") for i, e in enumerate(r.list_(top, "enemies", "config"))],
        money_model=r.enum(top, "money_model", "config", MoneyModel, MoneyModel.SHARED),
        interact_during_attack=r.bool_(top, "interact_during_attack", "config", False),
        comm=_read_comm(r, top.get("comm", {})),
        visibility=_read_visibility(r, top.get("visibility", {})),
        score=_read_score(r, top.get("score", {})),
        refund_rate_planning=r.float_(top, "refund_rate_planning", "config", 1.0),
        refund_rate_attack=r.float_(top, "refund_rate_attack", "config", 0.75),
        sell_policy=r.enum(top, "sell_policy", "config", SellPolicy, SellPolicy.OWNER_ONLY),
        solution_space_note=r.str_(top, "solution_space_note", "config", ""),
    )
    if r.errors:
        raise ConfigError(r.errors)
    return config


def _read_comm(r: _Reader, raw: Any) -> CommSettings:
    data = r.mapping(raw, "comm", {"text_chat", "voice", "push_to_talk"}, set())
    return CommSettings(
        text_chat=r.bool_(data, "text_chat", "comm", True),
        voice=r.bool_(data, "voice", "comm", False),
        push_to_talk=r.bool_(data, "push_to_talk", "comm", False),
    )


def _read_visibility(r: _Reader, raw: Any) -> VisibilitySettings:
    data = r.mapping(
        raw,
        "visibility",
        {"tower_names", "tower_descriptions", "coordinate_grid", "spawn_preview"},
        set(),
    )
    return VisibilitySettings(
        tower_names=r.bool_(data, "tower_names", "visibility", True),
        tower_descriptions=r.bool_(data, "tower_descriptions", "visibility", True),
        coordinate_grid=r.bool_(data, "coordinate_grid", "visibility", True),
        spawn_preview=r.bool_(data, "spawn_preview", "visibility", True),
    )


def _read_score(r: _Reader, raw: Any) -> ScoreWeights:
    data = r.mapping(raw, "score", {"mode", "w_unspent", "w_points", "w_health"}, set())
    return ScoreWeights(
        mode=r.enum(data, "mode", "score", ScoreMode, ScoreMode.LINEAR),
        w_unspent=r.float_(data, "w_unspent", "score", 1.0),
        w_points=r.float_(data, "w_points", "score", 1.0),
        w_health=r.float_(data, "w_health", "score", 10.0),
    )


def _read_team(r: _Reader, raw: list) -> TeamSetup:
    slots = []
    for i, item in enumerate(raw):
        path = f"team[{i}]"
        data = r.mapping(item, path, {"slot", "color", "towers"}, {"slot", "color"})
        tower_ids = []
        for tower in r.list_(data, "towers", path):
            if isinstance(tower, str):
                tower_ids.append(tower)
            else:
                r.fail(f"{path}.towers", "expected tower ids")
        slots.append(
            TowerAssignment(
                slot_id=r.str_(data, "slot", path),
                tower_ids=tower_ids,
                color=r.str_(data, "color", path),
            )
        )
    return TeamSetup(slots=slots)


def _read_tower(r: _Reader, raw: Any, path: str) -> TowerSpec:
    data = r.mapping(
        raw,
        path,
        {
            "id",
            "archetype",
            "cost",
            "range",
            "damage",
            "firerate",
            "upgrade_cost",
            "effect_params",
            "name",
            "description",
            "orientation",
        },
        {"id", "archetype", "cost", "range", "damage", "firerate"},
    )
    params_raw = data.get("effect_params", {})
    params: dict[str, float] = {}
    if not isinstance(params_raw, dict):
        r.fail(f"{path}.effect_params", "expected a mapping")
    else:
        for key, value in params_raw.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                r.fail(f"{path}.effect_params.{key}", "expected a number")
            else:
                params[str(key)] = float(value)
    return TowerSpec(
        spec_id=r.str_(data, "id", path),
        archetype=r.enum(data, "archetype", path, Archetype),
        cost=r.int_(data, "cost", path),
        range=r.float_(data, "range", path),
        damage=r.float_(data, "damage", path),
        firerate=r.float_(data, "firerate", path),
        upgrade_cost=r.int_(data, "upgrade_cost", path, 0),
        effect_params=params,
        display_name=r.str_(data, "name", path, ""),
        description=r.str_(data, "description", path, ""),
        orientation=r.str_(data, "orientation", path, ""),
    )


def _read_enemy(r: _Reader, raw: Any, path: str) -> EnemyVariant:
    data = r.mapping(
        raw, path, {"id", "health", "speed", "points", "bounty"}, {"id", "health", "speed", "points", "bounty"}
    )
    return EnemyVariant(
        variant_id=r.str_(data, "id", path),
        max_health=r.float_(data, "health", path),
        speed=r.float_(data, "speed", path),
        points=r.int_(data, "points", path),
        bounty=r.int_(data, "bounty", path),
    )


def _read_level(r: _Reader, raw: Any, path: str) -> LevelSpec:
    data = r.mapping(
        raw,
        path,
        {
            "name",
            "grid",
            "routes",
            "spawns",
            "starting_gold",
            "starting_health",
            "planning_seconds",
            "preplaced",
            "reference_layout",
            "selection_target",
            "min_win_cost",
        },
        {"name", "grid", "starting_gold", "starting_health", "planning_seconds"},
    )
    grid = _read_grid(r, data, path)
    scripts = []
    for i, item in enumerate(r.list_(data, "spawns", path)):
        spath = f"{path}.spawns[{i}]"
        sdata = r.mapping(item, spath, {"id", "route", "entries"}, {"id", "route", "entries"})
        entries = []
        for j, entry in enumerate(r.list_(sdata, "entries", spath)):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not isinstance(entry[0], str)
                or isinstance(entry[1], bool)
                or not isinstance(entry[1], (int, float))
            ):
                r.fail(f"{spath}.entries[{j}]", "expected [variant_id, seconds]")
                continue
            entries.append((entry[0], float(entry[1])))
        scripts.append(
            SpawnScript(
                script_id=r.str_(sdata, "id", spath),
                route_id=r.str_(sdata, "route", spath),
                entries=entries,
            )
        )
    preplaced = []
    for i, item in enumerate(r.list_(data, "preplaced", path)):
        ppath = f"{path}.preplaced[{i}]"
        pdata = r.mapping(item, ppath, {"tower", "cell"}, {"tower", "cell"})
        preplaced.append(
            PreplacedTower(spec_id=r.str_(pdata, "tower", ppath), cell=r.cell(pdata.get("cell"), f"{ppath}.cell"))
        )
    reference = []
    for i, item in enumerate(r.list_(data, "reference_layout", path)):
        rpath = f"{path}.reference_layout[{i}]"
        rdata = r.mapping(item, rpath, {"tower", "cell", "orientation"}, {"tower", "cell"})
        reference.append(
            LayoutRef(
                spec_id=r.str_(rdata, "tower", rpath),
                cell=r.cell(rdata.get("cell"), f"{rpath}.cell"),
                orientation=r.str_(rdata, "orientation", rpath, ""),
            )
        )
    target = None
    if data.get("selection_target") is not None:
        target = r.cell(data["selection_target"], f"{path}.selection_target")
    min_win = None
    if data.get("min_win_cost") is not None:
        min_win = r.int_(data, "min_win_cost", path)
    return LevelSpec(
        name=r.str_(data, "name", path),
        map=grid,
        spawn_scripts=scripts,
        starting_gold=r.int_(data, "starting_gold", path),
        starting_health=r.int_(data, "starting_health", path),
        planning_seconds=r.float_(data, "planning_seconds", path),
        preplaced_towers=preplaced,
        reference_layout=reference,
        selection_target=target,
        min_win_cost=min_win,
    )


def _read_grid(r: _Reader, data: dict, path: str) -> GridMap:
    text = r.str_(data, "grid", path)
    rows = [line for line in text.splitlines() if line.strip()]
    tiles: list[list[CellKind]] = []
    base_cell = None
    width = len(rows[0]) if rows else 0
    for y, row in enumerate(rows):
        if len(row) != width:
            r.fail(f"{path}.grid", f"row {y} has width {len(row)}, expected {width}")
        tile_row = []
        for x, ch in enumerate(row):
            kind = GRID_CHARS.get(ch)
            if kind is None:
                r.fail(f"{path}.grid", f"unknown tile {ch!r} at ({x}, {y})")
                kind = CellKind.BLOCKED
            if kind is CellKind.BASE:
                base_cell = (x, y)
            tile_row.append(kind)
        tiles.append(tile_row)
    if base_cell is None:
        r.fail(f"{path}.grid", "no base cell ('B') present")
        base_cell = (0, 0)
    routes = []
    for i, item in enumerate(r.list_(data, "routes", path)):
        rpath = f"{path}.routes[{i}]"
        rdata = r.mapping(item, rpath, {"id", "waypoints"}, {"id", "waypoints"})
        waypoints = [
            r.cell(wp, f"{rpath}.waypoints[{j}]") for j, wp in enumerate(r.list_(rdata, "waypoints", rpath))
        ]
        routes.append(PathRoute(route_id=r.str_(rdata, "id", rpath), waypoints=waypoints))
    return GridMap(width=width, height=len(rows), tiles=tiles, routes=routes, base_cell=base_cell)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def serialize_config(config: SessionConfig) -> str:
    doc = {
        "name": config.name,
        "mode": config.mode.value,
        "rounds_per_level": config.rounds_per_level,
        "money_model": config.money_model.value,
        "interact_during_attack": config.interact_during_attack,
        "sell_policy": config.sell_policy.value,
        "refund_rate_planning": config.refund_rate_planning,
        "refund_rate_attack": config.refund_rate_attack,
        "solution_space_note": config.solution_space_note,
        "comm": {
            "text_chat": config.comm.text_chat,
            "voice": config.comm.voice,
            "push_to_talk": config.comm.push_to_talk,
        },
        "visibility": {
            "tower_names": config.visibility.tower_names,
            "tower_descriptions": config.visibility.tower_descriptions,
            "coordinate_grid": config.visibility.coordinate_grid,
            "spawn_preview": config.visibility.spawn_preview,
        },
        "score": {
            "mode": config.score.mode.value,
            "w_unspent": config.score.w_unspent,
            "w_points": config.score.w_points,
            "w_health": config.score.w_health,
        },
        "team": [
            {"slot": s.slot_id, "color": s.color, "towers": list(s.tower_ids)}
            for s in config.team.slots
        ],
        "towers": [_tower_doc(t) for t in config.tower_catalog],
        "enemies": [
            {
                "id": e.variant_id,
                "health": e.max_health,
                "speed": e.speed,
                "points": e.points,
                "bounty": e.bounty,
            }
            for e in config.enemy_catalog
        ],
        "levels": [_level_doc(level) for level in config.levels],
    }
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True, width=100)


def _tower_doc(spec: TowerSpec) -> dict:
    doc: dict[str, Any] = {
        "id": spec.spec_id,
        "archetype": spec.archetype.value,
        "cost": spec.cost,
        "range": spec.range,
        "damage": spec.damage,
        "firerate": spec.firerate,
        "upgrade_cost": spec.upgrade_cost,
        "name": spec.display_name,
        "description": spec.description,
    }
    if spec.effect_params:
        doc["effect_params"] = dict(spec.effect_params)
    if spec.orientation:
        doc["orientation"] = spec.orientation
    return doc


def _level_doc(level: LevelSpec) -> dict:
    doc: dict[str, Any] = {
        "name": level.name,
        "starting_gold": level.starting_gold,
        "starting_health": level.starting_health,
        "planning_seconds": level.planning_seconds,
        "grid": render_grid(level.map),
        "routes": [
            {"id": route.route_id, "waypoints": [[x, y] for x, y in route.waypoints]}
            for route in level.map.routes
        ],
        "spawns": [
            {
                "id": script.script_id,
                "route": script.route_id,
                "entries": [[variant, seconds] for variant, seconds in script.entries],
            }
            for script in level.spawn_scripts
        ],
    }
    if level.preplaced_towers:
        doc["preplaced"] = [
            {"tower": p.spec_id, "cell": [p.cell[0], p.cell[1]]} for p in level.preplaced_towers
        ]
    if level.reference_layout:
        doc["reference_layout"] = [
            {"tower": ref.spec_id, "cell": [ref.cell[0], ref.cell[1]], "orientation": ref.orientation}
            for ref in level.reference_layout
        ]
    if level.selection_target is not None:
        doc["selection_target"] = [level.selection_target[0], level.selection_target[1]]
    if level.min_win_cost is not None:
        doc["min_win_cost"] = level.min_win_cost
    return doc


def render_grid(grid: GridMap) -> str:
    heads = {route.spawn_cell for route in grid.routes}
    rows = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            kind = grid.tiles[y][x]
            if kind is CellKind.BUILDABLE:
                row.append(".")
            elif kind is CellKind.BLOCKED:
                row.append("#")
            elif kind is CellKind.BASE:
                row.append("B")
            else:
                row.append("S" if (x, y) in heads else ">")
        rows.append("".join(row))
    return "\n".join(rows) + "\n"
