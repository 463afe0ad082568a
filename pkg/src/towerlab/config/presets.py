"""Built-in session presets.

Preset names are stable public identifiers. Stat numbers are authored for
this repository's balance goals (gold surplus on the study levels, upgrade
pricing that slightly beats buying more towers) and checked by the test
suite rather than taken from any external source.
"""

from __future__ import annotations

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
    Cell,
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

PRESET_NAMES = (
    "tutorial",
    "case-study",
    "stress",
    "object-selection",
    "object-manipulation",
)


def builtin_preset(name: str) -> SessionConfig:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return builder()


# ---------------------------------------------------------------------------
# Map construction helpers
# ---------------------------------------------------------------------------


def _expand_corners(corners: list[Cell]) -> list[Cell]:
    """Full 4-adjacent waypoint list through the given corner cells."""
    cells = [corners[0]]
    for (ax, ay), (bx, by) in zip(corners, corners[1:]):
        assert ax == bx or ay == by, f"corner segment {(ax, ay)}->{(bx, by)} not axis-aligned"
        dx = (bx > ax) - (bx < ax)
        dy = (by > ay) - (by < ay)
        x, y = ax, ay
        while (x, y) != (bx, by):
            x, y = x + dx, y + dy
            cells.append((x, y))
    return cells


def _make_map(
    width: int,
    height: int,
    route_corners: dict[str, list[Cell]],
    base_cell: Cell,
    blocked: list[Cell] = (),
) -> GridMap:
    tiles = [[CellKind.BUILDABLE for _ in range(width)] for _ in range(height)]
    routes = []
    for route_id, corners in route_corners.items():
        waypoints = _expand_corners(corners)
        routes.append(PathRoute(route_id=route_id, waypoints=waypoints))
        for x, y in waypoints:
            tiles[y][x] = CellKind.PATH
    bx, by = base_cell
    tiles[by][bx] = CellKind.BASE
    for x, y in blocked:
        assert tiles[y][x] is CellKind.BUILDABLE, f"blocked cell {(x, y)} overlaps path"
        tiles[y][x] = CellKind.BLOCKED
    return GridMap(width=width, height=height, tiles=tiles, routes=routes, base_cell=base_cell)


# ---------------------------------------------------------------------------
# Shared catalogs
# ---------------------------------------------------------------------------


def _standard_towers() -> list[TowerSpec]:
    return [
        TowerSpec("basic", Archetype.BASIC, cost=200, range=3.0, damage=10.0, firerate=1.0,
                  upgrade_cost=100, display_name="Crossbow",
                  description="Steady single-target shots."),
        TowerSpec("poison", Archetype.POISON, cost=250, range=2.5, damage=4.0, firerate=0.8,
                  upgrade_cost=125, display_name="Vine",
                  description="Light hit plus lingering venom."),
        TowerSpec("piercing", Archetype.PIERCING, cost=300, range=3.5, damage=8.0, firerate=0.8,
                  upgrade_cost=150, display_name="Ballista",
                  description="Bolts punch through every enemy in a line."),
        TowerSpec("splash", Archetype.SPLASH, cost=350, range=2.5, damage=7.0, firerate=0.7,
                  upgrade_cost=175, display_name="Catapult",
                  description="Area damage around the point of impact."),
        TowerSpec("obstacle", Archetype.OBSTACLE, cost=150, range=2.0, damage=6.0, firerate=1.0,
                  upgrade_cost=75, display_name="Spike Trap",
                  description="Drops a trap on the nearest track cell."),
        TowerSpec("slow", Archetype.SLOW, cost=225, range=2.5, damage=2.0, firerate=0.9,
                  upgrade_cost=110, display_name="Frost Gem",
                  description="Chills enemies, halving their speed."),
        TowerSpec("fear", Archetype.FEAR, cost=275, range=2.5, damage=3.0, firerate=0.4,
                  upgrade_cost=140, display_name="Haunted Tree",
                  description="Frightened enemies flee back along the track."),
        TowerSpec("sniper", Archetype.SNIPER, cost=320, range=5.0, damage=14.0, firerate=0.5,
                  upgrade_cost=160, display_name="Longrifle",
                  description="Hits harder the faster the target moves."),
        TowerSpec("discount", Archetype.DISCOUNT, cost=180, range=2.5, damage=0.0, firerate=1.0,
                  upgrade_cost=90, display_name="Bazaar",
                  description="Cuts upgrade prices for nearby towers."),
        TowerSpec("support", Archetype.SUPPORT, cost=260, range=2.5, damage=0.0, firerate=1.0,
                  upgrade_cost=130, display_name="Banner",
                  description="Boosts all stats of nearby towers."),
        TowerSpec("multi", Archetype.MULTISHOT, cost=330, range=3.5, damage=6.0, firerate=0.9,
                  upgrade_cost=165, display_name="Quadshot",
                  description="Fires in the four cardinal directions at once."),
        TowerSpec("map", Archetype.MAP, cost=400, range=0.0, damage=2.0, firerate=0.25,
                  upgrade_cost=200, display_name="Storm Orb",
                  description="Slow pulse that damages every enemy on the map."),
    ]


def _standard_enemies() -> list[EnemyVariant]:
    return [
        EnemyVariant("grunt", max_health=40.0, speed=1.0, points=10, bounty=15),
        EnemyVariant("runner", max_health=25.0, speed=2.0, points=15, bounty=20),
        EnemyVariant("brute", max_health=150.0, speed=0.6, points=30, bounty=45),
    ]


def _wave(*groups: tuple[str, float, float, int]) -> list[tuple[str, float]]:
    """Groups of (variant, first_time, interval, count) merged in time order."""
    entries: list[tuple[str, float]] = []
    for variant, start, interval, count in groups:
        entries.extend((variant, round(start + i * interval, 3)) for i in range(count))
    entries.sort(key=lambda e: e[1])
    return entries


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


def _case_study() -> SessionConfig:
    level1 = LevelSpec(
        name="meadow",
        map=_make_map(
            16, 16,
            {"r1": [(0, 8), (15, 8)]},
            base_cell=(15, 8),
        ),
        spawn_scripts=[
            SpawnScript("s1", "r1", _wave(
                ("grunt", 0.0, 1.5, 6),
                ("runner", 9.0, 1.0, 4),
                ("brute", 14.0, 2.0, 2),
            )),
        ],
        starting_gold=20000,
        starting_health=10,
        planning_seconds=300,
        min_win_cost=1200,
    )
    level2 = LevelSpec(
        name="fork",
        map=_make_map(
            16, 16,
            {
                "r1": [(0, 4), (8, 4), (8, 8), (15, 8)],
                "r2": [(0, 12), (8, 12), (8, 8), (15, 8)],
            },
            base_cell=(15, 8),
            blocked=[(0, 0), (1, 0), (14, 0), (15, 0), (0, 15), (1, 15), (14, 15), (15, 15)],
        ),
        spawn_scripts=[
            SpawnScript("s1", "r1", _wave(
                ("grunt", 0.0, 1.5, 5),
                ("runner", 8.0, 1.0, 4),
                ("brute", 13.0, 2.0, 1),
            )),
            SpawnScript("s2", "r2", _wave(
                ("grunt", 0.75, 1.5, 5),
                ("runner", 8.5, 1.0, 3),
                ("brute", 13.0, 2.0, 2),
            )),
        ],
        starting_gold=20000,
        starting_health=10,
        planning_seconds=330,
        min_win_cost=2000,
    )
    level3 = LevelSpec(
        name="trident",
        map=_make_map(
            16, 16,
            {
                "r1": [(0, 2), (10, 2), (10, 8), (15, 8)],
                "r2": [(0, 8), (15, 8)],
                "r3": [(0, 14), (10, 14), (10, 8), (15, 8)],
            },
            base_cell=(15, 8),
            blocked=[
                (2, 0), (3, 0), (4, 0), (5, 0), (12, 0), (13, 0),
                (2, 15), (3, 15), (4, 15), (5, 15), (12, 15), (13, 15),
                (3, 5), (4, 5), (5, 5), (3, 11), (4, 11), (5, 11),
                (13, 2), (13, 3), (13, 13), (13, 14), (14, 12), (14, 4),
            ],
        ),
        spawn_scripts=[
            SpawnScript("s1", "r1", _wave(
                ("grunt", 0.0, 1.5, 5),
                ("runner", 8.0, 1.0, 3),
                ("brute", 12.0, 2.0, 2),
            )),
            SpawnScript("s2", "r2", _wave(
                ("grunt", 0.5, 1.5, 6),
                ("runner", 9.5, 1.0, 3),
                ("brute", 13.0, 2.0, 1),
            )),
            SpawnScript("s3", "r3", _wave(
                ("grunt", 1.0, 1.5, 5),
                ("runner", 9.0, 1.0, 4),
                ("brute", 14.0, 2.0, 2),
            )),
        ],
        starting_gold=22000,
        starting_health=10,
        planning_seconds=360,
        min_win_cost=3200,
    )
    return SessionConfig(
        name="case-study",
        mode=GameMode.TOWER_DEFENSE,
        levels=[level1, level2, level3],
        rounds_per_level=3,
        team=TeamSetup([
            TowerAssignment("p1", ["basic", "splash", "sniper"], "#e6194b"),
            TowerAssignment("p2", ["slow", "fear", "poison"], "#3cb44b"),
            TowerAssignment("p3", ["piercing", "multi", "obstacle"], "#4363d8"),
            TowerAssignment("p4", ["discount", "support", "map"], "#f58231"),
        ]),
        tower_catalog=_standard_towers(),
        enemy_catalog=_standard_enemies(),
        money_model=MoneyModel.SHARED,
        interact_during_attack=False,
        comm=CommSettings(text_chat=True, voice=False, push_to_talk=False),
        visibility=VisibilitySettings(),
        score=ScoreWeights(mode=ScoreMode.LINEAR, w_unspent=1.0, w_points=1.0, w_health=10.0),
        solution_space_note=(
            "wide: the gold surplus admits many winning tower mixes, and upgrade "
            "pricing slightly favors improving placed towers over buying more"
        ),
    )


def _tutorial() -> SessionConfig:
    level = LevelSpec(
        name="first-steps",
        map=_make_map(12, 12, {"r1": [(0, 6), (11, 6)]}, base_cell=(11, 6)),
        spawn_scripts=[
            SpawnScript("s1", "r1", _wave(
                ("grunt", 0.0, 2.0, 4),
                ("runner", 8.0, 2.0, 2),
            )),
        ],
        starting_gold=2000,
        starting_health=10,
        planning_seconds=120,
        min_win_cost=400,
    )
    return SessionConfig(
        name="tutorial",
        mode=GameMode.TOWER_DEFENSE,
        levels=[level],
        rounds_per_level=1,
        team=TeamSetup([
            TowerAssignment("p1", ["basic", "splash", "obstacle"], "#e6194b"),
            TowerAssignment("p2", ["slow", "support", "discount"], "#4363d8"),
        ]),
        tower_catalog=_standard_towers(),
        enemy_catalog=_standard_enemies(),
        score=ScoreWeights(mode=ScoreMode.LINEAR, w_unspent=1.0, w_points=1.0, w_health=10.0),
        solution_space_note="forgiving: any few towers near the lane win",
    )


def _stress() -> SessionConfig:
    level = LevelSpec(
        name="onslaught",
        map=_make_map(12, 12, {"r1": [(0, 6), (11, 6)]}, base_cell=(11, 6)),
        spawn_scripts=[
            SpawnScript("s1", "r1", _wave(
                ("grunt", 0.0, 1.0, 6),
                ("runner", 5.5, 1.0, 6),
                ("brute", 12.0, 2.0, 3),
            )),
        ],
        starting_gold=500,
        starting_health=5,
        planning_seconds=30,
        min_win_cost=700,
    )
    return SessionConfig(
        name="stress",
        mode=GameMode.TOWER_DEFENSE,
        levels=[level],
        rounds_per_level=3,
        team=TeamSetup([
            TowerAssignment("p1", ["basic", "splash"], "#e6194b"),
            TowerAssignment("p2", ["slow", "sniper"], "#3cb44b"),
            TowerAssignment("p3", ["support", "discount"], "#4363d8"),
        ]),
        tower_catalog=_standard_towers(),
        enemy_catalog=_standard_enemies(),
        interact_during_attack=True,
        comm=CommSettings(text_chat=False, voice=True, push_to_talk=True),
        score=ScoreWeights(mode=ScoreMode.BINARY),
        solution_space_note=(
            "narrow early, wide late: the opening budget cannot buy a full defense, "
            "so teams must reinvest bounties mid-attack"
        ),
    )


def _object_selection() -> SessionConfig:
    level = LevelSpec(
        name="pick-one",
        map=_make_map(8, 8, {}, base_cell=(7, 7)),
        spawn_scripts=[],
        starting_gold=0,
        starting_health=10,
        planning_seconds=180,
        preplaced_towers=[
            PreplacedTower("basic", (1, 1)),
            PreplacedTower("poison", (3, 1)),
            PreplacedTower("splash", (5, 1)),
            PreplacedTower("slow", (2, 4)),
            PreplacedTower("sniper", (4, 4)),
        ],
        selection_target=(3, 1),
    )
    return SessionConfig(
        name="object-selection",
        mode=GameMode.OBJECT_SELECTION,
        levels=[level],
        rounds_per_level=1,
        team=TeamSetup([
            TowerAssignment("guide", [], "#e6194b"),
            TowerAssignment("operator", [], "#4363d8"),
        ]),
        tower_catalog=_standard_towers(),
        enemy_catalog=_standard_enemies(),
        comm=CommSettings(text_chat=False, voice=True),
        visibility=VisibilitySettings(tower_names=False, tower_descriptions=False),
        score=ScoreWeights(mode=ScoreMode.BINARY),
        solution_space_note="singleton: exactly one object is the right answer",
    )


def _furniture() -> list[TowerSpec]:
    pieces = []
    for family, orientations in [("armchair", "NE"), ("table", "NE")]:
        for orientation in orientations:
            pieces.append(
                TowerSpec(
                    f"{family}_{orientation.lower()}",
                    Archetype.SUPPORT,
                    cost=10,
                    range=0.0,
                    damage=0.0,
                    firerate=1.0,
                    upgrade_cost=5,
                    effect_params={"support_buff": 0.0},
                    display_name=f"{family.title()} ({orientation})",
                    orientation=orientation,
                )
            )
    pieces.append(
        TowerSpec("lamp", Archetype.SUPPORT, cost=10, range=0.0, damage=0.0, firerate=1.0,
                  upgrade_cost=5, effect_params={"support_buff": 0.0}, display_name="Lamp")
    )
    return pieces


def _object_manipulation() -> SessionConfig:
    walls = [(x, 5) for x in range(1, 10) if x != 6] + [(5, y) for y in range(6, 10)]
    level = LevelSpec(
        name="furnish",
        map=_make_map(10, 10, {}, base_cell=(0, 0), blocked=walls),
        spawn_scripts=[],
        starting_gold=500,
        starting_health=10,
        planning_seconds=240,
        preplaced_towers=[
            PreplacedTower("armchair_n", (8, 1)),
            PreplacedTower("table_n", (8, 2)),
            PreplacedTower("lamp", (8, 3)),
        ],
        reference_layout=[
            LayoutRef("armchair_n", (2, 2), "N"),
            LayoutRef("table_n", (4, 2), "N"),
            LayoutRef("lamp", (2, 7), ""),
        ],
    )
    return SessionConfig(
        name="object-manipulation",
        mode=GameMode.OBJECT_MANIPULATION,
        levels=[level],
        rounds_per_level=1,
        team=TeamSetup([
            TowerAssignment("guide", [], "#e6194b"),
            TowerAssignment("operator", ["armchair_n", "armchair_e", "table_n", "table_e", "lamp"], "#4363d8"),
        ]),
        tower_catalog=_standard_towers() + _furniture(),
        enemy_catalog=_standard_enemies(),
        comm=CommSettings(text_chat=False, voice=True),
        visibility=VisibilitySettings(tower_names=False, tower_descriptions=False),
        score=ScoreWeights(mode=ScoreMode.BINARY),
        solution_space_note="singleton layout: cell and orientation must both match",
    )


_BUILDERS = {
    "tutorial": _tutorial,
    "case-study": _case_study,
    "stress": _stress,
    "object-selection": _object_selection,
    "object-manipulation": _object_manipulation,
}
