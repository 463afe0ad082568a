"""Domain types for the tower-defense simulation core.

Everything here is plain data. All game rules live in ``engine``; the only
logic in this module is coordinate geometry on maps and routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from towerlab.config.model import SessionConfig

TICK_RATE = 20
TICK_DT = 1.0 / TICK_RATE

Cell = tuple[int, int]


class CellKind(str, Enum):
    BUILDABLE = "BUILDABLE"
    PATH = "PATH"
    BLOCKED = "BLOCKED"
    BASE = "BASE"


class Phase(str, Enum):
    PLANNING = "PLANNING"
    ATTACK = "ATTACK"
    ENDED = "ENDED"


class Outcome(str, Enum):
    ONGOING = "ONGOING"
    WIN = "WIN"
    LOSE = "LOSE"


class GameMode(str, Enum):
    TOWER_DEFENSE = "TOWER_DEFENSE"
    OBJECT_SELECTION = "OBJECT_SELECTION"
    OBJECT_MANIPULATION = "OBJECT_MANIPULATION"


class MoneyModel(str, Enum):
    SHARED = "SHARED"
    INDIVIDUAL = "INDIVIDUAL"


class SellPolicy(str, Enum):
    OWNER_ONLY = "OWNER_ONLY"
    ANYONE = "ANYONE"


class Archetype(str, Enum):
    BASIC = "BASIC"
    POISON = "POISON"
    PIERCING = "PIERCING"
    SPLASH = "SPLASH"
    OBSTACLE = "OBSTACLE"
    SLOW = "SLOW"
    FEAR = "FEAR"
    SNIPER = "SNIPER"
    DISCOUNT = "DISCOUNT"
    SUPPORT = "SUPPORT"
    MULTISHOT = "MULTISHOT"
    MAP = "MAP"


#: Archetypes that acquire targets and fire. DISCOUNT and SUPPORT are passive
#: auras; OBSTACLE acts through its trap entity, never by shooting.
ATTACKING_ARCHETYPES = frozenset(
    {
        Archetype.BASIC,
        Archetype.POISON,
        Archetype.PIERCING,
        Archetype.SPLASH,
        Archetype.SLOW,
        Archetype.FEAR,
        Archetype.SNIPER,
        Archetype.MULTISHOT,
        Archetype.MAP,
    }
)


class Track(str, Enum):
    RANGE = "RANGE"
    DAMAGE = "DAMAGE"
    FIRERATE = "FIRERATE"


MAX_UPGRADE_LEVEL = 3

#: Per-level compounding stat multipliers for each upgrade track.
TRACK_MULTIPLIER = {
    Track.RANGE: 1.25,
    Track.DAMAGE: 1.5,
    Track.FIRERATE: 1.25,
}


class CommandKind(str, Enum):
    PLACE = "PLACE"
    SELL = "SELL"
    UPGRADE = "UPGRADE"
    READY = "READY"
    SELECT = "SELECT"


class EventKind(str, Enum):
    PLACED = "PLACED"
    SOLD = "SOLD"
    UPGRADED = "UPGRADED"
    SPAWNED = "SPAWNED"
    KILLED = "KILLED"
    LEAKED = "LEAKED"
    PHASE_CHANGED = "PHASE_CHANGED"
    ROUND_ENDED = "ROUND_ENDED"


class EffectKind(str, Enum):
    SLOW = "SLOW"
    POISON = "POISON"
    FEAR = "FEAR"


@dataclass
class PathRoute:
    """Authored enemy route: contiguous 4-adjacent cells ending at the base."""

    route_id: str
    waypoints: list[Cell]

    @property
    def total_length(self) -> int:
        return len(self.waypoints) - 1

    @property
    def spawn_cell(self) -> Cell:
        return self.waypoints[0]

    def position_at(self, progress: float) -> tuple[float, float]:
        """Interpolated map position (cell-center units) at route progress."""
        if progress <= 0:
            x, y = self.waypoints[0]
            return float(x), float(y)
        if progress >= self.total_length:
            x, y = self.waypoints[-1]
            return float(x), float(y)
        idx = int(progress)
        frac = progress - idx
        x0, y0 = self.waypoints[idx]
        x1, y1 = self.waypoints[idx + 1]
        return x0 + (x1 - x0) * frac, y0 + (y1 - y0) * frac

    def cell_index(self, progress: float) -> int:
        """Index of the waypoint cell the enemy currently occupies."""
        return max(0, min(self.total_length, int(math.floor(progress + 0.5))))


@dataclass
class GridMap:
    width: int
    height: int
    tiles: list[list[CellKind]]  # tiles[y][x]
    routes: list[PathRoute]
    base_cell: Cell

    def in_bounds(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def kind_at(self, cell: Cell) -> CellKind:
        x, y = cell
        return self.tiles[y][x]

    def route(self, route_id: str) -> PathRoute:
        index = self.__dict__.get("_route_index")
        if index is None or len(index) != len(self.routes):
            index = {r.route_id: r for r in self.routes}
            self.__dict__["_route_index"] = index
        return index[route_id]

    def buildable_cells(self) -> list[Cell]:
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.tiles[y][x] is CellKind.BUILDABLE
        ]


@dataclass
class EnemyVariant:
    variant_id: str
    max_health: float
    speed: float  # tiles/second
    points: int  # score points on kill
    bounty: int  # gold on kill


@dataclass
class SpawnScript:
    """Ordered enemy release plan for one spawn point."""

    script_id: str
    route_id: str
    entries: list[tuple[str, float]]  # (variant_id, seconds from attack start)


@dataclass
class TowerSpec:
    spec_id: str
    archetype: Archetype
    cost: int
    range: float  # tiles, Euclidean between cell centers
    damage: float  # hit points per shot
    firerate: float  # shots/second
    upgrade_cost: int = 0  # base cost of the first upgrade on any track
    effect_params: dict[str, float] = field(default_factory=dict)
    display_name: str = ""
    description: str = ""
    orientation: str = ""  # variant tag for layout-copy tasks

    def __post_init__(self) -> None:
        if self.upgrade_cost <= 0:
            self.upgrade_cost = max(1, self.cost // 2)
        if not self.display_name:
            self.display_name = self.spec_id


#: Archetype behaviour knobs; any key can be overridden per spec via
#: ``TowerSpec.effect_params``.
DEFAULT_EFFECT_PARAMS: dict[Archetype, dict[str, float]] = {
    Archetype.POISON: {"poison_dps": 5.0, "poison_duration": 3.0},
    Archetype.PIERCING: {"ray_halfwidth": 0.5},
    Archetype.SPLASH: {"splash_radius": 1.5},
    Archetype.SLOW: {"slow_multiplier": 0.5, "slow_duration": 2.0},
    Archetype.FEAR: {
        "fear_multiplier": 1.0,
        "fear_duration": 1.5,
        "fear_immunity": 5.0,
    },
    Archetype.SNIPER: {"reference_speed": 1.0, "speed_damage_cap": 3.0},
    Archetype.OBSTACLE: {
        "trap_charges": 10.0,
        "trap_recharge": 10.0,
    },
    Archetype.DISCOUNT: {"discount_multiplier": 0.8},
    Archetype.SUPPORT: {"support_buff": 0.2},
    Archetype.MULTISHOT: {"ray_halfwidth": 0.5},
    Archetype.MAP: {},
}


def effect_param(spec: TowerSpec, key: str) -> float:
    if key in spec.effect_params:
        return spec.effect_params[key]
    return DEFAULT_EFFECT_PARAMS.get(spec.archetype, {})[key]


@dataclass
class TowerInstance:
    tower_id: int
    spec_id: str
    owner: str  # player slot id; "" for pre-placed scenario towers
    cell: Cell
    levels: dict[Track, int] = field(
        default_factory=lambda: {Track.RANGE: 0, Track.DAMAGE: 0, Track.FIRERATE: 0}
    )
    cooldown_remaining: float = 0.0
    spent_total: int = 0  # purchase plus upgrades, for refunds


@dataclass
class TrapInstance:
    """On-track entity spawned by an OBSTACLE tower."""

    owner_tower_id: int
    cell: Cell
    charges: int
    max_charges: int
    recharge_remaining: float


@dataclass
class EffectState:
    kind: EffectKind
    magnitude: float
    remaining: float
    immunity_remaining: float = 0.0  # FEAR only; runs after the effect ends


@dataclass
class EnemyInstance:
    variant_id: str
    route_id: str
    progress: float  # tiles along route
    health: float
    spawn_index: int  # global spawn order
    active_effects: list[EffectState] = field(default_factory=list)

    def effect(self, kind: EffectKind) -> Optional[EffectState]:
        for eff in self.active_effects:
            if eff.kind is kind:
                return eff
        return None


@dataclass
class PendingSpawn:
    spawn_tick: int  # attack-relative tick on which the enemy appears
    script_id: str
    route_id: str
    variant_id: str


class ScoreMode(str, Enum):
    BINARY = "BINARY"
    LINEAR = "LINEAR"


@dataclass
class ScoreWeights:
    mode: ScoreMode = ScoreMode.LINEAR
    w_unspent: float = 1.0  # per gold left
    w_points: float = 1.0  # per kill point
    w_health: float = 10.0  # per remaining base hit point


@dataclass
class Command:
    issuer: str
    kind: CommandKind
    spec_id: str | None = None  # PLACE
    cell: Cell | None = None  # PLACE / SELL / UPGRADE / SELECT
    track: Track | None = None  # UPGRADE


@dataclass
class SimEvent:
    kind: EventKind
    tick: int
    details: dict[str, object] = field(default_factory=dict)


@dataclass
class GameState:
    """Authoritative snapshot of one round. Mutated in place by the engine."""

    config: "SessionConfig"
    level_index: int
    round_index: int
    mode: GameMode
    phase: Phase
    tick: int
    planning_remaining: float  # seconds
    attack_start_tick: int  # -1 until ATTACK begins
    money: dict[str, int]  # pool id -> gold ("team" under SHARED)
    health: int
    towers: list[TowerInstance]
    traps: list[TrapInstance]
    enemies: list[EnemyInstance]
    pending_spawns: list[PendingSpawn]
    spawn_cursor: int  # next pending_spawns index to release
    kill_points: int
    ready_flags: dict[str, bool]
    outcome: Outcome
    next_tower_id: int
    next_spawn_index: int
    planning_end_tick: int = 0
    selection_result: str = ""  # OBJECT_SELECTION: "", "correct", "incorrect"
    layout_score: float | None = None  # OBJECT_MANIPULATION result

    @property
    def sim_time(self) -> float:
        return self.tick * TICK_DT

    @property
    def total_money(self) -> int:
        return sum(self.money.values())

    def tower_at(self, cell: Cell) -> Optional[TowerInstance]:
        for t in self.towers:
            if t.cell == cell:
                return t
        return None

    def tower_by_id(self, tower_id: int) -> Optional[TowerInstance]:
        for t in self.towers:
            if t.tower_id == tower_id:
                return t
        return None

    def trap_at(self, cell: Cell) -> Optional[TrapInstance]:
        for trap in self.traps:
            if trap.cell == cell:
                return trap
        return None


def distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def round_gold(amount: float) -> int:
    """Nearest-gold rounding; exact halves round up, deterministically."""
    return int(math.floor(amount + 0.5))
