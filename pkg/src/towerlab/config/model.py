"""Session and level configuration schema."""

from __future__ import annotations

from dataclasses import dataclass, field

from towerlab.sim.types import (
    Cell,
    EnemyVariant,
    GameMode,
    GridMap,
    MoneyModel,
    ScoreWeights,
    SellPolicy,
    SpawnScript,
    TowerSpec,
)

__all__ = [
    "ChecklistAnswers",
    "CommSettings",
    "LayoutRef",
    "LevelSpec",
    "PreplacedTower",
    "SellPolicy",
    "SessionConfig",
    "TeamSetup",
    "TowerAssignment",
    "VisibilitySettings",
]


@dataclass
class TowerAssignment:
    slot_id: str
    tower_ids: list[str]
    color: str  # hex, unique per slot


@dataclass
class TeamSetup:
    slots: list[TowerAssignment]

    @property
    def slot_ids(self) -> list[str]:
        return [s.slot_id for s in self.slots]

    def assignment(self, slot_id: str) -> TowerAssignment | None:
        for s in self.slots:
            if s.slot_id == slot_id:
                return s
        return None


@dataclass
class CommSettings:
    text_chat: bool = True
    voice: bool = False
    push_to_talk: bool = False


@dataclass
class VisibilitySettings:
    tower_names: bool = True
    tower_descriptions: bool = True
    coordinate_grid: bool = True
    spawn_preview: bool = True


@dataclass
class PreplacedTower:
    spec_id: str
    cell: Cell


@dataclass
class LayoutRef:
    """One reference item for layout-copy evaluation."""

    spec_id: str
    cell: Cell
    orientation: str = ""


@dataclass
class LevelSpec:
    name: str
    map: GridMap
    spawn_scripts: list[SpawnScript]
    starting_gold: int
    starting_health: int
    planning_seconds: float
    preplaced_towers: list[PreplacedTower] = field(default_factory=list)
    reference_layout: list[LayoutRef] = field(default_factory=list)
    selection_target: Cell | None = None
    min_win_cost: int | None = None  # authored cheapest-win annotation


@dataclass
class SessionConfig:
    name: str
    mode: GameMode
    levels: list[LevelSpec]
    rounds_per_level: int
    team: TeamSetup
    tower_catalog: list[TowerSpec]
    enemy_catalog: list[EnemyVariant]
    money_model: MoneyModel = MoneyModel.SHARED
    interact_during_attack: bool = False
    comm: CommSettings = field(default_factory=CommSettings)
    visibility: VisibilitySettings = field(default_factory=VisibilitySettings)
    score: ScoreWeights = field(default_factory=ScoreWeights)
    refund_rate_planning: float = 1.0
    refund_rate_attack: float = 0.75
    sell_policy: SellPolicy = SellPolicy.OWNER_ONLY
    solution_space_note: str = ""  # authored free-text for the design checklist

    def tower_spec(self, spec_id: str) -> TowerSpec | None:
        index = self.__dict__.get("_tower_index")
        if index is None or len(index) != len(self.tower_catalog):
            index = {spec.spec_id: spec for spec in self.tower_catalog}
            self.__dict__["_tower_index"] = index
        return index.get(spec_id)

    def enemy_variant(self, variant_id: str) -> EnemyVariant | None:
        index = self.__dict__.get("_enemy_index")
        if index is None or len(index) != len(self.enemy_catalog):
            index = {variant.variant_id: variant for variant in self.enemy_catalog}
            self.__dict__["_enemy_index"] = index
        return index.get(variant_id)

    @property
    def slot_ids(self) -> list[str]:
        return self.team.slot_ids


@dataclass
class ChecklistAnswers:
    """Design-checklist answers (Q1-Q10) derived from a config."""

    q1_evaluation: str
    q2_duration: str
    q3_repetition: str
    q4_team: str
    q5_role_symmetry: str
    q6_interdependence: str
    q7_solution_space: str
    q8_information: str
    q9_stress: str
    q10_medium: str

    def as_dict(self) -> dict[str, str]:
        return {
            "q1": self.q1_evaluation,
            "q2": self.q2_duration,
            "q3": self.q3_repetition,
            "q4": self.q4_team,
            "q5": self.q5_role_symmetry,
            "q6": self.q6_interdependence,
            "q7": self.q7_solution_space,
            "q8": self.q8_information,
            "q9": self.q9_stress,
            "q10": self.q10_medium,
        }
