"""Environment configuration: schema, document format, validation, presets."""

from towerlab.config.model import (
    ChecklistAnswers,
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
from towerlab.config.document import ConfigError, parse_config, serialize_config
from towerlab.config.validate import ValidationIssue, validate_config
from towerlab.config.checklist import checklist_report
from towerlab.config.presets import PRESET_NAMES, builtin_preset

__all__ = [
    "ChecklistAnswers",
    "CommSettings",
    "ConfigError",
    "LayoutRef",
    "LevelSpec",
    "PreplacedTower",
    "PRESET_NAMES",
    "SellPolicy",
    "SessionConfig",
    "TeamSetup",
    "TowerAssignment",
    "ValidationIssue",
    "VisibilitySettings",
    "builtin_preset",
    "checklist_report",
    "parse_config",
    "serialize_config",
    "validate_config",
]
