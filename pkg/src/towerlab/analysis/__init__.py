"""Offline analysis of session logs: heatmaps, spend series, chat statistics."""

from towerlab.analysis.heatmap import Heatmap, placement_heatmap
from towerlab.analysis.spend import RoundSummary, expenditure_series
from towerlab.analysis.chat import (
    AnnotationSet,
    SKILL_ORDER,
    SkillRow,
    parse_annotations,
    skill_summary,
    utterance_stats,
)

__all__ = [
    "AnnotationSet",
    "Heatmap",
    "RoundSummary",
    "SKILL_ORDER",
    "SkillRow",
    "expenditure_series",
    "parse_annotations",
    "placement_heatmap",
    "skill_summary",
    "utterance_stats",
]
