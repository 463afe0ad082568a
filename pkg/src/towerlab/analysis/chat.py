"""Chat statistics and skill-annotation summaries.

Tokenization is plain whitespace splitting, lowercased for the vocabulary;
averages therefore differ slightly from pipelines that use an NLP tokenizer.
Annotation files carry one line per annotated utterance:

    index<TAB>skill[,skill...]

where index counts the log's CHAT records from zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from towerlab.telemetry.records import LogRecord, RecordKind

#: Output order: social skills first, then cognitive.
SKILL_ORDER = [
    ("MAINTAINING_COMMUNICATION", "social"),
    ("SHARING_INFORMATION", "social"),
    ("ESTABLISHING_SHARED_UNDERSTANDING", "social"),
    ("NEGOTIATING", "social"),
    ("REPRESENTING_FORMULATING", "cognitive"),
    ("PLANNING", "cognitive"),
    ("EXECUTING_ACTIONS", "cognitive"),
    ("MONITORING", "cognitive"),
]
SKILL_NAMES = {name for name, _ in SKILL_ORDER}


@dataclass
class AnnotationSet:
    entries: dict[int, list[str]] = field(default_factory=dict)

    def add(self, index: int, skills: list[str]) -> None:
        self.entries[index] = skills


@dataclass
class SkillRow:
    skill: str
    dimension: str
    count: int
    mean_tokens: float | None  # None when no utterance carries the skill

    def mean_display(self) -> str:
        return "—" if self.mean_tokens is None else f"{self.mean_tokens:.1f}"


class AnnotationError(ValueError):
    pass


def parse_annotations(text: str) -> AnnotationSet:
    annotations = AnnotationSet()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        index_part, sep, skills_part = line.partition("\t")
        if not sep:
            raise AnnotationError(f"line {lineno}: expected index<TAB>skills")
        try:
            index = int(index_part)
        except ValueError:
            raise AnnotationError(f"line {lineno}: bad index {index_part!r}")
        skills = [s.strip().upper() for s in skills_part.split(",") if s.strip()]
        if not skills:
            raise AnnotationError(f"line {lineno}: no skills listed")
        for skill in skills:
            if skill not in SKILL_NAMES:
                raise AnnotationError(f"line {lineno}: unknown skill {skill!r}")
        annotations.add(index, skills)
    return annotations


def chat_texts(records: list[LogRecord]) -> list[str]:
    return [r.text for r in records if r.kind is RecordKind.CHAT]


def tokenize(text: str) -> list[str]:
    return text.split()


def utterance_stats(records: list[LogRecord]) -> tuple[int, int, float]:
    """(utterance count, vocabulary size, mean tokens per utterance)."""
    texts = chat_texts(records)
    total_tokens = 0
    vocabulary: set[str] = set()
    for text in texts:
        tokens = tokenize(text)
        total_tokens += len(tokens)
        vocabulary.update(token.lower() for token in tokens)
    count = len(texts)
    mean = total_tokens / count if count else 0.0
    return count, len(vocabulary), mean


def skill_summary(records: list[LogRecord], annotations: AnnotationSet) -> list[SkillRow]:
    """Per-skill utterance counts and token means, in presentation order.

    Multi-label utterances count once per assigned skill, so the counts can
    sum past the utterance count.
    """
    texts = chat_texts(records)
    for index in annotations.entries:
        if not 0 <= index < len(texts):
            raise AnnotationError(
                f"annotation index {index} outside the {len(texts)} chat records"
            )
    token_sums = {name: 0 for name, _ in SKILL_ORDER}
    counts = {name: 0 for name, _ in SKILL_ORDER}
    for index, skills in annotations.entries.items():
        n_tokens = len(tokenize(texts[index]))
        for skill in skills:
            counts[skill] += 1
            token_sums[skill] += n_tokens
    rows = []
    for name, dimension in SKILL_ORDER:
        count = counts[name]
        rows.append(
            SkillRow(
                skill=name,
                dimension=dimension,
                count=count,
                mean_tokens=(token_sums[name] / count) if count else None,
            )
        )
    return rows
