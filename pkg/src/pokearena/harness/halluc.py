"""Type-chart hallucination test: 324 four-choice questions, one per type pair.

Each ordered (attack, defend) pair is posed as a four-way classification
(A super-effective 2x, B standard 1x, C ineffective 0.5x, D no effect 0x);
ground truth comes from the validated chart. Answers that parse to none of
the four classes land in a separate "invalid" column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from pokearena.dex import Pokedex, TYPE_NAMES, TypeChart

CLASSES = ("A", "B", "C", "D")
CLASS_OF_MULTIPLIER = {2.0: "A", 1.0: "B", 0.5: "C", 0.0: "D"}
CLASS_DESCRIPTIONS = {
    "A": "super-effective (2x damage)",
    "B": "standard (1x damage)",
    "C": "ineffective (0.5x damage)",
    "D": "no effect (0x damage)",
}

PROMPT_TEMPLATE = (
    "Determine if an attack of {attack} type is A. super-effective (2x damage), "
    "B. standard (1x damage), C. ineffective (0.5x damage) or D. no effect "
    "(0x damage) against a {defend}-type Pokemon. "
    "Answer with a single letter: A, B, C, or D."
)

_LETTER = re.compile(r"\b([ABCD])\b")
_KEYWORDS = (
    ("super-effective", "A"),
    ("no effect", "D"),
    ("ineffective", "C"),
    ("standard", "B"),
)


@dataclass
class ConfusionMatrix:
    """4x4 class confusion counts plus an invalid column, over the 324 pairs."""

    counts: dict = field(default_factory=lambda: {
        t: {p: 0 for p in (*CLASSES, "invalid")} for t in CLASSES})

    def add(self, truth: str, predicted: str) -> None:
        self.counts[truth][predicted] += 1

    @property
    def total(self) -> int:
        return sum(sum(row.values()) for row in self.counts.values())

    @property
    def correct(self) -> int:
        return sum(self.counts[c][c] for c in CLASSES)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def invalid(self) -> int:
        return sum(self.counts[c]["invalid"] for c in CLASSES)

    def row_sums(self) -> tuple[int, int, int, int]:
        return tuple(sum(self.counts[c].values()) for c in CLASSES)  # type: ignore[return-value]

    def diagonal(self) -> tuple[int, int, int, int]:
        return tuple(self.counts[c][c] for c in CLASSES)  # type: ignore[return-value]

    def to_dict(self) -> dict:
        return {
            "counts": self.counts,
            "accuracy": self.accuracy,
            "correct": self.correct,
            "total": self.total,
            "invalid": self.invalid,
        }


def build_prompt(attack: str, defend: str) -> str:
    return PROMPT_TEMPLATE.format(attack=attack, defend=defend)


def parse_answer(raw: str) -> str:
    """First A-D letter in the reply, else a keyword match, else invalid."""
    match = _LETTER.search(raw)
    if match:
        return match.group(1)
    lowered = raw.lower()
    for keyword, cls in _KEYWORDS:
        if keyword in lowered:
            return cls
    return "invalid"


def hallucination_test(endpoint, dex: Pokedex) -> ConfusionMatrix:
    """Query every ordered type pair through the endpoint; score vs the chart."""
    matrix = ConfusionMatrix()
    for attack in TYPE_NAMES:
        for defend in TYPE_NAMES:
            truth = CLASS_OF_MULTIPLIER[dex.chart.single(attack, defend)]
            raw = endpoint.complete(build_prompt(attack, defend),
                                    temperature=0.0, max_tokens=8)
            matrix.add(truth, parse_answer(raw))
    return matrix


class ChartOracleEndpoint:
    """Perfect answers computed from the chart by parsing the question."""

    _ATTACK = re.compile(r"attack of (\w+) type")
    _DEFEND = re.compile(r"against an? (\w+)-type")

    def __init__(self, chart: TypeChart):
        self.chart = chart

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        attack = self._ATTACK.search(prompt)
        defend = self._DEFEND.search(prompt)
        if not attack or not defend:
            return "invalid question"
        multiplier = self.chart.single(attack.group(1), defend.group(1))
        return CLASS_OF_MULTIPLIER[multiplier]


class ConstantAnswerEndpoint:
    """Always answers the same letter (e.g. the majority-class baseline B)."""

    def __init__(self, answer: str):
        self.answer = answer

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        return self.answer
