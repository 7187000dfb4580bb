"""Aggregate battle metrics: win rates, scores, turns, and switch consistency.

Switch consistency follows the active-switch definitions: forced switches
after a faint are not player actions and are excluded from both numerator
and denominator. CS1 is the fraction of active switches whose previous
chosen action was also a switch; CS2 allows either of the previous two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from pokearena.engine import TurnRecord


@dataclass
class SwitchStats:
    active_switches: int = 0
    cs1: int = 0
    cs2: int = 0
    total_turns: int = 0

    @property
    def switch_rate(self) -> float:
        return self.active_switches / self.total_turns if self.total_turns else 0.0

    @property
    def cs1_rate(self) -> float:
        return self.cs1 / self.active_switches if self.active_switches else 0.0

    @property
    def cs2_rate(self) -> float:
        return self.cs2 / self.active_switches if self.active_switches else 0.0

    def merge(self, other: "SwitchStats") -> None:
        self.active_switches += other.active_switches
        self.cs1 += other.cs1
        self.cs2 += other.cs2
        self.total_turns += other.total_turns

    def to_dict(self) -> dict:
        return {
            "active_switches": self.active_switches,
            "cs1": self.cs1,
            "cs2": self.cs2,
            "total_turns": self.total_turns,
            "switch_rate": self.switch_rate,
            "cs1_rate": self.cs1_rate,
            "cs2_rate": self.cs2_rate,
        }


def switch_metrics(records: Iterable[TurnRecord], side: int) -> SwitchStats:
    """Compute switch statistics for one side from its chosen-action stream."""
    actions = []
    for record in records:
        if record.kind != "turn":
            continue  # forced switches are not player actions
        action = record.actions.get(side) or record.actions.get(str(side))
        if action is None:
            raise ValueError(f"turn record {record.turn} lacks an action for side {side}")
        actions.append(action["kind"])
    stats = SwitchStats(total_turns=len(actions))
    for i, kind in enumerate(actions):
        if kind != "switch":
            continue
        stats.active_switches += 1
        if i >= 1 and actions[i - 1] == "switch":
            stats.cs1 += 1
        if (i >= 1 and actions[i - 1] == "switch") or (i >= 2 and actions[i - 2] == "switch"):
            stats.cs2 += 1
    return stats


def switch_metrics_from_kinds(kinds: Sequence[str]) -> SwitchStats:
    """Same computation over a bare chosen-action kind sequence (fixtures)."""
    records = [
        TurnRecord(turn=i + 1, kind="turn",
                   actions={0: {"kind": k}, 1: {"kind": "move"}},
                   events=[], hp_before=[], hp_after=[])
        for i, k in enumerate(kinds)
    ]
    return switch_metrics(records, side=0)


@dataclass
class MetricsReport:
    """Win rate / score / turn aggregates for one matchup, per Table-1 shape."""

    matchup: str
    player_a: str
    player_b: str
    battles: int
    decided: int
    draws: int
    aborted: int
    wins_a: int
    wins_b: int
    mean_score_a: float
    mean_score_b: float
    mean_turns: float
    switch_stats: dict  # "a"/"b" -> SwitchStats dict
    draws_as_losses: bool = False
    seed: int = 0
    attrition: dict = field(default_factory=dict)
    partial: bool = False

    @property
    def win_rate_a(self) -> float:
        denominator = self.battles if self.draws_as_losses else self.decided
        return self.wins_a / denominator if denominator else 0.0

    @property
    def win_rate_b(self) -> float:
        denominator = self.battles if self.draws_as_losses else self.decided
        return self.wins_b / denominator if denominator else 0.0

    def to_dict(self) -> dict:
        return {
            "matchup": self.matchup,
            "player_a": self.player_a,
            "player_b": self.player_b,
            "battles": self.battles,
            "decided": self.decided,
            "draws": self.draws,
            "aborted": self.aborted,
            "wins_a": self.wins_a,
            "wins_b": self.wins_b,
            "win_rate_a": self.win_rate_a,
            "win_rate_b": self.win_rate_b,
            "mean_score_a": self.mean_score_a,
            "mean_score_b": self.mean_score_b,
            "mean_turns": self.mean_turns,
            "switch_stats": self.switch_stats,
            "draws_as_losses": self.draws_as_losses,
            "seed": self.seed,
            "attrition": self.attrition,
            "partial": self.partial,
        }
