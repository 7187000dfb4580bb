"""Batch battle running, metrics, hallucination test, replay, and serving."""

from pokearena.harness.halluc import ConfusionMatrix, hallucination_test
from pokearena.harness.metrics import MetricsReport, SwitchStats, switch_metrics
from pokearena.harness.runner import classify_attrition, play_battle, run_battles

__all__ = [
    "ConfusionMatrix",
    "hallucination_test",
    "MetricsReport",
    "SwitchStats",
    "switch_metrics",
    "classify_attrition",
    "play_battle",
    "run_battles",
]
