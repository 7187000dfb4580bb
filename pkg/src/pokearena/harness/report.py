"""Report rendering: text tables, delimited/JSON files, and figures.

Tables mirror the familiar benchmark layouts (win rate / score / turns /
battles; switch-consistency; the 4x4 type confusion matrix). ``write_*``
functions emit report.txt, report.csv, report.json, and optionally PNG
figures alongside them.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from pokearena.harness.halluc import CLASSES, ConfusionMatrix  # noqa: E402
from pokearena.harness.metrics import MetricsReport  # noqa: E402


def render_metrics_table(report: MetricsReport) -> str:
    header = f"{'Player':<14} {'Win rate':>9} {'Score':>7} {'Turn #':>7} {'Battle #':>9}"
    rows = [
        (report.player_a, report.win_rate_a, report.mean_score_a),
        (report.player_b, report.win_rate_b, report.mean_score_b),
    ]
    lines = [f"Matchup: {report.matchup} (seed {report.seed})", header, "-" * len(header)]
    for player, win_rate, score in rows:
        lines.append(
            f"{player:<14} {win_rate * 100:>8.2f}% {score:>7.2f} "
            f"{report.mean_turns:>7.2f} {report.battles:>9d}"
        )
    if report.draws:
        lines.append(f"draws: {report.draws} (win rate over decided battles"
                     f"{' and draws' if report.draws_as_losses else ''})")
    return "\n".join(lines)


def render_switch_table(report: MetricsReport) -> str:
    header = f"{'Player':<14} {'Switch rate':>12} {'CS1 rate':>9} {'CS2 rate':>9}"
    lines = [header, "-" * len(header)]
    for key, player in (("a", report.player_a), ("b", report.player_b)):
        stats = report.switch_stats[key]
        lines.append(
            f"{player:<14} {stats['switch_rate'] * 100:>11.2f}% "
            f"{stats['cs1_rate'] * 100:>8.2f}% {stats['cs2_rate'] * 100:>8.2f}%"
        )
    return "\n".join(lines)


def render_confusion_table(matrix: ConfusionMatrix, model: str = "endpoint") -> str:
    lines = [f"Type advantage prediction confusion matrix ({model})",
             f"{'Class':<6} " + " ".join(f"{c:>5}" for c in CLASSES) + f" {'inv':>5}"]
    for truth in CLASSES:
        row = matrix.counts[truth]
        lines.append(f"{truth:<6} " + " ".join(f"{row[c]:>5d}" for c in CLASSES)
                     + f" {row['invalid']:>5d}")
    lines.append(f"accuracy: {matrix.accuracy * 100:.2f}% "
                 f"({matrix.correct}/{matrix.total}, invalid {matrix.invalid})")
    return "\n".join(lines)


def write_metrics_report(out_dir: Path, report: MetricsReport, outcomes,
                         make_figures: bool = True) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.json", "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    with open(out_dir / "report.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["battle", "seed", "winner", "reason", "score_a", "score_b", "turns"])
        for o in outcomes:
            writer.writerow([o.index, o.seed,
                             "" if o.winner is None else o.winner,
                             o.reason, o.scores[0], o.scores[1], o.turns])
    text = render_metrics_table(report) + "\n\n" + render_switch_table(report) + "\n"
    (out_dir / "report.txt").write_text(text, encoding="utf-8")
    if make_figures:
        _metrics_figures(out_dir / "figures", report, outcomes)


def _metrics_figures(fig_dir: Path, report: MetricsReport, outcomes) -> None:
    fig_dir.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(6, 4))
    scores_a = [o.scores[0] for o in outcomes]
    scores_b = [o.scores[1] for o in outcomes]
    bins = [x - 0.5 for x in range(14)]
    ax.hist([scores_a, scores_b], bins=bins, label=[report.player_a, report.player_b])
    ax.set_xlabel("battle score")
    ax.set_ylabel("battles")
    ax.set_title(f"Battle scores: {report.matchup}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(fig_dir / "scores.png", dpi=100)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist([o.turns for o in outcomes], bins=20)
    ax.set_xlabel("turns per battle")
    ax.set_ylabel("battles")
    ax.set_title(f"Battle lengths: {report.matchup}")
    fig.tight_layout()
    fig.savefig(fig_dir / "turns.png", dpi=100)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 4))
    labels = [report.player_a, report.player_b, "draw"]
    values = [report.wins_a, report.wins_b, report.draws]
    ax.bar(labels, values)
    ax.set_ylabel("battles won")
    ax.set_title(f"Outcomes: {report.matchup}")
    fig.tight_layout()
    fig.savefig(fig_dir / "outcomes.png", dpi=100)
    plt.close(fig)


def write_confusion_report(out_dir: Path, matrix: ConfusionMatrix, model: str,
                           make_figures: bool = True) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "confusion.json", "w", encoding="utf-8") as f:
        json.dump({"model": model, **matrix.to_dict()}, f, indent=2, sort_keys=True)
        f.write("\n")
    with open(out_dir / "confusion.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["truth", *CLASSES, "invalid"])
        for truth in CLASSES:
            row = matrix.counts[truth]
            writer.writerow([truth, *(row[c] for c in CLASSES), row["invalid"]])
    (out_dir / "confusion.txt").write_text(
        render_confusion_table(matrix, model) + "\n", encoding="utf-8")
    if make_figures:
        _confusion_figure(out_dir / "figures", matrix, model)


def _confusion_figure(fig_dir: Path, matrix: ConfusionMatrix, model: str) -> None:
    fig_dir.mkdir(parents=True, exist_ok=True)
    grid = [[matrix.counts[t][p] for p in CLASSES] for t in CLASSES]
    fig, ax = plt.subplots(figsize=(5, 4.5))
    image = ax.imshow(grid, cmap="Blues")
    ax.set_xticks(range(4), CLASSES)
    ax.set_yticks(range(4), CLASSES)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(f"Type prediction: {model} "
                 f"(accuracy {matrix.accuracy * 100:.1f}%)")
    for i in range(4):
        for j in range(4):
            ax.text(j, i, str(grid[i][j]), ha="center", va="center",
                    color="white" if grid[i][j] > matrix.total / 8 else "black")
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(fig_dir / "confusion.png", dpi=100)
    plt.close(fig)
