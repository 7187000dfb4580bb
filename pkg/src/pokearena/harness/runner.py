"""Batch battle runner with derived per-battle seeds and persisted logs."""

from __future__ import annotations

import hashlib
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from pokearena import baselines
from pokearena.agent import LLMAgent, PolicyConfig, PolicyOracleEndpoint
from pokearena.dex import Pokedex, load_bundled, load_pokedex
from pokearena.engine import (
    BattleState,
    PHASE_FORCED_SWITCH,
    battle_score,
    forced_switch,
    new_battle,
    random_team,
    step,
)
from pokearena.harness.battlelog import team_spec, write_battle_log
from pokearena.harness.metrics import MetricsReport, SwitchStats, switch_metrics

logger = logging.getLogger(__name__)

ATTRITION_MIN_RECOVERIES = 3
ATTRITION_MIN_TURNS = 25


def derive_seed(master: int, index: int, stream: str = "battle") -> int:
    """Stable per-battle seed: sha256 over (master, index, stream)."""
    digest = hashlib.sha256(f"{master}:{index}:{stream}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class EndpointSpec:
    """How to build a completion endpoint inside a worker process."""

    kind: str = "none"  # none | http | oracle
    base_url: str = ""
    model: str = ""
    oracle: str = "maxpower"
    temperature: Optional[float] = None


def build_policy(spec: str, seed: int, endpoint_spec: EndpointSpec,
                 icrl: bool = False, kag: str = "none"):
    """Instantiate a policy from its CLI spec string.

    Specs: random | maxpower | bot | io | cot | sc:K | tot:K | oracle:NAME.
    ``oracle:NAME`` runs the full LLM pipeline against a baseline-backed
    endpoint; io/cot/sc/tot need an HTTP endpoint configured.
    """
    if spec == "random":
        return baselines.RandomPolicy(seed)
    if spec == "maxpower":
        return baselines.MaxPowerPolicy()
    if spec == "bot":
        return baselines.HeuristicBotPolicy()

    strategy, _, arg = spec.partition(":")
    if strategy == "oracle":
        base = arg or endpoint_spec.oracle
        endpoint = PolicyOracleEndpoint(_baseline_fn(base, seed))
        config = PolicyConfig(strategy="io", icrl=icrl, kag=kag)
        return LLMAgent(config, endpoint, name=spec)
    if strategy in ("io", "cot", "sc", "tot"):
        k = int(arg) if arg else (3 if strategy in ("sc", "tot") else 1)
        config = PolicyConfig(strategy=strategy, k=k, icrl=icrl, kag=kag,
                              temperature=endpoint_spec.temperature)
        if endpoint_spec.kind != "http":
            raise ValueError(
                f"strategy {strategy!r} needs an LLM endpoint; pass --endpoint-url/--model "
                "or use an oracle:* or baseline agent")
        from pokearena.agent import HttpEndpoint
        endpoint = HttpEndpoint(endpoint_spec.base_url, endpoint_spec.model)
        return LLMAgent(config, endpoint, name=spec)
    raise ValueError(f"unknown agent spec {spec!r}")


def _baseline_fn(name: str, seed: int):
    if name == "maxpower":
        return baselines.maxpower_policy
    if name == "bot":
        return baselines.heuristic_bot
    if name == "random":
        rng = random.Random(seed)
        return lambda state, side: baselines.random_policy(state, side, rng)
    raise ValueError(f"unknown oracle baseline {name!r}")


@dataclass
class BattleOutcome:
    index: int
    seed: int
    winner: Optional[int]
    reason: str
    scores: tuple[int, int]
    turns: int
    switch_stats: tuple[SwitchStats, SwitchStats]
    attrition: tuple[bool, bool]
    log_path: Optional[str] = None


def play_battle(dex: Pokedex, policy_a, policy_b, seed: int,
                turn_cap: int = 200) -> BattleState:
    """Run one battle to completion with random teams drawn from the seed."""
    rng = random.Random(seed)
    team_a = random_team(rng, dex)
    team_b = random_team(rng, dex)
    state = new_battle(dex, team_a, team_b, seed, turn_cap=turn_cap)
    return run_to_completion(state, policy_a, policy_b)


def run_to_completion(state: BattleState, policy_a, policy_b) -> BattleState:
    policies = {0: policy_a, 1: policy_b}
    for side, policy in policies.items():
        policy.start_battle(state, side)
    while not state.finished:
        if state.phase == PHASE_FORCED_SWITCH:
            for side in list(state.pending_switches):
                if state.finished:
                    break
                forced_switch(state, side, policies[side].choose(state, side))
        else:
            action_a = policy_a.choose(state, 0)
            action_b = policy_b.choose(state, 1)
            step(state, action_a, action_b)
    return state


def classify_attrition(records, side: int = 0,
                       min_recoveries: int = ATTRITION_MIN_RECOVERIES,
                       min_turns: int = ATTRITION_MIN_TURNS,
                       dex: Optional[Pokedex] = None) -> bool:
    """Heuristic attrition tag: the opponent leaned on recovery over a long game.

    True iff the opposing side used recovery-class moves (any move with a
    self-heal effect) at least ``min_recoveries`` times and the battle lasted
    at least ``min_turns`` turns. Thresholds are configurable; this is a
    documented heuristic, not ground truth.
    """
    dex = dex or load_bundled()
    opponent = 1 - side
    turns = 0
    recoveries = 0
    for record in records:
        if record.kind == "turn":
            turns = max(turns, record.turn)
        for event in record.events:
            if event.get("type") != "move" or event.get("side") != opponent:
                continue
            move = dex.moves.get(event.get("move", ""))
            if move and any(e["kind"] == "heal" for e in move.effects):
                recoveries += 1
    return recoveries >= min_recoveries and turns >= min_turns


@dataclass
class RunConfig:
    agent_a: str = "maxpower"
    agent_b: str = "random"
    n: int = 10
    seed: int = 1
    icrl: bool = False
    kag: str = "none"
    endpoint: EndpointSpec = field(default_factory=EndpointSpec)
    turn_cap: int = 200
    out_dir: Optional[str] = None
    workers: int = 1
    draws_as_losses: bool = False
    data_dir: Optional[str] = None


def _run_one(config: RunConfig, index: int) -> BattleOutcome:
    dex = load_pokedex(config.data_dir) if config.data_dir else load_bundled()
    battle_seed = derive_seed(config.seed, index)
    policy_a = build_policy(config.agent_a, derive_seed(config.seed, index, "policy_a"),
                            config.endpoint, config.icrl, config.kag)
    policy_b = build_policy(config.agent_b, derive_seed(config.seed, index, "policy_b"),
                            config.endpoint)
    rng = random.Random(battle_seed)
    team_a = random_team(rng, dex)
    team_b = random_team(rng, dex)
    state = new_battle(dex, team_a, team_b, battle_seed, turn_cap=config.turn_cap)
    run_to_completion(state, policy_a, policy_b)

    scores = (battle_score(state, 0), battle_score(state, 1))
    turns = state.field.turn_number - 1
    stats = (switch_metrics(state.log, 0), switch_metrics(state.log, 1))
    attrition = (classify_attrition(state.log, 0, dex=dex),
                 classify_attrition(state.log, 1, dex=dex))

    log_path = None
    if config.out_dir:
        log_path = str(Path(config.out_dir) / "logs" / f"battle_{index:04d}.jsonl")
        header = {
            "battle_index": index,
            "seed": battle_seed,
            "master_seed": config.seed,
            "turn_cap": config.turn_cap,
            "policies": [config.agent_a, config.agent_b],
            "teams": [team_spec(state.side(0).team), team_spec(state.side(1).team)],
        }
        result = {
            "winner": state.winner,
            "reason": state.finish_reason,
            "scores": list(scores),
            "turns": turns,
            "final_hp": state.hp_snapshot(),
        }
        decisions = _decision_traces(policy_a, policy_b)
        if decisions:
            result["decisions"] = decisions
        write_battle_log(Path(log_path), header, state.log, result)
    return BattleOutcome(
        index=index, seed=battle_seed, winner=state.winner, reason=state.finish_reason,
        scores=scores, turns=turns, switch_stats=stats, attrition=attrition,
        log_path=log_path,
    )


def _decision_traces(policy_a, policy_b) -> dict:
    traces = {}
    for key, policy in (("a", policy_a), ("b", policy_b)):
        if isinstance(policy, LLMAgent) and policy.decisions:
            traces[key] = [d.to_dict() for d in policy.decisions]
    return traces


def run_battles(config: RunConfig) -> tuple[MetricsReport, list[BattleOutcome]]:
    """Run n independent battles and aggregate the metrics report.

    A hard failure (e.g. an exhausted or broken endpoint) aborts the battles
    that have not run yet; the report then covers the completed ones and is
    flagged partial.
    """
    if config.n < 1:
        raise ValueError("n must be >= 1")
    indices = list(range(config.n))
    outcomes: list[BattleOutcome] = []
    aborted = 0
    if config.workers > 1:
        try:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                outcomes = list(pool.map(_run_one, [config] * len(indices), indices))
        except Exception as exc:
            logger.error("battle worker failed, aborting the run: %s", exc)
            aborted = config.n - len(outcomes)
    else:
        for i in indices:
            try:
                outcomes.append(_run_one(config, i))
            except Exception as exc:
                logger.error("battle %d failed, aborting the remaining %d: %s",
                             i, config.n - i, exc)
                aborted = config.n - i
                break
    if not outcomes:
        raise RuntimeError("no battle completed; cannot build a report")
    outcomes.sort(key=lambda o: o.index)

    wins_a = sum(1 for o in outcomes if o.winner == 0)
    wins_b = sum(1 for o in outcomes if o.winner == 1)
    draws = sum(1 for o in outcomes if o.winner is None)
    stats_a, stats_b = SwitchStats(), SwitchStats()
    attrition_a = attrition_b = 0
    for o in outcomes:
        stats_a.merge(o.switch_stats[0])
        stats_b.merge(o.switch_stats[1])
        attrition_a += o.attrition[0]
        attrition_b += o.attrition[1]
    n = len(outcomes)
    report = MetricsReport(
        matchup=f"{config.agent_a} vs {config.agent_b}",
        player_a=config.agent_a,
        player_b=config.agent_b,
        battles=n,
        decided=n - draws,
        draws=draws,
        aborted=aborted,
        wins_a=wins_a,
        wins_b=wins_b,
        mean_score_a=sum(o.scores[0] for o in outcomes) / n,
        mean_score_b=sum(o.scores[1] for o in outcomes) / n,
        mean_turns=sum(o.turns for o in outcomes) / n,
        switch_stats={"a": stats_a.to_dict(), "b": stats_b.to_dict()},
        draws_as_losses=config.draws_as_losses,
        seed=config.seed,
        attrition={"vs_a": attrition_b, "vs_b": attrition_a},
        partial=aborted > 0,
    )
    return report, outcomes


def report_from_logs(out_dir: str | Path, dex: Optional[Pokedex] = None,
                     draws_as_losses: bool = False) -> MetricsReport:
    """Regenerate the metrics report from persisted battle logs alone.

    Every number is recomputed from the turn records (final HP snapshots,
    chosen actions, move events), not taken from the result lines, so a
    report always equals what the records imply.
    """
    from pokearena.harness.battlelog import read_battle_log

    dex = dex or load_bundled()
    log_dir = Path(out_dir) / "logs" if (Path(out_dir) / "logs").is_dir() else Path(out_dir)
    paths = sorted(log_dir.glob("battle_*.jsonl"))
    if not paths:
        raise FileNotFoundError(f"no battle logs under {log_dir}")

    outcomes = []
    header = None
    for path in paths:
        log = read_battle_log(path)
        header = log.header
        final_hp = log.records[-1].hp_after
        unfainted = [sum(1 for hp in side_hp if hp > 0) for side_hp in final_hp]
        fainted = [6 - u for u in unfainted]
        scores = (fainted[1] + unfainted[0], fainted[0] + unfainted[1])
        turns = max((r.turn for r in log.records if r.kind == "turn"), default=0)
        if unfainted[0] == 0 and unfainted[1] == 0:
            winner = None
        elif unfainted[1] == 0:
            winner = 0
        elif unfainted[0] == 0:
            winner = 1
        elif scores[0] > scores[1]:
            winner = 0  # turn-cap adjudication
        elif scores[1] > scores[0]:
            winner = 1
        else:
            winner = None
        stats = (switch_metrics(log.records, 0), switch_metrics(log.records, 1))
        attrition = (classify_attrition(log.records, 0, dex=dex),
                     classify_attrition(log.records, 1, dex=dex))
        outcomes.append(BattleOutcome(
            index=log.header["battle_index"], seed=log.seed, winner=winner,
            reason="", scores=scores, turns=turns, switch_stats=stats,
            attrition=attrition, log_path=str(path)))

    wins_a = sum(1 for o in outcomes if o.winner == 0)
    wins_b = sum(1 for o in outcomes if o.winner == 1)
    draws = sum(1 for o in outcomes if o.winner is None)
    stats_a, stats_b = SwitchStats(), SwitchStats()
    attrition_a = attrition_b = 0
    for o in outcomes:
        stats_a.merge(o.switch_stats[0])
        stats_b.merge(o.switch_stats[1])
        attrition_a += o.attrition[0]
        attrition_b += o.attrition[1]
    n = len(outcomes)
    policies = header["policies"]
    return MetricsReport(
        matchup=f"{policies[0]} vs {policies[1]}",
        player_a=policies[0],
        player_b=policies[1],
        battles=n,
        decided=n - draws,
        draws=draws,
        aborted=0,
        wins_a=wins_a,
        wins_b=wins_b,
        mean_score_a=sum(o.scores[0] for o in outcomes) / n,
        mean_score_b=sum(o.scores[1] for o in outcomes) / n,
        mean_turns=sum(o.turns for o in outcomes) / n,
        switch_stats={"a": stats_a.to_dict(), "b": stats_b.to_dict()},
        draws_as_losses=draws_as_losses,
        seed=header["master_seed"],
        attrition={"vs_a": attrition_b, "vs_b": attrition_a},
    )
