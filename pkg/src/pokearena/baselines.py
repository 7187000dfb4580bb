"""Non-LLM reference policies: Random, MaxPower, and the heuristic benchmark bot."""

from __future__ import annotations

import random
from typing import Optional

from pokearena.dex import Pokedex, effectiveness
from pokearena.engine import (
    Action,
    BattleState,
    PHASE_FORCED_SWITCH,
    PokemonInstance,
    legal_actions,
)

BOT_SWITCH_PENALTY = 0.8   # multiplier on a switch candidate's best attack score
BOT_MAX_BOOSTS = 2         # boost-move uses per Pokemon before the rung is skipped


def random_policy(state: BattleState, side: int, rng: random.Random) -> Action:
    """Uniform choice over the side's legal actions."""
    options = legal_actions(state, side)
    return options[rng.randrange(len(options))]


def maxpower_policy(state: BattleState, side: int) -> Action:
    """Highest-power move of the active Pokemon; never switches voluntarily.

    Ties break toward earlier dex order (movesets are stored in dex order).
    In a forced-switch phase, picks the first unfainted bench slot.
    """
    if state.phase == PHASE_FORCED_SWITCH:
        return Action.switch(state.side(side).unfainted_bench()[0])
    active = state.side(side).active
    best = max(active.moves, key=lambda m: state.dex.moves[m].power)
    return Action.move(best)


def _attack_score(dex: Pokedex, attacker: PokemonInstance, move_name: str,
                  opponent: PokemonInstance) -> float:
    move = dex.moves[move_name]
    if not move.is_attack:
        return 0.0
    mult = effectiveness(dex.chart, move.type, opponent.types)
    stab = 1.5 if move.type in attacker.types else 1.0
    return move.power * mult * stab


def _best_attack_score(dex: Pokedex, mon: PokemonInstance, opponent: PokemonInstance) -> float:
    return max((_attack_score(dex, mon, m, opponent) for m in mon.moves), default=0.0)


def _at_type_disadvantage(dex: Pokedex, mon: PokemonInstance, opponent: PokemonInstance) -> bool:
    return any(effectiveness(dex.chart, t, mon.types) >= 2 for t in opponent.types)


def _boost_uses(state: BattleState, side: int, mon: PokemonInstance) -> int:
    boost_moves = {m for m in mon.moves if _is_boost_move(state.dex, m)}
    if not boost_moves:
        return 0
    uses = 0
    for record in state.log:
        for event in record.events:
            if (event.get("type") == "move" and event.get("side") == side
                    and event.get("pokemon") == mon.species and event.get("move") in boost_moves):
                uses += 1
    return uses


def _is_boost_move(dex: Pokedex, move_name: str) -> bool:
    move = dex.moves[move_name]
    if move.is_attack:
        return False
    return any(
        eff["kind"] == "stat_stages" and eff.get("target") == "self"
        and all(v > 0 for v in eff["stages"].values())
        for eff in move.effects
    )


def _hazard_move(dex: Pokedex, mon: PokemonInstance, opponent_hazards: dict) -> Optional[str]:
    for m in mon.moves:
        for eff in dex.moves[m].effects:
            if eff["kind"] == "hazard" and opponent_hazards.get(eff["hazard"], 0) == 0:
                return m
    return None


def heuristic_bot(state: BattleState, side: int) -> Action:
    """Deterministic benchmark opponent.

    Priority ladder: set a missing entry hazard, then boost while healthy and
    not type-disadvantaged, otherwise pick the best of power x effectiveness
    x STAB over the active's attacks and penalized switch candidates.
    """
    if state.phase == PHASE_FORCED_SWITCH:
        bench = state.side(side).unfainted_bench()
        opponent = state.side(1 - side).active
        best = max(bench, key=lambda i: _best_attack_score(
            state.dex, state.side(side).team[i], opponent))
        return Action.switch(best)

    dex = state.dex
    own = state.side(side)
    active = own.active
    opponent = state.side(1 - side).active

    hazard = _hazard_move(dex, active, state.side(1 - side).hazards)
    if hazard is not None:
        return Action.move(hazard)

    unboosted = all(v <= 0 for v in active.stages.values())
    if unboosted and not _at_type_disadvantage(dex, active, opponent):
        if _boost_uses(state, side, active) < BOT_MAX_BOOSTS:
            for m in active.moves:
                if _is_boost_move(dex, m):
                    return Action.move(m)

    best_action = None
    best_score = float("-inf")
    for m in active.moves:
        score = _attack_score(dex, active, m, opponent)
        if score > best_score:
            best_score = score
            best_action = Action.move(m)
    for slot in own.unfainted_bench():
        candidate = own.team[slot]
        score = _best_attack_score(dex, candidate, opponent) * BOT_SWITCH_PENALTY
        if score > best_score:
            best_score = score
            best_action = Action.switch(slot)
    return best_action


class RandomPolicy:
    """Stateful wrapper holding a seeded generator."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def choose(self, state: BattleState, side: int) -> Action:
        return random_policy(state, side, self.rng)

    def start_battle(self, state: BattleState, side: int) -> None:
        pass


class MaxPowerPolicy:
    name = "maxpower"

    def choose(self, state: BattleState, side: int) -> Action:
        return maxpower_policy(state, side)

    def start_battle(self, state: BattleState, side: int) -> None:
        pass


class HeuristicBotPolicy:
    name = "bot"

    def choose(self, state: BattleState, side: int) -> Action:
        return heuristic_bot(state, side)

    def start_battle(self, state: BattleState, side: int) -> None:
        pass
