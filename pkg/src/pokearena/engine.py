"""Deterministic turn-based battle engine.

Implements a simplified, four-stat (HP/Atk/Def/Spe) ruleset: simultaneous
action choice, switch-before-move resolution, priority then speed ordering
with seeded tie breaks, the fixed level-80 damage formula, status and
residual effects, entry hazards, ability hooks, fainting with forced
switches, and win detection with a turn cap.

All randomness flows through the battle's seeded generator, so identical
seeds and action streams replay bit-for-bit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from pokearena.dex import MoveDef, Pokedex, effectiveness

LEVEL = 80
TEAM_SIZE = 6
DEFAULT_TURN_CAP = 200
STAGE_MIN, STAGE_MAX = -6, 6

# End-of-turn residual fractions of max HP.
POISON_FRACTION = 1 / 8
TOXIC_FRACTION_STEP = 1 / 16
BURN_FRACTION = 1 / 16
SANDSTORM_FRACTION = 1 / 16

SANDSTORM_IMMUNE_TYPES = {"rock", "ground", "steel"}

# Major status a type cannot receive.
STATUS_TYPE_IMMUNITY = {
    "poison": {"poison", "steel"},
    "toxic": {"poison", "steel"},
    "burn": {"fire"},
    "paralysis": {"electric"},
    "freeze": {"ice"},
}

PARALYSIS_FAIL_CHANCE = 0.25
FREEZE_THAW_CHANCE = 0.20
LOW_HP_BOOST_THRESHOLD = 1 / 3
LOW_HP_BOOST_MULTIPLIER = 1.5
STAB_MULTIPLIER = 1.5
SWITCH_IN_HAZARD_FRACTION = 0.125


class EngineError(Exception):
    pass


class IllegalActionError(EngineError):
    def __init__(self, side: int, reason: str):
        super().__init__(f"illegal action for side {side}: {reason}")
        self.side = side
        self.reason = reason


def max_hp_at_level(base_hp: int, level: int = LEVEL) -> int:
    return math.floor(2 * base_hp * level / 100) + level + 10

def stat_at_level(base: int, level: int = LEVEL) -> int:
    return math.floor(2 * base * level / 100) + 5

def stage_multiplier(stage: int) -> float:
    return (2 + stage) / 2 if stage >= 0 else 2 / (2 - stage)


@dataclass(frozen=True)
class Action:
    """A player's chosen action: use a move or switch to a team slot."""

    kind: str  # "move" | "switch"
    name: str = ""  # move name for kind == "move"
    slot: int = -1  # team slot 0-5 for kind == "switch"

    @staticmethod
    def move(name: str) -> "Action":
        return Action(kind="move", name=name)

    @staticmethod
    def switch(slot: int) -> "Action":
        return Action(kind="switch", slot=slot)

    @property
    def label(self) -> str:
        return self.name if self.kind == "move" else f"slot {self.slot}"

    def to_dict(self) -> dict:
        if self.kind == "move":
            return {"kind": "move", "name": self.name}
        return {"kind": "switch", "slot": self.slot}

    @staticmethod
    def from_dict(data: dict) -> "Action":
        if data["kind"] == "move":
            return Action.move(data["name"])
        return Action.switch(data["slot"])


@dataclass
class PokemonInstance:
    """One battling Pokemon: resolved stats, moveset, and battle condition."""

    species: str
    types: tuple[str, ...]
    ability: str
    max_hp: int
    atk: int
    dfn: int
    spe: int
    moves: list[str]
    current_hp: int = -1
    stages: dict = field(default_factory=lambda: {"atk": 0, "def": 0, "spe": 0})
    status: str = "none"
    status_counter: int = 0  # toxic: turns poisoned; sleep: turns remaining
    volatiles: dict = field(default_factory=dict)  # flag -> turns left (0 = this turn only)
    protect_streak: int = 0
    revealed_moves: list[str] = field(default_factory=list)
    fainted: bool = False

    def __post_init__(self) -> None:
        if self.current_hp < 0:
            self.current_hp = self.max_hp

    @property
    def hp_fraction(self) -> float:
        return self.current_hp / self.max_hp

    def effective_atk(self, dex: Pokedex) -> float:
        value = self.atk * stage_multiplier(self.stages["atk"])
        ability = dex.abilities[self.ability]
        if ability.hook("status_attack_boost") and self.status != "none":
            value *= 1.5
        return value

    def effective_def(self) -> float:
        return self.dfn * stage_multiplier(self.stages["def"])

    def effective_spe(self, dex: Pokedex, weather: str) -> float:
        value = self.spe * stage_multiplier(self.stages["spe"])
        if self.status == "paralysis":
            value *= 0.5
        hook = dex.abilities[self.ability].hook("weather_speed_boost")
        if hook and hook["weather"] == weather:
            value *= 2
        return value

    def is_grounded(self, dex: Pokedex) -> bool:
        if "flying" in self.types:
            return False
        if "magnet_rise" in self.volatiles:
            return False
        hook = dex.abilities[self.ability].hook("type_immunity")
        if hook and hook["type"] == "ground":
            return False
        return True

    def reset_on_switch_out(self, dex: Pokedex) -> None:
        self.stages = {"atk": 0, "def": 0, "spe": 0}
        self.volatiles = {}
        self.protect_streak = 0
        if self.status == "toxic":
            self.status_counter = 0
        if dex.abilities[self.ability].hook("cure_on_switch") and self.status != "none":
            self.status = "none"
            self.status_counter = 0

    def to_dict(self) -> dict:
        return {
            "species": self.species,
            "types": list(self.types),
            "ability": self.ability,
            "max_hp": self.max_hp,
            "atk": self.atk,
            "def": self.dfn,
            "spe": self.spe,
            "moves": list(self.moves),
            "current_hp": self.current_hp,
            "stages": dict(self.stages),
            "status": self.status,
            "status_counter": self.status_counter,
            "volatiles": dict(self.volatiles),
            "protect_streak": self.protect_streak,
            "revealed_moves": list(self.revealed_moves),
            "fainted": self.fainted,
        }

    @staticmethod
    def from_dict(data: dict) -> "PokemonInstance":
        return PokemonInstance(
            species=data["species"],
            types=tuple(data["types"]),
            ability=data["ability"],
            max_hp=data["max_hp"],
            atk=data["atk"],
            dfn=data["def"],
            spe=data["spe"],
            moves=list(data["moves"]),
            current_hp=data["current_hp"],
            stages=dict(data["stages"]),
            status=data["status"],
            status_counter=data["status_counter"],
            volatiles=dict(data["volatiles"]),
            protect_streak=data["protect_streak"],
            revealed_moves=list(data["revealed_moves"]),
            fainted=data["fainted"],
        )


def make_instance(dex: Pokedex, species_name: str, moves: Sequence[str]) -> PokemonInstance:
    spec = dex.species[species_name]
    move_names = sorted(moves, key=dex.move_index)
    return PokemonInstance(
        species=spec.name,
        types=spec.types,
        ability=spec.ability,
        max_hp=max_hp_at_level(spec.base_hp),
        atk=stat_at_level(spec.base_atk),
        dfn=stat_at_level(spec.base_def),
        spe=stat_at_level(spec.base_spe),
        moves=list(move_names),
    )


def random_team(rng: random.Random, dex: Pokedex) -> list[PokemonInstance]:
    """Sample 6 distinct species uniformly, each with 4 distinct pool moves."""
    if len(dex.species_order) < TEAM_SIZE:
        raise EngineError(f"dex has {len(dex.species_order)} species; need at least {TEAM_SIZE}")
    names = rng.sample(list(dex.species_order), TEAM_SIZE)
    team = []
    for name in names:
        pool = list(dex.species[name].move_pool)
        chosen = rng.sample(pool, 4) if len(pool) > 4 else pool
        team.append(make_instance(dex, name, chosen))
    return team


@dataclass
class SideState:
    team: list[PokemonInstance]
    active_index: int = 0
    hazards: dict = field(default_factory=lambda: {"rocks": 0, "spikes": 0})
    revealed: set = field(default_factory=set)

    @property
    def active(self) -> PokemonInstance:
        return self.team[self.active_index]

    def unfainted_bench(self) -> list[int]:
        return [i for i, p in enumerate(self.team) if not p.fainted and i != self.active_index]

    def all_fainted(self) -> bool:
        return all(p.fainted for p in self.team)

    def to_dict(self) -> dict:
        return {
            "team": [p.to_dict() for p in self.team],
            "active_index": self.active_index,
            "hazards": dict(self.hazards),
            "revealed": sorted(self.revealed),
        }

    @staticmethod
    def from_dict(data: dict) -> "SideState":
        return SideState(
            team=[PokemonInstance.from_dict(p) for p in data["team"]],
            active_index=data["active_index"],
            hazards=dict(data["hazards"]),
            revealed=set(data["revealed"]),
        )


@dataclass
class FieldState:
    weather: str = "none"
    weather_turns: int = 0
    turn_number: int = 1

    def to_dict(self) -> dict:
        return {"weather": self.weather, "weather_turns": self.weather_turns, "turn_number": self.turn_number}

    @staticmethod
    def from_dict(data: dict) -> "FieldState":
        return FieldState(**data)


@dataclass
class TurnRecord:
    """Replayable record of one resolution step (turn, forced switch, or start)."""

    turn: int
    kind: str  # "start" | "turn" | "forced_switch"
    actions: dict  # side -> action dict (with "forced": True on forced switches)
    events: list
    hp_before: list
    hp_after: list

    def to_dict(self) -> dict:
        return {
            "turn": self.turn,
            "kind": self.kind,
            "actions": {str(k): v for k, v in self.actions.items()},
            "events": self.events,
            "hp_before": self.hp_before,
            "hp_after": self.hp_after,
        }

    @staticmethod
    def from_dict(data: dict) -> "TurnRecord":
        return TurnRecord(
            turn=data["turn"],
            kind=data["kind"],
            actions={int(k): v for k, v in data["actions"].items()},
            events=data["events"],
            hp_before=data["hp_before"],
            hp_after=data["hp_after"],
        )


PHASE_ACTIONS = "awaiting_actions"
PHASE_FORCED_SWITCH = "awaiting_forced_switch"
PHASE_FINISHED = "finished"


@dataclass
class BattleState:
    dex: Pokedex
    sides: list[SideState]
    field: FieldState
    rng: random.Random
    log: list[TurnRecord] = field(default_factory=list)
    phase: str = PHASE_ACTIONS
    pending_switches: list = field(default_factory=list)  # sides awaiting a forced switch
    winner: Optional[int] = None  # side index, or None (ongoing or draw)
    turn_cap: int = DEFAULT_TURN_CAP
    finish_reason: str = ""

    @property
    def finished(self) -> bool:
        return self.phase == PHASE_FINISHED

    def side(self, index: int) -> SideState:
        return self.sides[index]

    def hp_snapshot(self) -> list:
        return [[p.current_hp for p in s.team] for s in self.sides]

    def to_dict(self) -> dict:
        return {
            "sides": [s.to_dict() for s in self.sides],
            "field": self.field.to_dict(),
            "rng_state": _rng_state_to_json(self.rng.getstate()),
            "phase": self.phase,
            "pending_switches": list(self.pending_switches),
            "winner": self.winner,
            "turn_cap": self.turn_cap,
            "finish_reason": self.finish_reason,
            "log": [r.to_dict() for r in self.log],
        }

    @staticmethod
    def from_dict(dex: Pokedex, data: dict) -> "BattleState":
        rng = random.Random()
        rng.setstate(_rng_state_from_json(data["rng_state"]))
        return BattleState(
            dex=dex,
            sides=[SideState.from_dict(s) for s in data["sides"]],
            field=FieldState.from_dict(data["field"]),
            rng=rng,
            log=[TurnRecord.from_dict(r) for r in data["log"]],
            phase=data["phase"],
            pending_switches=list(data["pending_switches"]),
            winner=data["winner"],
            turn_cap=data["turn_cap"],
            finish_reason=data["finish_reason"],
        )


def _rng_state_to_json(state: tuple) -> list:
    version, internal, gauss = state
    return [version, list(internal), gauss]


def _rng_state_from_json(data: list) -> tuple:
    version, internal, gauss = data
    return (version, tuple(internal), gauss)


def new_battle(
    dex: Pokedex,
    team_a: Sequence[PokemonInstance],
    team_b: Sequence[PokemonInstance],
    seed: int,
    turn_cap: int = DEFAULT_TURN_CAP,
) -> BattleState:
    """Start a battle: lead Pokemon enter and on-entry abilities trigger."""
    if len(team_a) != TEAM_SIZE or len(team_b) != TEAM_SIZE:
        raise EngineError(f"each side needs exactly {TEAM_SIZE} Pokemon")
    state = BattleState(
        dex=dex,
        sides=[SideState(team=list(team_a)), SideState(team=list(team_b))],
        field=FieldState(),
        rng=random.Random(seed),
        turn_cap=turn_cap,
    )
    events: list = []
    hp_before = state.hp_snapshot()
    for side in (0, 1):
        state.side(side).revealed.add(state.side(side).active_index)
        events.append({
            "type": "switch", "side": side, "slot": state.side(side).active_index,
            "pokemon": state.side(side).active.species, "forced": False,
        })
    for side in (0, 1):
        _on_entry_abilities(state, side, events)
    state.log.append(TurnRecord(
        turn=0, kind="start", actions={}, events=events,
        hp_before=hp_before, hp_after=state.hp_snapshot(),
    ))
    return state


def legal_actions(state: BattleState, side: int) -> list[Action]:
    """Actions the given side may take right now."""
    if state.finished:
        raise EngineError("battle is finished")
    side_state = state.side(side)
    if state.phase == PHASE_FORCED_SWITCH:
        if side in state.pending_switches:
            return [Action.switch(i) for i in side_state.unfainted_bench()]
        return []
    actions = [Action.move(m) for m in side_state.active.moves]
    actions.extend(Action.switch(i) for i in side_state.unfainted_bench())
    return actions


def battle_score(state: BattleState, side: int) -> int:
    """Opponent's fainted count plus own unfainted count (0-12)."""
    if not state.finished:
        raise EngineError("battle_score requires a finished battle")
    return _score(state, side)


def _score(state: BattleState, side: int) -> int:
    opponent = state.side(1 - side)
    own = state.side(side)
    opponent_fainted = sum(1 for p in opponent.team if p.fainted)
    own_unfainted = sum(1 for p in own.team if not p.fainted)
    return opponent_fainted + own_unfainted


def damage(
    state: BattleState,
    attacker: PokemonInstance,
    defender: PokemonInstance,
    move: MoveDef,
    rng: random.Random,
) -> tuple[int, dict]:
    """HP loss of an attack move that already passed its accuracy roll.

    floor(floor(floor((2L/5 + 2) * power * Atk/Def) / 50) + 2)
      * STAB * type multiplier * burn halving * R,
    with L=80, STAB 1.5, R uniform over the 16 values 0.85..1.00, floored to
    an integer at the end. A 0x type multiplier deals no damage. Ability
    hooks adjust power (low-HP boost, low-power boost) and the final value
    (damage-halving defensive hooks).
    """
    if not move.is_attack:
        raise EngineError(f"{move.name} is a status move; damage() needs an attack move")
    dex = state.dex
    type_mult = effectiveness(dex.chart, move.type, defender.types)
    detail = {"multiplier": type_mult, "stab": move.type in attacker.types, "r": None}
    if type_mult == 0:
        return 0, detail

    power = move.power
    attacker_ability = dex.abilities[attacker.ability]
    boost = attacker_ability.hook("low_hp_type_boost")
    if boost and boost["type"] == move.type and attacker.hp_fraction <= LOW_HP_BOOST_THRESHOLD:
        power = math.floor(power * LOW_HP_BOOST_MULTIPLIER)
    weak_boost = attacker_ability.hook("low_power_boost")
    if weak_boost and move.power <= weak_boost["max_power"]:
        power = math.floor(power * weak_boost["multiplier"])

    atk = attacker.effective_atk(dex)
    dfn = defender.effective_def()
    base = math.floor(math.floor(math.floor((2 * LEVEL / 5 + 2) * power * atk / dfn) / 50) + 2)

    stab = STAB_MULTIPLIER if move.type in attacker.types else 1.0
    guts = attacker_ability.hook("status_attack_boost")
    burn_halving = 0.5 if attacker.status == "burn" and not guts else 1.0
    r = (85 + rng.randrange(16)) / 100
    detail["r"] = r

    value = base * stab * type_mult * burn_halving * r

    defender_ability = dex.abilities[defender.ability]
    resist = defender_ability.hook("type_resist")
    if resist and move.type in resist["types"]:
        value *= resist["multiplier"]
    full_hp = defender_ability.hook("full_hp_resist")
    if full_hp and defender.current_hp == defender.max_hp:
        value *= full_hp["multiplier"]

    return math.floor(value), detail


def step(state: BattleState, action_a: Action, action_b: Action) -> TurnRecord:
    """Resolve one full turn from both sides' simultaneous action choices.

    The state is updated in place; the appended TurnRecord is returned.
    """
    if state.phase != PHASE_ACTIONS:
        raise EngineError(f"step() requires phase {PHASE_ACTIONS}, not {state.phase}")
    actions = {0: action_a, 1: action_b}
    for side, action in actions.items():
        _check_legal(state, side, action)

    turn = state.field.turn_number
    events: list = []
    hp_before = state.hp_snapshot()

    # Chosen switches resolve before any move, faster side first.
    switchers = [s for s in (0, 1) if actions[s].kind == "switch"]
    switchers.sort(key=lambda s: _speed_key(state, s), reverse=True)
    if len(switchers) == 2 and _speed_tie(state, switchers[0], switchers[1]):
        if state.rng.random() < 0.5:
            switchers.reverse()
    for side in switchers:
        _perform_switch(state, side, actions[side].slot, events, forced=False)

    # Moves by priority, then effective speed, seeded coin flip on full ties.
    movers = [s for s in (0, 1) if actions[s].kind == "move"]
    order = _move_order(state, movers, actions)
    for side in order:
        _execute_move(state, side, actions[side].name, events)

    _end_of_turn(state, events)

    record = TurnRecord(
        turn=turn, kind="turn",
        actions={s: a.to_dict() for s, a in actions.items()},
        events=events, hp_before=hp_before, hp_after=state.hp_snapshot(),
    )
    state.log.append(record)
    state.field.turn_number += 1
    _resolve_faints_and_finish(state, events, record)
    return record


def forced_switch(state: BattleState, side: int, action: Action) -> TurnRecord:
    """Resolve a pending forced switch; does not consume the side's next action."""
    if state.phase != PHASE_FORCED_SWITCH or side not in state.pending_switches:
        raise IllegalActionError(side, "no forced switch pending")
    if action.kind != "switch":
        raise IllegalActionError(side, "forced switch requires a switch action")
    _check_legal(state, side, action)
    events: list = []
    hp_before = state.hp_snapshot()
    _perform_switch(state, side, action.slot, events, forced=True)
    state.pending_switches.remove(side)
    record = TurnRecord(
        turn=max(state.field.turn_number - 1, 0), kind="forced_switch",
        actions={side: {"kind": "switch", "slot": action.slot, "forced": True}},
        events=events, hp_before=hp_before, hp_after=state.hp_snapshot(),
    )
    state.log.append(record)
    _resolve_faints_and_finish(state, events, record)
    if not state.finished and not state.pending_switches:
        state.phase = PHASE_ACTIONS
    return record


def _check_legal(state: BattleState, side: int, action: Action) -> None:
    side_state = state.side(side)
    if action.kind == "move":
        if state.phase == PHASE_FORCED_SWITCH:
            raise IllegalActionError(side, "forced switch pending; only switches allowed")
        if action.name not in side_state.active.moves:
            raise IllegalActionError(side, f"active {side_state.active.species} does not know {action.name}")
    elif action.kind == "switch":
        if not 0 <= action.slot < TEAM_SIZE:
            raise IllegalActionError(side, f"switch slot {action.slot} out of range")
        if action.slot == side_state.active_index:
            raise IllegalActionError(side, "cannot switch to the already-active slot")
        if side_state.team[action.slot].fainted:
            raise IllegalActionError(side, f"switch target {side_state.team[action.slot].species} has fainted")
    else:
        raise IllegalActionError(side, f"unknown action kind {action.kind!r}")


def _speed_key(state: BattleState, side: int) -> float:
    return state.side(side).active.effective_spe(state.dex, state.field.weather)

def _speed_tie(state: BattleState, a: int, b: int) -> bool:
    return _speed_key(state, a) == _speed_key(state, b)


def _move_order(state: BattleState, movers: list[int], actions: dict) -> list[int]:
    if len(movers) < 2:
        return movers
    a, b = movers
    prio_a = state.dex.moves[actions[a].name].priority
    prio_b = state.dex.moves[actions[b].name].priority
    if prio_a != prio_b:
        return [a, b] if prio_a > prio_b else [b, a]
    spe_a, spe_b = _speed_key(state, a), _speed_key(state, b)
    if spe_a != spe_b:
        return [a, b] if spe_a > spe_b else [b, a]
    first = a if state.rng.random() < 0.5 else b
    return [first, a + b - first]


def _perform_switch(state: BattleState, side: int, slot: int, events: list, forced: bool) -> None:
    side_state = state.side(side)
    outgoing = side_state.active
    if not outgoing.fainted:
        outgoing.reset_on_switch_out(state.dex)
    side_state.active_index = slot
    side_state.revealed.add(slot)
    incoming = side_state.active
    events.append({
        "type": "switch", "side": side, "slot": slot,
        "pokemon": incoming.species, "forced": forced,
    })
    _apply_entry_hazards(state, side, events)
    if not incoming.fainted:
        _on_entry_abilities(state, side, events)


def _apply_entry_hazards(state: BattleState, side: int, events: list) -> None:
    side_state = state.side(side)
    mon = side_state.active
    if side_state.hazards.get("rocks"):
        mult = effectiveness(state.dex.chart, "rock", mon.types)
        amount = math.floor(mon.max_hp * SWITCH_IN_HAZARD_FRACTION * mult)
        if amount:
            _apply_damage_amount(state, side, mon, amount, events,
                                 {"type": "hazard_damage", "hazard": "rocks"})
        if mon.fainted:
            return
    layers = side_state.hazards.get("spikes", 0)
    if layers and mon.is_grounded(state.dex):
        amount = math.floor(mon.max_hp * SWITCH_IN_HAZARD_FRACTION * layers)
        if amount:
            _apply_damage_amount(state, side, mon, amount, events,
                                 {"type": "hazard_damage", "hazard": "spikes"})


def _on_entry_abilities(state: BattleState, side: int, events: list) -> None:
    mon = state.side(side).active
    ability = state.dex.abilities[mon.ability]
    weather_hook = ability.hook("weather_on_entry")
    if weather_hook and state.field.weather != weather_hook["weather"]:
        state.field.weather = weather_hook["weather"]
        state.field.weather_turns = 5
        events.append({"type": "ability", "side": side, "pokemon": mon.species, "ability": mon.ability})
        events.append({"type": "weather", "weather": state.field.weather, "turns": 5})
    if ability.hook("intimidate_on_entry"):
        target_side = 1 - side
        target = state.side(target_side).active
        if not target.fainted:
            events.append({"type": "ability", "side": side, "pokemon": mon.species, "ability": mon.ability})
            _apply_stage_change(state, target_side, target, {"atk": -1}, events, from_opponent=True)


def _apply_stage_change(
    state: BattleState, side: int, mon: PokemonInstance, stages: dict, events: list,
    from_opponent: bool = False,
) -> None:
    for stat, delta in stages.items():
        if delta < 0 and from_opponent:
            guard = state.dex.abilities[mon.ability].hook("prevent_stat_drop")
            if guard and guard["stat"] == stat:
                events.append({"type": "stat_drop_blocked", "side": side, "pokemon": mon.species,
                               "stat": stat, "ability": mon.ability})
                continue
        old = mon.stages[stat]
        new = max(STAGE_MIN, min(STAGE_MAX, old + delta))
        mon.stages[stat] = new
        events.append({"type": "boost", "side": side, "pokemon": mon.species,
                       "stat": stat, "delta": delta, "applied": new - old})


def _apply_damage_amount(
    state: BattleState, side: int, mon: PokemonInstance, amount: int, events: list, extra: dict,
) -> None:
    """Clamp, apply, and record an HP loss; emits faint when HP reaches zero."""
    survive = state.dex.abilities[mon.ability].hook("survive_full_hp")
    if survive and mon.current_hp == mon.max_hp and amount >= mon.max_hp and extra.get("type") == "damage":
        amount = mon.max_hp - 1
        extra = dict(extra, endured=True)
    amount = min(amount, mon.current_hp)
    mon.current_hp -= amount
    event = {"side": side, "pokemon": mon.species, "amount": amount, "hp_left": mon.current_hp}
    event.update(extra)
    events.append(event)
    if mon.current_hp == 0:
        mon.fainted = True
        events.append({"type": "faint", "side": side, "pokemon": mon.species})


def _heal(state: BattleState, side: int, mon: PokemonInstance, amount: int, events: list, cause: str) -> None:
    amount = min(amount, mon.max_hp - mon.current_hp)
    if amount <= 0:
        return
    mon.current_hp += amount
    events.append({"type": "heal", "side": side, "pokemon": mon.species,
                   "amount": amount, "hp_left": mon.current_hp, "cause": cause})


def _execute_move(state: BattleState, side: int, move_name: str, events: list) -> None:
    attacker = state.side(side).active
    if attacker.fainted:
        return  # move cancelled by fainting earlier in the turn
    defender_side = 1 - side
    defender = state.side(defender_side).active
    dex = state.dex
    move = dex.moves[move_name]

    if not _status_allows_move(state, side, attacker, events):
        return

    if move.name != "Protect":
        attacker.protect_streak = 0
    if move_name not in attacker.revealed_moves:
        attacker.revealed_moves.append(move_name)
    events.append({"type": "move", "side": side, "pokemon": attacker.species,
                   "move": move.name, "target": defender.species})

    targets_opponent = move.is_attack or any(
        eff.get("target") == "target" for eff in move.effects
    )
    if targets_opponent and defender.fainted:
        # switch-in hazards can faint the target before any move lands
        events.append({"type": "no_target", "side": side, "move": move.name})
        return
    if targets_opponent and "protected" in defender.volatiles:
        events.append({"type": "protected", "side": defender_side, "pokemon": defender.species,
                       "move": move.name})
        return

    # Immunity is announced before the accuracy roll, as in the source games.
    if targets_opponent and _immunity_event(state, defender_side, defender, move, events):
        return

    if not _accuracy_check(state, attacker, move):
        events.append({"type": "miss", "side": side, "pokemon": attacker.species, "move": move.name})
        return

    if move.is_attack:
        _execute_attack(state, side, attacker, defender_side, defender, move, events)
    else:
        _apply_move_effects(state, side, attacker, defender_side, defender, move, events, damage_dealt=0)


def _immunity_event(state: BattleState, defender_side: int, defender: PokemonInstance,
                    move: MoveDef, events: list) -> bool:
    """Emit the no-effect event if the defender is immune to this move."""
    immunity = state.dex.abilities[defender.ability].hook("type_immunity")
    if immunity and immunity["type"] == move.type:
        events.append({"type": "immune", "side": defender_side, "pokemon": defender.species,
                       "move": move.name, "multiplier": 0.0, "cause": "ability",
                       "ability": defender.ability})
        return True
    if move.type == "ground" and "magnet_rise" in defender.volatiles:
        events.append({"type": "immune", "side": defender_side, "pokemon": defender.species,
                       "move": move.name, "multiplier": 0.0, "cause": "magnet_rise"})
        return True
    if effectiveness(state.dex.chart, move.type, defender.types) == 0:
        events.append({"type": "immune", "side": defender_side, "pokemon": defender.species,
                       "move": move.name, "multiplier": 0.0, "cause": "type"})
        return True
    return False


def _status_allows_move(state: BattleState, side: int, mon: PokemonInstance, events: list) -> bool:
    if mon.status == "sleep":
        mon.status_counter -= 1
        if mon.status_counter <= 0:
            mon.status = "none"
            events.append({"type": "wake", "side": side, "pokemon": mon.species})
            return True
        events.append({"type": "cant_move", "side": side, "pokemon": mon.species, "cause": "sleep"})
        return False
    if mon.status == "freeze":
        if state.rng.random() < FREEZE_THAW_CHANCE:
            mon.status = "none"
            events.append({"type": "thaw", "side": side, "pokemon": mon.species})
            return True
        events.append({"type": "cant_move", "side": side, "pokemon": mon.species, "cause": "freeze"})
        return False
    if mon.status == "paralysis" and state.rng.random() < PARALYSIS_FAIL_CHANCE:
        events.append({"type": "cant_move", "side": side, "pokemon": mon.species, "cause": "paralysis"})
        return False
    return True


def _accuracy_check(state: BattleState, attacker: PokemonInstance, move: MoveDef) -> bool:
    if move.accuracy >= 1.0:
        return True
    if state.dex.abilities[attacker.ability].hook("perfect_accuracy"):
        return True
    return state.rng.random() < move.accuracy


def _execute_attack(
    state: BattleState, side: int, attacker: PokemonInstance,
    defender_side: int, defender: PokemonInstance, move: MoveDef, events: list,
) -> None:
    amount, detail = damage(state, attacker, defender, move, state.rng)
    _apply_damage_amount(state, defender_side, defender, amount, events, {
        "type": "damage", "move": move.name, "attacker_side": side,
        "multiplier": detail["multiplier"], "stab": detail["stab"],
    })
    _apply_move_effects(state, side, attacker, defender_side, defender, move, events, damage_dealt=amount)


def _apply_move_effects(
    state: BattleState, side: int, attacker: PokemonInstance,
    defender_side: int, defender: PokemonInstance, move: MoveDef, events: list,
    damage_dealt: int,
) -> None:
    dex = state.dex
    double = dex.abilities[attacker.ability].hook("double_effect_chance")
    for eff in move.effects:
        kind = eff["kind"]
        chance = eff.get("chance", 1.0)
        if chance < 1.0:
            roll_chance = min(1.0, chance * 2) if double else chance
            if state.rng.random() >= roll_chance:
                continue
        if kind == "drain":
            amount = math.floor(damage_dealt * eff.get("fraction", 0.5))
            if amount > 0 and not attacker.fainted:
                _heal(state, side, attacker, amount, events, cause="drain")
        elif kind == "heal":
            if not attacker.fainted:
                amount = math.floor(attacker.max_hp * eff["fraction"])
                _heal(state, side, attacker, amount, events, cause=move.name)
        elif kind == "stat_stages":
            if eff.get("target") == "self":
                if not attacker.fainted:
                    _apply_stage_change(state, side, attacker, eff["stages"], events)
            else:
                if not defender.fainted:
                    _apply_stage_change(state, defender_side, defender, eff["stages"], events,
                                        from_opponent=True)
        elif kind == "status":
            if not defender.fainted:
                _inflict_status(state, defender_side, defender, eff["status"], move, events)
        elif kind == "protect":
            _attempt_protect(state, side, attacker, events)
        elif kind == "hazard":
            target = state.side(defender_side)
            hazard = eff["hazard"]
            limit = 3 if hazard == "spikes" else 1
            if target.hazards[hazard] < limit:
                target.hazards[hazard] += 1
                events.append({"type": "hazard_set", "side": defender_side, "hazard": hazard,
                               "layers": target.hazards[hazard]})
        elif kind == "volatile":
            if not attacker.fainted:
                attacker.volatiles[eff["flag"]] = eff.get("turns", 1)
                events.append({"type": "volatile", "side": side, "pokemon": attacker.species,
                               "flag": eff["flag"], "turns": eff.get("turns", 1)})
        elif kind == "clear_stages":
            for s, mon in ((side, attacker), (defender_side, defender)):
                if not mon.fainted and any(v != 0 for v in mon.stages.values()):
                    mon.stages = {"atk": 0, "def": 0, "spe": 0}
                    events.append({"type": "clear_stages", "side": s, "pokemon": mon.species})
        elif kind == "cure_status":
            for s, mon in ((side, attacker), (defender_side, defender)):
                if not mon.fainted and mon.status != "none":
                    cured = mon.status
                    mon.status = "none"
                    mon.status_counter = 0
                    events.append({"type": "cure_status", "side": s, "pokemon": mon.species,
                                   "status": cured})
        elif kind == "weather":
            if state.field.weather != eff["weather"]:
                state.field.weather = eff["weather"]
                state.field.weather_turns = eff.get("turns", 5)
                events.append({"type": "weather", "weather": eff["weather"],
                               "turns": state.field.weather_turns})


def _inflict_status(
    state: BattleState, side: int, mon: PokemonInstance, status: str, move: MoveDef, events: list,
) -> None:
    if mon.status != "none":
        if not move.is_attack:
            events.append({"type": "status_blocked", "side": side, "pokemon": mon.species,
                           "status": status, "cause": "already_statused"})
        return
    if not move.is_attack and effectiveness(state.dex.chart, move.type, mon.types) == 0:
        events.append({"type": "immune", "side": side, "pokemon": mon.species,
                       "move": move.name, "multiplier": 0.0, "cause": "type"})
        return
    if any(t in STATUS_TYPE_IMMUNITY.get(status, ()) for t in mon.types):
        events.append({"type": "status_blocked", "side": side, "pokemon": mon.species,
                       "status": status, "cause": "type"})
        return
    immunity = state.dex.abilities[mon.ability].hook("status_immunity")
    if immunity and immunity["status"] == status:
        events.append({"type": "status_blocked", "side": side, "pokemon": mon.species,
                       "status": status, "cause": "ability"})
        return
    mon.status = status
    if status == "toxic":
        mon.status_counter = 0
    elif status == "sleep":
        mon.status_counter = state.rng.randint(1, 3)
    events.append({"type": "status", "side": side, "pokemon": mon.species, "status": status})


def _attempt_protect(state: BattleState, side: int, mon: PokemonInstance, events: list) -> None:
    success_chance = 1.0 / (2 ** mon.protect_streak)
    if success_chance >= 1.0 or state.rng.random() < success_chance:
        mon.volatiles["protected"] = 0
        mon.protect_streak += 1
        events.append({"type": "volatile", "side": side, "pokemon": mon.species,
                       "flag": "protected", "turns": 0})
    else:
        mon.protect_streak = 0
        events.append({"type": "protect_failed", "side": side, "pokemon": mon.species})


def _end_of_turn(state: BattleState, events: list) -> None:
    # Weather chip, then status residuals, then timers; fixed side order.
    if state.field.weather == "sandstorm":
        for side in (0, 1):
            mon = state.side(side).active
            if mon.fainted or any(t in SANDSTORM_IMMUNE_TYPES for t in mon.types):
                continue
            if state.dex.abilities[mon.ability].hook("weather_speed_boost") and \
               state.dex.abilities[mon.ability].hook("weather_speed_boost")["weather"] == "sandstorm":
                continue
            amount = math.floor(mon.max_hp * SANDSTORM_FRACTION)
            _apply_damage_amount(state, side, mon, amount, events,
                                 {"type": "residual", "cause": "sandstorm"})
    for side in (0, 1):
        mon = state.side(side).active
        if mon.fainted:
            continue
        if mon.status == "burn":
            amount = math.floor(mon.max_hp * BURN_FRACTION)
            _apply_damage_amount(state, side, mon, amount, events, {"type": "residual", "cause": "burn"})
        elif mon.status == "poison":
            amount = math.floor(mon.max_hp * POISON_FRACTION)
            _apply_damage_amount(state, side, mon, amount, events, {"type": "residual", "cause": "poison"})
        elif mon.status == "toxic":
            mon.status_counter += 1
            amount = math.floor(mon.max_hp * TOXIC_FRACTION_STEP * mon.status_counter)
            _apply_damage_amount(state, side, mon, amount, events, {"type": "residual", "cause": "toxic"})
    for side in (0, 1):
        mon = state.side(side).active
        expired = []
        for flag, turns in mon.volatiles.items():
            if flag == "protected":
                expired.append(flag)
            elif turns > 1:
                mon.volatiles[flag] = turns - 1
            else:
                expired.append(flag)
        for flag in expired:
            del mon.volatiles[flag]
            if flag != "protected":
                events.append({"type": "volatile_end", "side": side, "pokemon": mon.species, "flag": flag})
    if state.field.weather != "none":
        state.field.weather_turns -= 1
        if state.field.weather_turns <= 0:
            events.append({"type": "weather_end", "weather": state.field.weather})
            state.field.weather = "none"
            state.field.weather_turns = 0


def _resolve_faints_and_finish(state: BattleState, events: list, record: TurnRecord) -> None:
    finished_sides = [s for s in (0, 1) if state.side(s).all_fainted()]
    if finished_sides:
        state.phase = PHASE_FINISHED
        state.pending_switches = []
        if len(finished_sides) == 2:
            state.winner = None
            state.finish_reason = "double_knockout"
        else:
            state.winner = 1 - finished_sides[0]
            state.finish_reason = "all_fainted"
        record.events.append({"type": "win", "winner": state.winner, "reason": state.finish_reason})
        return
    pending = [s for s in (0, 1)
               if state.side(s).active.fainted and s not in state.pending_switches]
    state.pending_switches.extend(pending)
    if state.pending_switches:
        state.phase = PHASE_FORCED_SWITCH
        return
    if state.field.turn_number > state.turn_cap:
        state.phase = PHASE_FINISHED
        score_a, score_b = _score(state, 0), _score(state, 1)
        if score_a > score_b:
            state.winner = 0
        elif score_b > score_a:
            state.winner = 1
        else:
            state.winner = None
        state.finish_reason = "turn_cap"
        record.events.append({"type": "win", "winner": state.winner, "reason": "turn_cap"})


def replay_battle(
    dex: Pokedex,
    team_a: Sequence[PokemonInstance],
    team_b: Sequence[PokemonInstance],
    seed: int,
    records: Iterable[TurnRecord],
    turn_cap: int = DEFAULT_TURN_CAP,
) -> BattleState:
    """Re-run a battle from its teams, seed, and recorded action stream."""
    state = new_battle(dex, team_a, team_b, seed, turn_cap=turn_cap)
    for record in records:
        if record.kind == "start":
            continue
        if record.kind == "turn":
            step(state, Action.from_dict(record.actions[0]), Action.from_dict(record.actions[1]))
        elif record.kind == "forced_switch":
            (side,) = record.actions.keys()
            forced_switch(state, side, Action.switch(record.actions[side]["slot"]))
        else:
            raise EngineError(f"unknown record kind {record.kind!r}")
    return state
