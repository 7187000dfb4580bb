"""Translate a battle state into the four-part text description for a policy.

The observation carries four sections (own team, opponent team, field, turn
history), the legal action menu with unique labels, and empty slots for
knowledge annotations and feedback that the agent fills in per its
configuration. Output is a pure function of (state, side, window, options):
identical inputs produce byte-identical text.

The turn history deliberately lists only the actions both sides took, not
their outcomes; outcome signals (damage, effectiveness, immunities) arrive
only through the feedback channel when it is enabled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from pokearena.engine import Action, BattleState, legal_actions
from pokearena.protocol import KnownState

DEFAULT_HISTORY_WINDOW = 5


@dataclass(frozen=True)
class LabeledAction:
    """A legal action, its unique menu label, and its display line."""

    action: Action
    kind: str  # "move" | "switch"
    label: str
    display: str
    power: int = 0


@dataclass
class Observation:
    own_team: str
    opponent_team: str
    field: str
    turn_history: str
    legal_actions: list[LabeledAction]
    feedback: list = field(default_factory=list)
    knowledge: list = field(default_factory=list)

    def sections(self) -> dict:
        return {
            "own_team": self.own_team,
            "opponent_team": self.opponent_team,
            "field": self.field,
            "turn_history": self.turn_history,
        }


def _percent(current: int, maximum: int) -> int:
    return round(100 * current / maximum)


def _stages_text(stages: dict) -> str:
    parts = [f"{stat}{value:+d}" for stat, value in stages.items() if value != 0]
    return " stages " + "/".join(parts) if parts else ""


def _status_text(status: str) -> str:
    return f" status {status}" if status and status != "none" else ""


def describe(
    source: Union[BattleState, KnownState],
    side: int = 0,
    window: int = DEFAULT_HISTORY_WINDOW,
) -> Observation:
    """Build the text observation for one side of a battle."""
    if isinstance(source, BattleState):
        return _describe_engine(source, side, window)
    return _describe_tracker(source, window)


def _describe_engine(state: BattleState, side: int, window: int) -> Observation:
    dex = state.dex
    own = state.side(side)
    opp = state.side(1 - side)

    own_lines = ["Own team:"]
    for i, mon in enumerate(own.team):
        marker = " [active]" if i == own.active_index and not mon.fainted else ""
        marker = " [fainted]" if mon.fainted else marker
        own_lines.append(
            f"- {mon.species} ({'/'.join(mon.types)}) HP {_percent(mon.current_hp, mon.max_hp)}%"
            f" atk {mon.atk} def {mon.dfn} spe {mon.spe}"
            f"{_status_text(mon.status)}{_stages_text(mon.stages)}{marker}"
        )
        moves = ", ".join(
            f"{m} ({dex.moves[m].type}, power {dex.moves[m].power})" for m in mon.moves
        )
        own_lines.append(f"  moves: {moves}")

    opp_lines = ["Opponent team:"]
    active_unfainted = not opp.active.fainted
    for i in sorted(opp.revealed):
        mon = opp.team[i]
        if i == opp.active_index and active_unfainted:
            opp_lines.append(
                f"- {mon.species} ({'/'.join(mon.types)}) HP {_percent(mon.current_hp, mon.max_hp)}%"
                f"{_status_text(mon.status)}{_stages_text(mon.stages)} [active]"
            )
            if mon.revealed_moves:
                opp_lines.append("  known moves: " + ", ".join(mon.revealed_moves))
        else:
            tag = " [fainted]" if mon.fainted else ""
            opp_lines.append(
                f"- {mon.species} ({'/'.join(mon.types)}) HP {_percent(mon.current_hp, mon.max_hp)}%"
                f"{_status_text(mon.status)}{tag}"
            )
    unrevealed = 6 - len(opp.revealed)
    if unrevealed:
        opp_lines.append(f"- {unrevealed} unrevealed Pokemon")

    field_lines = ["Battle field:"]
    if state.field.weather == "none":
        field_lines.append("- weather: none")
    else:
        field_lines.append(f"- weather: {state.field.weather} ({state.field.weather_turns} turns left)")
    for label, s in (("your side", side), ("opponent side", 1 - side)):
        hazards = state.side(s).hazards
        parts = [f"{kind} x{count}" for kind, count in sorted(hazards.items()) if count]
        field_lines.append(f"- hazards on {label}: " + (", ".join(parts) if parts else "none"))
    field_lines.append(f"- turn number: {state.field.turn_number}")

    history = _history_text(state, side, window)
    return Observation(
        own_team="\n".join(own_lines),
        opponent_team="\n".join(opp_lines),
        field="\n".join(field_lines),
        turn_history=history,
        legal_actions=_label_actions(state, side),
    )


def _history_text(state: BattleState, side: int, window: int) -> str:
    lines = ["Turn history (most recent last):"]
    shown = [r for r in state.log if r.kind in ("turn", "forced_switch")][-window:]
    if not shown:
        lines.append("- no previous turns")
        return "\n".join(lines)
    for record in shown:
        parts = []
        for s in sorted(record.actions):
            action = record.actions[s]
            who = "You" if s == side else "Opponent"
            if action["kind"] == "move":
                user = _mover_species(record, s)
                parts.append(f"{who} used {action['name']}" + (f" with {user}" if user else ""))
            else:
                target = _switch_target_species(state, record, s)
                forced = " (forced)" if action.get("forced") else ""
                parts.append(f"{who} switched to {target}{forced}")
        faints = [e for e in record.events if e.get("type") == "faint"]
        for e in faints:
            who = "Your" if e["side"] == side else "Opposing"
            parts.append(f"{who} {e['pokemon']} fainted")
        lines.append(f"- turn {record.turn}: " + "; ".join(parts) + ".")
    return "\n".join(lines)


def _mover_species(record, side: int) -> str:
    for e in record.events:
        if e.get("type") == "move" and e.get("side") == side:
            return e["pokemon"]
    return ""


def _switch_target_species(state: BattleState, record, side: int) -> str:
    slot = record.actions[side]["slot"]
    return state.side(side).team[slot].species


def _label_actions(state: BattleState, side: int) -> list[LabeledAction]:
    dex = state.dex
    labeled = []
    if state.finished:
        return labeled
    for action in legal_actions(state, side):
        if action.kind == "move":
            move = dex.moves[action.name]
            accuracy = f"{round(move.accuracy * 100)}%"
            if move.is_attack:
                display = f"move: {move.name} ({move.type} attack, power {move.power}, accuracy {accuracy})"
            else:
                display = f"move: {move.name} ({move.type} status, accuracy {accuracy})"
            labeled.append(LabeledAction(action=action, kind="move", label=move.name,
                                         display=display, power=move.power))
        else:
            mon = state.side(side).team[action.slot]
            display = (f"switch: {mon.species} ({'/'.join(mon.types)}, "
                       f"HP {_percent(mon.current_hp, mon.max_hp)}%)")
            labeled.append(LabeledAction(action=action, kind="switch", label=mon.species,
                                         display=display))
    return labeled


def _describe_tracker(tracker: KnownState, window: int) -> Observation:
    own_lines = ["Own team:"]
    request = tracker.own_request
    if request is not None:
        for entry in request.team():
            ident = entry.get("ident", "")
            name = ident.split(":")[-1].strip() or "?"
            condition = entry.get("condition", "")
            marker = " [active]" if entry.get("active") else ""
            marker = " [fainted]" if condition.endswith("fnt") else marker
            own_lines.append(f"- {name} ({condition}){marker}")
            if entry.get("moves"):
                own_lines.append("  moves: " + ", ".join(entry["moves"]))
    else:
        own_lines.append("- no request received yet")

    opp_lines = ["Opponent team:"]
    for name, mon in tracker.opponents.items():
        marker = " [active]" if name == tracker.opponent_active and not mon.fainted else ""
        marker = " [fainted]" if mon.fainted else marker
        status = f" status {mon.status}" if mon.status else ""
        boosts = _stages_text(mon.boosts)
        opp_lines.append(f"- {name} HP {round(mon.hp_fraction * 100)}%{status}{boosts}{marker}")
        if mon.observed_moves:
            opp_lines.append("  known moves: " + ", ".join(mon.observed_moves))
    unrevealed = 6 - tracker.revealed_count()
    if unrevealed > 0:
        opp_lines.append(f"- {unrevealed} unrevealed Pokemon")

    field_lines = ["Battle field:", f"- weather: {tracker.weather}", f"- turn number: {tracker.turn}"]

    history_lines = ["Turn history (most recent last):"]
    recent = tracker.log_queue[-window:]
    if not recent:
        history_lines.append("- no previous turns")
    for msg in recent:
        who = "You" if getattr(msg, "side", "") == tracker.own_side else "Opponent"
        if hasattr(msg, "move"):
            history_lines.append(f"- {who} used {msg.move} with {msg.pokemon}.")
        else:
            history_lines.append(f"- {who}: {type(msg).__name__} {getattr(msg, 'pokemon', '')}.")

    labeled = []
    if request is not None:
        for name in request.move_names():
            labeled.append(LabeledAction(action=Action.move(name), kind="move",
                                         label=name, display=f"move: {name}"))
        for slot, entry in enumerate(request.team()):
            if slot == 0 or entry.get("active"):
                continue
            if entry.get("condition", "").endswith("fnt"):
                continue
            name = entry.get("ident", "").split(":")[-1].strip()
            labeled.append(LabeledAction(action=Action.switch(slot), kind="switch",
                                         label=name, display=f"switch: {name}"))
    return Observation(
        own_team="\n".join(own_lines),
        opponent_team="\n".join(opp_lines),
        field="\n".join(field_lines),
        turn_history="\n".join(history_lines),
        legal_actions=labeled,
    )
