"""Text feedback derived from turn transitions, the in-context "reward" channel.

Four kinds are generated from each resolved turn: HP changes over the turn,
the effectiveness class of every attack that connected, which side moved
first, and the concrete effects moves produced (boosts, heals, statuses,
volatiles). Everything is a pure function of the turn record and the
surrounding states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from pokearena.engine import BattleState, TurnRecord

SUPER_EFFECTIVE_THRESHOLD = 2.0


@dataclass(frozen=True)
class FeedbackItem:
    kind: str  # hp_change | effectiveness | execution_order | move_effect
    turn: int
    text: str


def effectiveness_class(multiplier: float) -> str:
    """Map a damage multiplier onto the four-way effectiveness vocabulary."""
    if multiplier >= SUPER_EFFECTIVE_THRESHOLD:
        return "super-effective"
    if multiplier == 1:
        return "standard"
    if multiplier > 0:
        return "ineffective"
    return "no effect"


def derive_feedback(
    prev_state: Optional[BattleState],
    record: TurnRecord,
    new_state: BattleState,
    side: int = 0,
) -> list[FeedbackItem]:
    """Feedback items for one turn, phrased from the given side's perspective."""
    state = new_state if new_state is not None else prev_state
    items: list[FeedbackItem] = []
    turn = record.turn

    def whose(s: int) -> str:
        return "Your" if s == side else "Opposing"

    # (1) HP change per Pokemon, as percent of its max HP. A Pokemon that was
    # hit by an attack still gets an item even if healing evened out the turn.
    attacked = {(e["side"], e["pokemon"]) for e in record.events
                if e.get("type") == "damage" and "multiplier" in e}
    for s in (0, 1):
        for slot, (before, after) in enumerate(zip(record.hp_before[s], record.hp_after[s])):
            mon = state.side(s).team[slot]
            if before == after and (s, mon.species) not in attacked:
                continue
            pct_before = round(100 * before / mon.max_hp)
            pct_after = round(100 * after / mon.max_hp)
            delta = pct_after - pct_before
            items.append(FeedbackItem(
                kind="hp_change", turn=turn,
                text=(f"{whose(s)} {mon.species}'s HP went from {pct_before}% to "
                      f"{pct_after}% ({delta:+d}%)."),
            ))

    # (2) Effectiveness of every attack move that was executed.
    for event in record.events:
        if event.get("type") == "damage" and "multiplier" in event:
            attacker_side = event["attacker_side"]
            cls = effectiveness_class(event["multiplier"])
            owner = "Your" if attacker_side == side else "The opposing"
            if cls == "super-effective":
                phrase = f"was super-effective against {whose(event['side']).lower()} {event['pokemon']}"
            elif cls == "standard":
                phrase = f"had standard effectiveness against {whose(event['side']).lower()} {event['pokemon']}"
            else:
                phrase = f"was ineffective against {whose(event['side']).lower()} {event['pokemon']}"
            items.append(FeedbackItem(
                kind="effectiveness", turn=turn,
                text=f"{owner} {event['move']} {phrase}.",
            ))
        elif event.get("type") == "immune":
            attacker_side = 1 - event["side"]
            owner = "Your" if attacker_side == side else "The opposing"
            items.append(FeedbackItem(
                kind="effectiveness", turn=turn,
                text=(f"{owner} {event['move']} had no effect on "
                      f"{whose(event['side']).lower()} {event['pokemon']} (immune)."),
            ))

    # (3) Which side's move executed first (rough speed signal).
    move_sides = [e["side"] for e in record.events if e.get("type") == "move"]
    if len(set(move_sides)) == 2:
        first = move_sides[0]
        text = ("Your Pokemon moved first this turn."
                if first == side else "The opposing Pokemon moved first this turn.")
        items.append(FeedbackItem(kind="execution_order", turn=turn, text=text))

    # (4) Actual effects of executed moves.
    for event in record.events:
        etype = event.get("type")
        if etype == "boost" and event.get("applied", 0) != 0:
            direction = "rose" if event["applied"] > 0 else "fell"
            items.append(FeedbackItem(
                kind="move_effect", turn=turn,
                text=(f"{whose(event['side'])} {event['pokemon']}'s {event['stat']} "
                      f"{direction} by {abs(event['applied'])} stage(s)."),
            ))
        elif etype == "heal":
            mon = _find_mon(state, event["side"], event["pokemon"])
            pct = round(100 * event["amount"] / mon.max_hp) if mon else 0
            items.append(FeedbackItem(
                kind="move_effect", turn=turn,
                text=f"{whose(event['side'])} {event['pokemon']} recovered {pct}% HP.",
            ))
        elif etype == "status":
            items.append(FeedbackItem(
                kind="move_effect", turn=turn,
                text=f"{whose(event['side'])} {event['pokemon']} was afflicted by {event['status']}.",
            ))
        elif etype == "volatile" and event["flag"] != "protected":
            items.append(FeedbackItem(
                kind="move_effect", turn=turn,
                text=(f"{whose(event['side'])} {event['pokemon']} gained the "
                      f"{event['flag']} effect for {event['turns']} turns."),
            ))
        elif etype == "volatile" and event["flag"] == "protected":
            items.append(FeedbackItem(
                kind="move_effect", turn=turn,
                text=f"{whose(event['side'])} {event['pokemon']} protected itself this turn.",
            ))
        elif etype == "clear_stages":
            items.append(FeedbackItem(
                kind="move_effect", turn=turn,
                text=f"{whose(event['side'])} {event['pokemon']}'s stat stages were reset.",
            ))
        elif etype == "cure_status":
            items.append(FeedbackItem(
                kind="move_effect", turn=turn,
                text=f"{whose(event['side'])} {event['pokemon']} was cured of {event['status']}.",
            ))
    return items


def _find_mon(state: BattleState, side: int, species: str):
    for mon in state.side(side).team:
        if mon.species == species:
            return mon
    return None
