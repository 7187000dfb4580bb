"""Knowledge augmentation: type matchup sentences and encyclopedia effect lookups.

Type relation annotations are derived purely from the type chart: a Pokemon
is "strong against" the single types its own attack types hit for at least
2x, and "weak to" the attack types that hit its full typing for at least 2x.
Effect annotations are verbatim Pokedex text, never paraphrased.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from pokearena.dex import Pokedex, TYPE_NAMES, effectiveness
from pokearena.engine import BattleState, PokemonInstance


@dataclass(frozen=True)
class Annotation:
    kind: str  # type_relation | move_effect | ability_effect
    subject: str
    text: str
    strong: tuple = ()
    weak: tuple = ()
    full: bool = True  # False for the one-line type listing of benched opponents


def strong_against(dex: Pokedex, types: tuple[str, ...]) -> tuple[str, ...]:
    """Single defender types this typing's own attack types hit for >= 2x."""
    return tuple(
        t for t in TYPE_NAMES
        if any(effectiveness(dex.chart, own, (t,)) >= 2 for own in types)
    )


def weak_to(dex: Pokedex, types: tuple[str, ...]) -> tuple[str, ...]:
    """Attack types that hit this full typing for >= 2x."""
    return tuple(t for t in TYPE_NAMES if effectiveness(dex.chart, t, types) >= 2)


def type_relation_sentence(name: str, strong: tuple, weak: tuple) -> str:
    if strong and weak:
        return (f"{name} is strong against {_join(strong)} Pokemon "
                f"yet weak to the {_join(weak)} moves.")
    if strong:
        return f"{name} is strong against {_join(strong)} Pokemon and has no notable weakness."
    if weak:
        return f"{name} has no notable advantage yet is weak to the {_join(weak)} moves."
    return f"{name} has no notable advantage and no notable weakness."


def _join(types: tuple) -> str:
    return "/".join(types) + "-type"


def _relation(dex: Pokedex, label: str, types: tuple[str, ...]) -> Annotation:
    strong = strong_against(dex, types)
    weak = weak_to(dex, types)
    return Annotation(
        kind="type_relation", subject=label,
        text=type_relation_sentence(label, strong, weak),
        strong=strong, weak=weak,
    )


def annotate_types(state: BattleState, side: int) -> list[Annotation]:
    """Type relation sentences for our whole team and the opposing active.

    Revealed benched opponents get a one-line type listing; with nothing
    revealed on the opposing side the list is empty.
    """
    dex = state.dex
    opp = state.side(1 - side)
    if not opp.revealed:
        return []
    annotations: list[Annotation] = []
    opp_active = opp.active
    if not opp_active.fainted and opp.active_index in opp.revealed:
        annotations.append(_relation(dex, f"Opposing {opp_active.species}", opp_active.types))
    for slot in sorted(opp.revealed):
        if slot == opp.active_index:
            continue
        mon = opp.team[slot]
        annotations.append(Annotation(
            kind="type_relation", subject=f"Opposing {mon.species}",
            text=f"Opposing {mon.species} is a {'/'.join(mon.types)}-type Pokemon.",
            full=False,
        ))
    for mon in state.side(side).team:
        if mon.fainted:
            continue
        annotations.append(_relation(dex, mon.species, mon.types))
    return annotations


def annotate_effects(state: BattleState, side: int, dex: Pokedex | None = None) -> list[Annotation]:
    """Pokedex effect text for the on-field Pokemon: ability plus moves.

    Our active contributes its ability and all four moves; the opposing
    active contributes its ability (species knowledge) and only the moves it
    has revealed.
    """
    dex = dex or state.dex
    annotations: list[Annotation] = []
    own_active = state.side(side).active
    if not own_active.fainted:
        annotations.extend(_mon_effects(dex, own_active, own_active.moves, f"{own_active.species}"))
    opp = state.side(1 - side)
    opp_active = opp.active
    if opp.active_index in opp.revealed and not opp_active.fainted:
        annotations.extend(_mon_effects(
            dex, opp_active, opp_active.revealed_moves, f"Opposing {opp_active.species}"))
    return annotations


def _mon_effects(dex: Pokedex, mon: PokemonInstance, moves, owner: str) -> list[Annotation]:
    annotations = [Annotation(
        kind="ability_effect", subject=mon.ability,
        text=f"{owner}'s ability {mon.ability}: {dex.lookup_effect(mon.ability)}",
    )]
    for name in moves:
        annotations.append(Annotation(
            kind="move_effect", subject=name,
            text=f"{owner}'s move {name}: {dex.lookup_effect(name)}",
        ))
    return annotations


def annotate(state: BattleState, side: int, mode: str) -> list[Annotation]:
    """Apply the configuration lattice: none, type, effect, or both."""
    if mode == "none":
        return []
    if mode == "type":
        return annotate_types(state, side)
    if mode == "effect":
        return annotate_effects(state, side)
    if mode == "both":
        return annotate_types(state, side) + annotate_effects(state, side)
    raise ValueError(f"unknown knowledge mode {mode!r}")
