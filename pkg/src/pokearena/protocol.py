"""Battle-server wire protocol: line parser, known-state tracker, choice encoding.

The wire format is newline-delimited, pipe-separated fields with the tag in
the first field (``|move|p1a: Charizard|Fire Blast|p2a: Venusaur``). Parsing
is total: every input line yields exactly one message, with ``Unknown`` as
the catch-all, and never raises.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Union

from pokearena.engine import Action

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Turn:
    number: int

@dataclass(frozen=True)
class Move:
    side: str
    pokemon: str
    move: str
    target: Optional[str]

@dataclass(frozen=True)
class SwitchIn:
    side: str
    pokemon: str
    hp_fraction: float

@dataclass(frozen=True)
class Damage:
    side: str
    pokemon: str
    hp_fraction: float

@dataclass(frozen=True)
class Heal:
    side: str
    pokemon: str
    hp_fraction: float

@dataclass(frozen=True)
class Faint:
    side: str
    pokemon: str

@dataclass(frozen=True)
class Boost:
    side: str
    pokemon: str
    stat: str
    delta: int

@dataclass(frozen=True)
class Status:
    side: str
    pokemon: str
    condition: str

@dataclass(frozen=True)
class Immune:
    side: str
    pokemon: str

@dataclass(frozen=True)
class Weather:
    kind: str

@dataclass(frozen=True)
class Request:
    """Action-request payload: the side's team and the active moveset."""

    payload: dict

    @property
    def side_id(self) -> str:
        return self.payload.get("side", {}).get("id", "")

    def move_names(self) -> list[str]:
        active = self.payload.get("active") or []
        if not active:
            return []
        return [m.get("move", "") for m in active[0].get("moves", [])]

    def team(self) -> list[dict]:
        return self.payload.get("side", {}).get("pokemon", [])

    @property
    def force_switch(self) -> bool:
        return bool(self.payload.get("forceSwitch"))

@dataclass(frozen=True)
class Win:
    player: str

@dataclass(frozen=True)
class Unknown:
    raw: str


ProtocolMessage = Union[
    Turn, Move, SwitchIn, Damage, Heal, Faint, Boost, Status, Immune,
    Weather, Request, Win, Unknown,
]


def _split_ident(ident: str) -> tuple[str, str]:
    """``p1a: Charizard`` -> (``p1``, ``Charizard``)."""
    pos, _, name = ident.partition(":")
    pos = pos.strip()
    if not pos.startswith("p") or len(pos) < 2 or not pos[1].isdigit():
        raise ValueError(f"bad position ident {ident!r}")
    return pos[:2], name.strip()


def _hp_fraction(text: str) -> float:
    """``260/260`` / ``48/100`` / ``0 fnt`` -> fraction in [0, 1]."""
    text = text.strip()
    if not text:
        raise ValueError("empty hp field")
    first = text.split()[0]
    if "/" in first:
        cur_s, _, max_s = first.partition("/")
        cur, mx = int(cur_s), int(max_s)
        if mx <= 0 or cur < 0:
            raise ValueError(f"bad hp {text!r}")
        return min(cur / mx, 1.0)
    value = int(first)
    if value < 0:
        raise ValueError(f"bad hp {text!r}")
    return 0.0 if value == 0 else min(value / 100, 1.0)


def parse_line(line: str) -> ProtocolMessage:
    """Parse one wire line into a typed message. Total: never raises."""
    try:
        return _parse_line(line)
    except Exception:
        return Unknown(raw=line)


def _parse_line(line: str) -> ProtocolMessage:
    if not line.startswith("|"):
        return Unknown(raw=line)
    fields = line.split("|")[1:]  # leading empty field before the first pipe
    if not fields or not fields[0]:
        return Unknown(raw=line)
    tag = fields[0]
    args = fields[1:]

    if tag == "turn":
        return Turn(number=int(args[0]))
    if tag == "move":
        side, pokemon = _split_ident(args[0])
        target = None
        if len(args) > 2 and args[2].strip():
            try:
                _, target = _split_ident(args[2])
            except ValueError:
                target = None
        return Move(side=side, pokemon=pokemon, move=args[1].strip(), target=target)
    if tag in ("switch", "drag"):
        side, pokemon = _split_ident(args[0])
        return SwitchIn(side=side, pokemon=pokemon, hp_fraction=_hp_fraction(args[-1]))
    if tag == "-damage":
        side, pokemon = _split_ident(args[0])
        return Damage(side=side, pokemon=pokemon, hp_fraction=_hp_fraction(args[1]))
    if tag == "-heal":
        side, pokemon = _split_ident(args[0])
        return Heal(side=side, pokemon=pokemon, hp_fraction=_hp_fraction(args[1]))
    if tag == "faint":
        side, pokemon = _split_ident(args[0])
        return Faint(side=side, pokemon=pokemon)
    if tag in ("-boost", "-unboost"):
        side, pokemon = _split_ident(args[0])
        delta = int(args[2])
        if tag == "-unboost":
            delta = -delta
        return Boost(side=side, pokemon=pokemon, stat=args[1].strip(), delta=delta)
    if tag == "-status":
        side, pokemon = _split_ident(args[0])
        return Status(side=side, pokemon=pokemon, condition=args[1].strip())
    if tag == "-immune":
        side, pokemon = _split_ident(args[0])
        return Immune(side=side, pokemon=pokemon)
    if tag == "-weather":
        return Weather(kind=args[0].strip())
    if tag == "request":
        return Request(payload=json.loads(args[0]))
    if tag == "win":
        return Win(player=args[0].strip())
    return Unknown(raw=line)


@dataclass
class RevealedPokemon:
    """What the stream has shown about one opposing Pokemon."""

    name: str
    hp_fraction: float = 1.0
    fainted: bool = False
    status: str = ""
    boosts: dict = field(default_factory=dict)
    observed_moves: list = field(default_factory=list)


@dataclass
class KnownState:
    """Local mirror of everything a battle stream has revealed so far.

    The own side is fully known from request payloads; the opponent side only
    as revealed by the stream. Contradictory messages are recorded as
    anomalies and leave the state unchanged.
    """

    own_side: str  # "p1" or "p2"
    turn: int = 0
    own_request: Optional[Request] = None
    opponents: dict = field(default_factory=dict)  # name -> RevealedPokemon
    opponent_active: Optional[str] = None
    own_active: Optional[str] = None
    own_view: dict = field(default_factory=dict)  # name -> RevealedPokemon (stream view)
    weather: str = "none"
    log_queue: list = field(default_factory=list)  # raw lines, oldest first
    winner: Optional[str] = None
    anomalies: list = field(default_factory=list)

    @property
    def opponent_side(self) -> str:
        return "p2" if self.own_side == "p1" else "p1"

    def revealed_count(self) -> int:
        return len(self.opponents)

    def _own(self, name: str) -> RevealedPokemon:
        if name not in self.own_view:
            self.own_view[name] = RevealedPokemon(name=name)
        return self.own_view[name]

    def _opponent(self, name: str, reveal: bool = False) -> Optional[RevealedPokemon]:
        if name not in self.opponents:
            if not reveal:
                return None
            if len(self.opponents) >= 6:
                return None
            self.opponents[name] = RevealedPokemon(name=name)
        return self.opponents[name]


def apply_message(tracker: KnownState, msg: ProtocolMessage) -> KnownState:
    """Fold one message into the tracker (mutates and returns it)."""
    if isinstance(msg, Unknown):
        return tracker
    if isinstance(msg, Turn):
        tracker.turn = msg.number
        return tracker
    if isinstance(msg, Request):
        tracker.own_request = msg
        return tracker
    if isinstance(msg, Weather):
        kind = msg.kind.lower()
        tracker.weather = "none" if kind in ("none", "") else kind
        return tracker
    if isinstance(msg, Win):
        tracker.winner = msg.player
        return tracker

    mine = getattr(msg, "side", None) == tracker.own_side
    if isinstance(msg, SwitchIn):
        if mine:
            mon = tracker._own(msg.pokemon)
            mon.hp_fraction = msg.hp_fraction
            mon.boosts = {}
            tracker.own_active = msg.pokemon
        else:
            mon = tracker._opponent(msg.pokemon, reveal=True)
            if mon is None:
                tracker.anomalies.append(f"switch-in beyond six revealed: {msg.pokemon}")
                return tracker
            mon.hp_fraction = msg.hp_fraction
            mon.boosts = {}
            tracker.opponent_active = msg.pokemon
        return tracker

    if isinstance(msg, Move):
        if not mine:
            mon = tracker._opponent(msg.pokemon)
            if mon is None:
                tracker.anomalies.append(f"move by unrevealed {msg.pokemon}")
                return tracker
            if msg.move not in mon.observed_moves:
                mon.observed_moves.append(msg.move)
        tracker.log_queue.append(msg)
        return tracker

    mon = tracker._own(msg.pokemon) if mine else tracker._opponent(msg.pokemon)
    if mon is None:
        tracker.anomalies.append(f"{type(msg).__name__.lower()} for unrevealed {msg.pokemon}")
        return tracker
    if isinstance(msg, (Damage, Heal)):
        mon.hp_fraction = msg.hp_fraction
        if msg.hp_fraction == 0 and isinstance(msg, Damage):
            pass  # faint arrives as its own message
    elif isinstance(msg, Faint):
        mon.fainted = True
        mon.hp_fraction = 0.0
    elif isinstance(msg, Boost):
        mon.boosts[msg.stat] = mon.boosts.get(msg.stat, 0) + msg.delta
    elif isinstance(msg, Status):
        mon.status = msg.condition
    elif isinstance(msg, Immune):
        tracker.log_queue.append(msg)
    return tracker


def apply_stream(tracker: KnownState, lines) -> KnownState:
    for line in lines:
        apply_message(tracker, parse_line(line.rstrip("\n")))
    return tracker


class ChoiceError(Exception):
    pass


def serialize_choice(action: Action, request: Request) -> str:
    """Encode an action as the server's choice string, 1-based per the request.

    Moves index into the request's active move list; switches index into the
    request's team order, where slot 0 is the active Pokemon (so bench slot k
    serializes as ``switch k+1``).
    """
    if action.kind == "move":
        moves = request.move_names()
        lowered = [m.lower() for m in moves]
        if action.name.lower() not in lowered:
            raise ChoiceError(f"move {action.name!r} not present in request {moves}")
        return f"move {lowered.index(action.name.lower()) + 1}"
    team = request.team()
    if not 0 <= action.slot < len(team):
        raise ChoiceError(f"switch slot {action.slot} outside request team of {len(team)}")
    if action.slot == 0:
        raise ChoiceError("cannot switch to the active slot")
    target = team[action.slot]
    if target.get("condition", "").endswith("fnt"):
        raise ChoiceError(f"switch target {target.get('ident', action.slot)} has fainted")
    return f"switch {action.slot + 1}"


class Gateway:
    """Contract for delivering battles from a server to a policy.

    ``run_battle`` feeds stream lines through a KnownState tracker, calls the
    policy on every Request, and sends back serialized choices. Implementations
    differ only in transport; tests use :class:`RecordedStreamGateway`.
    """

    def connect(self, url: str, credentials: Optional[dict] = None) -> None:
        raise NotImplementedError

    def run_battle(self, policy) -> KnownState:
        raise NotImplementedError


class RecordedStreamGateway(Gateway):
    """Replays a recorded line stream; collects the choices a policy makes.

    ``policy`` is a callable ``(request, tracker) -> Action``. A truncated
    stream (no Win message) marks the battle aborted.
    """

    def __init__(self, lines, own_side: str = "p1"):
        self.lines = list(lines)
        self.own_side = own_side
        self.choices: list[str] = []
        self.aborted = False

    def connect(self, url: str, credentials: Optional[dict] = None) -> None:
        pass

    def run_battle(self, policy) -> KnownState:
        tracker = KnownState(own_side=self.own_side)
        for line in self.lines:
            msg = parse_line(line.rstrip("\n"))
            apply_message(tracker, msg)
            if isinstance(msg, Request) and msg.side_id in ("", tracker.own_side):
                action = policy(msg, tracker)
                if action is not None:
                    self.choices.append(serialize_choice(action, msg))
        if tracker.winner is None:
            self.aborted = True
        return tracker
