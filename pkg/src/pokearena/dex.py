"""Static game data: species, moves, abilities, and the 18-type effectiveness chart.

The dex is loaded once from a data directory (``types.csv``, ``species.json``,
``moves.json``, ``abilities.json``) and is immutable afterwards, so it is safe
to share across threads and battles. A curated desk-scale subset ships with the
package; the loaders accept any dataset in the same format.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

TYPE_NAMES = (
    "normal", "fire", "water", "electric", "grass", "ice", "fighting",
    "poison", "ground", "flying", "psychic", "bug", "rock", "ghost",
    "dragon", "dark", "steel", "fairy",
)

MULTIPLIER_VALUES = (0.0, 0.5, 1.0, 2.0)

STATUS_NAMES = ("poison", "toxic", "burn", "paralysis", "sleep", "freeze")

HOOK_KINDS = (
    "type_immunity", "low_hp_type_boost", "weather_on_entry",
    "perfect_accuracy", "prevent_stat_drop", "status_attack_boost",
    "survive_full_hp", "type_resist", "full_hp_resist", "low_power_boost",
    "cure_on_switch", "weather_speed_boost", "status_immunity",
    "double_effect_chance", "intimidate_on_entry",
)

EFFECT_KINDS = (
    "stat_stages", "status", "heal", "drain", "protect", "hazard",
    "volatile", "clear_stages", "cure_status", "weather",
)

WEATHER_KINDS = ("rain", "sun", "sandstorm")
HAZARD_KINDS = ("rocks", "spikes")
STAGE_STATS = ("atk", "def", "spe")

# Record fields the loaders understand; anything else is ignored with a warning.
_MOVE_FIELDS = {"name", "type", "category", "power", "accuracy", "priority", "effect_text", "effects"}
_SPECIES_FIELDS = {"name", "types", "base_hp", "base_atk", "base_def", "base_spe", "ability", "moves"}
_ABILITY_FIELDS = {"name", "effect_text", "hooks"}


class DexError(Exception):
    """Malformed or inconsistent dex data."""


@dataclass(frozen=True)
class TypeChart:
    """18x18 damage multiplier table, ``multiplier[attack][defend]``."""

    multiplier: Mapping[str, Mapping[str, float]]

    def __post_init__(self) -> None:
        if set(self.multiplier) != set(TYPE_NAMES):
            raise DexError(f"type chart must have exactly the {len(TYPE_NAMES)} known attack types")
        for attack, row in self.multiplier.items():
            if set(row) != set(TYPE_NAMES):
                raise DexError(f"type chart row {attack!r} must cover all {len(TYPE_NAMES)} defend types")
            for defend, value in row.items():
                if value not in MULTIPLIER_VALUES:
                    raise DexError(f"chart entry {attack}->{defend} has invalid multiplier {value}")

    def single(self, attack_type: str, defend_type: str) -> float:
        return self.multiplier[attack_type][defend_type]


@dataclass(frozen=True)
class MoveDef:
    name: str
    type: str
    category: str  # "attack" | "status"
    power: int
    accuracy: float
    priority: int
    effect_text: str
    effects: tuple[dict, ...] = ()

    @property
    def is_attack(self) -> bool:
        return self.category == "attack"


@dataclass(frozen=True)
class AbilityDef:
    name: str
    effect_text: str
    hooks: tuple[dict, ...] = ()

    def hook(self, kind: str) -> dict | None:
        for h in self.hooks:
            if h["kind"] == kind:
                return h
        return None


@dataclass(frozen=True)
class SpeciesDef:
    name: str
    types: tuple[str, ...]
    base_hp: int
    base_atk: int
    base_def: int
    base_spe: int
    ability: str
    move_pool: tuple[str, ...]


@dataclass(frozen=True)
class Pokedex:
    """Validated, cross-referenced bundle of all static game data."""

    chart: TypeChart
    species: Mapping[str, SpeciesDef]
    moves: Mapping[str, MoveDef]
    abilities: Mapping[str, AbilityDef]
    species_order: tuple[str, ...] = ()
    move_order: tuple[str, ...] = ()

    def species_list(self) -> list[SpeciesDef]:
        return [self.species[n] for n in self.species_order]

    def move_index(self, name: str) -> int:
        return self.move_order.index(name)

    def effectiveness(self, attack_type: str, defend_types: Sequence[str]) -> float:
        return effectiveness(self.chart, attack_type, defend_types)

    def lookup_effect(self, name: str) -> str:
        """Verbatim effect description of a move or ability."""
        if name in self.moves:
            return self.moves[name].effect_text
        if name in self.abilities:
            return self.abilities[name].effect_text
        raise KeyError(f"no move or ability named {name!r}")


def effectiveness(chart: TypeChart, attack_type: str, defend_types: Sequence[str]) -> float:
    """Damage multiplier of an attack type against a 1- or 2-type defender.

    Dual types multiply, so the result is one of {0, 0.25, 0.5, 1, 2, 4}.
    """
    if attack_type not in chart.multiplier:
        raise KeyError(f"unknown attack type {attack_type!r}")
    if not 1 <= len(defend_types) <= 2:
        raise ValueError("defender must have one or two types")
    result = 1.0
    for defend in defend_types:
        if defend not in TYPE_NAMES:
            raise KeyError(f"unknown defend type {defend!r}")
        result *= chart.single(attack_type, defend)
    return result


def validate_chart(chart: TypeChart) -> tuple[int, int, int, int]:
    """Count chart entries per multiplier class, ordered (2x, 1x, 0.5x, 0x)."""
    counts = {v: 0 for v in MULTIPLIER_VALUES}
    for row in chart.multiplier.values():
        for value in row.values():
            counts[value] += 1
    return (counts[2.0], counts[1.0], counts[0.5], counts[0.0])


def _warn_unknown_fields(record: dict, known: set[str], where: str) -> None:
    extra = set(record) - known
    if extra:
        logger.warning("%s: ignoring unknown fields %s", where, sorted(extra))


def _require(record: dict, fields: Iterable[str], where: str) -> None:
    for f in fields:
        if f not in record:
            raise DexError(f"{where}: missing required field {f!r}")


def load_chart(path: Path) -> TypeChart:
    with open(path, encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise DexError(f"{path}: empty chart file")
    header = [h.strip() for h in rows[0][1:]]
    if len(header) != 18 or len(rows) - 1 != 18:
        raise DexError(f"{path}: chart must be 18x18, got {len(rows) - 1}x{len(header)}")
    table: dict[str, dict[str, float]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        attack = row[0].strip()
        if len(row) != 19:
            raise DexError(f"{path}:{lineno}: expected 19 columns, got {len(row)}")
        entries = {}
        for defend, raw in zip(header, row[1:]):
            try:
                value = float(raw)
            except ValueError as exc:
                raise DexError(f"{path}:{lineno}: bad multiplier {raw!r} for {attack}->{defend}") from exc
            entries[defend] = value
        table[attack] = entries
    return TypeChart(table)


def _load_moves(path: Path) -> dict[str, MoveDef]:
    with open(path, encoding="utf-8") as f:
        records = json.load(f)
    moves: dict[str, MoveDef] = {}
    for i, rec in enumerate(records):
        where = f"{path.name}[{i}]"
        _require(rec, ["name", "type", "category", "power", "accuracy"], where)
        _warn_unknown_fields(rec, _MOVE_FIELDS, where)
        name = rec["name"]
        category = rec["category"]
        power = int(rec["power"])
        if category not in ("attack", "status"):
            raise DexError(f"{where}: category must be attack|status, got {category!r}")
        if category == "attack" and power <= 0:
            raise DexError(f"{where} ({name}): attack move must have positive power")
        if category == "status" and power != 0:
            raise DexError(f"{where} ({name}): status move must have power 0")
        accuracy = float(rec["accuracy"])
        if not 0.0 < accuracy <= 1.0:
            raise DexError(f"{where} ({name}): accuracy must be in (0, 1]")
        if rec["type"] not in TYPE_NAMES:
            raise DexError(f"{where} ({name}): unknown type {rec['type']!r}")
        effects = tuple(rec.get("effects", ()))
        for eff in effects:
            _validate_effect(eff, f"{where} ({name})")
        if name in moves:
            raise DexError(f"{where}: duplicate move {name!r}")
        moves[name] = MoveDef(
            name=name,
            type=rec["type"],
            category=category,
            power=power,
            accuracy=accuracy,
            priority=int(rec.get("priority", 0)),
            effect_text=rec.get("effect_text", ""),
            effects=effects,
        )
    return moves


def _validate_effect(eff: dict, where: str) -> None:
    kind = eff.get("kind")
    if kind not in EFFECT_KINDS:
        raise DexError(f"{where}: unknown effect kind {kind!r}")
    if kind == "status" and eff.get("status") not in STATUS_NAMES:
        raise DexError(f"{where}: unknown status {eff.get('status')!r}")
    if kind == "weather" and eff.get("weather") not in WEATHER_KINDS:
        raise DexError(f"{where}: unknown weather {eff.get('weather')!r}")
    if kind == "hazard" and eff.get("hazard") not in HAZARD_KINDS:
        raise DexError(f"{where}: unknown hazard {eff.get('hazard')!r}")
    if kind == "stat_stages":
        for stat in eff.get("stages", {}):
            if stat not in STAGE_STATS:
                raise DexError(f"{where}: unknown stat {stat!r}")


def _load_abilities(path: Path) -> dict[str, AbilityDef]:
    with open(path, encoding="utf-8") as f:
        records = json.load(f)
    abilities: dict[str, AbilityDef] = {}
    for i, rec in enumerate(records):
        where = f"{path.name}[{i}]"
        _require(rec, ["name", "effect_text"], where)
        _warn_unknown_fields(rec, _ABILITY_FIELDS, where)
        name = rec["name"]
        hooks = tuple(rec.get("hooks", ()))
        for hook in hooks:
            kind = hook.get("kind")
            if kind not in HOOK_KINDS:
                raise DexError(f"{where} ({name}): unknown hook kind {kind!r}")
            if "type" in hook and hook["type"] not in TYPE_NAMES:
                raise DexError(f"{where} ({name}): hook references unknown type {hook['type']!r}")
            if "types" in hook and any(t not in TYPE_NAMES for t in hook["types"]):
                raise DexError(f"{where} ({name}): hook references unknown type in {hook['types']}")
            if "status" in hook and hook["status"] not in STATUS_NAMES:
                raise DexError(f"{where} ({name}): hook references unknown status {hook['status']!r}")
            if "weather" in hook and hook["weather"] not in WEATHER_KINDS:
                raise DexError(f"{where} ({name}): hook references unknown weather {hook['weather']!r}")
            if "stat" in hook and hook["stat"] not in STAGE_STATS:
                raise DexError(f"{where} ({name}): hook references unknown stat {hook['stat']!r}")
        if name in abilities:
            raise DexError(f"{where}: duplicate ability {name!r}")
        abilities[name] = AbilityDef(name=name, effect_text=rec["effect_text"], hooks=hooks)
    return abilities


def _load_species(path: Path, moves: Mapping[str, MoveDef], abilities: Mapping[str, AbilityDef]) -> dict[str, SpeciesDef]:
    with open(path, encoding="utf-8") as f:
        records = json.load(f)
    species: dict[str, SpeciesDef] = {}
    for i, rec in enumerate(records):
        where = f"{path.name}[{i}]"
        _require(rec, ["name", "types", "base_hp", "base_atk", "base_def", "base_spe", "ability", "moves"], where)
        _warn_unknown_fields(rec, _SPECIES_FIELDS, where)
        name = rec["name"]
        types = tuple(rec["types"])
        if not 1 <= len(types) <= 2 or len(set(types)) != len(types):
            raise DexError(f"{where} ({name}): must have 1-2 distinct types")
        for t in types:
            if t not in TYPE_NAMES:
                raise DexError(f"{where} ({name}): unknown type {t!r}")
        for stat in ("base_hp", "base_atk", "base_def", "base_spe"):
            if int(rec[stat]) <= 0:
                raise DexError(f"{where} ({name}): {stat} must be positive")
        if rec["ability"] not in abilities:
            raise DexError(f"{where} ({name}): dangling ability reference {rec['ability']!r}")
        pool = tuple(rec["moves"])
        if len(pool) < 4:
            raise DexError(f"{where} ({name}): move pool must have at least 4 moves")
        for mv in pool:
            if mv not in moves:
                raise DexError(f"{where} ({name}): dangling move reference {mv!r}")
        if name in species:
            raise DexError(f"{where}: duplicate species {name!r}")
        species[name] = SpeciesDef(
            name=name,
            types=types,
            base_hp=int(rec["base_hp"]),
            base_atk=int(rec["base_atk"]),
            base_def=int(rec["base_def"]),
            base_spe=int(rec["base_spe"]),
            ability=rec["ability"],
            move_pool=pool,
        )
    return species


def load_pokedex(data_dir: str | Path) -> Pokedex:
    """Load and validate a dex from a data directory.

    Expects ``types.csv``, ``moves.json``, ``abilities.json``, ``species.json``.
    Raises :class:`DexError` on malformed records, dangling references, or a
    mis-sized chart.
    """
    data_dir = Path(data_dir)
    chart_path = data_dir / "types.csv"
    if not chart_path.exists():
        raise DexError(f"{data_dir}: missing type chart (types.csv)")
    chart = load_chart(chart_path)
    for name in ("moves.json", "abilities.json", "species.json"):
        if not (data_dir / name).exists():
            raise DexError(f"{data_dir}: missing {name}")
    moves = _load_moves(data_dir / "moves.json")
    abilities = _load_abilities(data_dir / "abilities.json")
    species = _load_species(data_dir / "species.json", moves, abilities)
    return Pokedex(
        chart=chart,
        species=species,
        moves=moves,
        abilities=abilities,
        species_order=tuple(species),
        move_order=tuple(moves),
    )


def save_pokedex(dex: Pokedex, data_dir: str | Path) -> None:
    """Serialize a dex back to the on-disk format (inverse of load_pokedex)."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    with open(data_dir / "types.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["attack", *TYPE_NAMES])
        for attack in TYPE_NAMES:
            row = [attack]
            for defend in TYPE_NAMES:
                v = dex.chart.single(attack, defend)
                row.append(str(int(v)) if v in (0.0, 1.0, 2.0) else str(v))
            writer.writerow(row)
    moves = [
        {"name": m.name, "type": m.type, "category": m.category, "power": m.power,
         "accuracy": m.accuracy, "priority": m.priority, "effect_text": m.effect_text,
         "effects": list(m.effects)}
        for m in (dex.moves[n] for n in dex.move_order)
    ]
    abilities = [
        {"name": a.name, "effect_text": a.effect_text, "hooks": list(a.hooks)}
        for a in dex.abilities.values()
    ]
    species = [
        {"name": s.name, "types": list(s.types), "base_hp": s.base_hp, "base_atk": s.base_atk,
         "base_def": s.base_def, "base_spe": s.base_spe, "ability": s.ability, "moves": list(s.move_pool)}
        for s in (dex.species[n] for n in dex.species_order)
    ]
    for fname, payload in (("moves.json", moves), ("abilities.json", abilities), ("species.json", species)):
        with open(data_dir / fname, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=1)
            f.write("\n")


def bundled_data_dir() -> Path:
    """Path of the data directory shipped inside the package."""
    return Path(resources.files("pokearena") / "data")


def load_bundled() -> Pokedex:
    return load_pokedex(bundled_data_dir())
