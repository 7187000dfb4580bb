"""Versioned battle log persistence and exact replay.

One battle per file, newline-delimited JSON: a header record (schema
version, seed, teams, policies), one record per resolution step, and a
result record. Replay rebuilds the battle from the header and recorded
actions and must reproduce every record and the final state exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from pokearena.dex import Pokedex
from pokearena.engine import (
    Action,
    BattleState,
    TurnRecord,
    forced_switch,
    make_instance,
    new_battle,
    step,
)

SCHEMA_VERSION = 1


class LogError(Exception):
    pass


class ReplayMismatch(LogError):
    pass


@dataclass
class BattleLog:
    header: dict
    records: list[TurnRecord]
    result: dict

    @property
    def seed(self) -> int:
        return self.header["seed"]

    def teams(self, dex: Pokedex) -> tuple[list, list]:
        sides = []
        for team in self.header["teams"]:
            sides.append([make_instance(dex, m["species"], m["moves"]) for m in team])
        return sides[0], sides[1]


def team_spec(team) -> list[dict]:
    return [{"species": p.species, "moves": list(p.moves)} for p in team]


def write_battle_log(path: Path, header: dict, records: Iterable[TurnRecord],
                     result: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({"kind": "header", "schema_version": SCHEMA_VERSION, **header},
                           sort_keys=True) + "\n")
        for record in records:
            f.write(json.dumps({"kind": "record", "record": record.to_dict()},
                               sort_keys=True) + "\n")
        f.write(json.dumps({"kind": "result", **result}, sort_keys=True) + "\n")


def read_battle_log(path: Path) -> BattleLog:
    header = None
    records: list[TurnRecord] = []
    result = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogError(f"{path}:{lineno}: corrupted record: {exc}") from exc
            kind = data.get("kind")
            if kind == "header":
                if data.get("schema_version") != SCHEMA_VERSION:
                    raise LogError(
                        f"{path}: schema version {data.get('schema_version')} "
                        f"(expected {SCHEMA_VERSION})")
                header = data
            elif kind == "record":
                records.append(TurnRecord.from_dict(data["record"]))
            elif kind == "result":
                result = data
            else:
                raise LogError(f"{path}:{lineno}: unknown record kind {kind!r}")
    if header is None:
        raise LogError(f"{path}: missing header record")
    if result is None:
        raise LogError(f"{path}: missing result record (truncated file?)")
    return BattleLog(header=header, records=records, result=result)


def replay(path: Path, dex: Pokedex, verify: bool = True) -> BattleState:
    """Re-run a persisted battle; optionally verify it matches the recording."""
    log = read_battle_log(Path(path))
    team_a, team_b = log.teams(dex)
    state = new_battle(dex, team_a, team_b, log.seed,
                       turn_cap=log.header.get("turn_cap", 200))
    replayed: list[TurnRecord] = [state.log[0]]
    for record in log.records:
        if record.kind == "start":
            continue
        if record.kind == "turn":
            new_record = step(state, Action.from_dict(record.actions[0]),
                              Action.from_dict(record.actions[1]))
        elif record.kind == "forced_switch":
            (side,) = record.actions.keys()
            new_record = forced_switch(state, side, Action.switch(record.actions[side]["slot"]))
        else:
            raise LogError(f"unknown record kind {record.kind!r}")
        replayed.append(new_record)
    if verify:
        recorded = [r.to_dict() for r in log.records]
        regenerated = [r.to_dict() for r in replayed]
        if recorded != regenerated:
            raise ReplayMismatch(f"{path}: replayed records differ from recording")
        final = {
            "winner": state.winner,
            "reason": state.finish_reason,
            "turns": state.field.turn_number - 1,
            "final_hp": state.hp_snapshot(),
        }
        for key in ("winner", "reason", "turns", "final_hp"):
            if final[key] != log.result.get(key):
                raise ReplayMismatch(
                    f"{path}: result field {key!r} mismatch: "
                    f"replayed {final[key]!r} vs recorded {log.result.get(key)!r}")
    return state
