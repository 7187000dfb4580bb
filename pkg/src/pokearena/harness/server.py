"""Battle service for the web UI: create battles, submit actions, stream events.

The human plays side 0 against a configured agent on side 1. Every response
is filtered to the human's view: unrevealed opponent Pokemon never appear in
any payload, and revealed ones expose only what the battle has shown.
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from pokearena.dex import load_bundled, load_pokedex
from pokearena.engine import (
    Action,
    BattleState,
    PHASE_FORCED_SWITCH,
    battle_score,
    forced_switch,
    legal_actions,
    new_battle,
    random_team,
    step,
)
from pokearena.harness.runner import EndpointSpec, build_policy, derive_seed
from pokearena.textstate import _label_actions  # shared menu labelling
import random

HUMAN_SIDE = 0
AGENT_SIDE = 1
DEFAULT_SESSION_TTL = 3600.0


class CreateBattleBody(BaseModel):
    agent: Optional[str] = None
    seed: Optional[int] = None


class ActionBody(BaseModel):
    action: str


@dataclass
class Session:
    battle_id: str
    state: BattleState
    agent: object
    events: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_access: float = field(default_factory=time.monotonic)
    forfeited: bool = False

    def touch(self) -> None:
        self.last_access = time.monotonic()


def make_app(
    data_dir: Optional[str] = None,
    default_agent: str = "maxpower",
    seed: Optional[int] = None,
    session_ttl: float = DEFAULT_SESSION_TTL,
    endpoint_spec: Optional[EndpointSpec] = None,
) -> FastAPI:
    dex = load_pokedex(data_dir) if data_dir else load_bundled()
    endpoint_spec = endpoint_spec or EndpointSpec()
    app = FastAPI(title="pokearena battle service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    counter = {"n": 0}

    def _get_session(battle_id: str) -> Session:
        session = sessions.get(battle_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown battle id")
        if not session.state.finished and not session.forfeited and \
                time.monotonic() - session.last_access > session_ttl:
            session.forfeited = True
            session.events.append({"type": "end", "winner": "opponent",
                                   "reason": "session_timeout"})
        return session

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/battles")
    def create_battle(body: CreateBattleBody) -> dict:
        counter["n"] += 1
        battle_seed = body.seed
        if battle_seed is None:
            base = seed if seed is not None else uuid.uuid4().int & 0xFFFFFFFF
            battle_seed = derive_seed(base, counter["n"], "serve")
        agent_spec = body.agent or default_agent
        try:
            agent = build_policy(agent_spec, derive_seed(battle_seed, 0, "agent"),
                                 endpoint_spec)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        rng = random.Random(battle_seed)
        team_a = random_team(rng, dex)
        team_b = random_team(rng, dex)
        state = new_battle(dex, team_a, team_b, battle_seed)
        agent.start_battle(state, AGENT_SIDE)
        battle_id = uuid.uuid4().hex[:12]
        session = Session(battle_id=battle_id, state=state, agent=agent)
        sessions[battle_id] = session
        session.events.append({"type": "state", "state": human_view(session)})
        return {"battle_id": battle_id, "state": human_view(session)}

    @app.get("/battles/{battle_id}/state")
    def get_state(battle_id: str) -> dict:
        session = _get_session(battle_id)
        session.touch()
        return human_view(session)

    @app.post("/battles/{battle_id}/action")
    def submit_action(battle_id: str, body: ActionBody) -> dict:
        session = _get_session(battle_id)
        with session.lock:
            session.touch()
            if session.forfeited:
                raise HTTPException(status_code=409, detail="battle forfeited (session timeout)")
            state = session.state
            if state.finished:
                raise HTTPException(status_code=409, detail="battle already finished")
            action = _parse_action_label(state, body.action)
            if action is None:
                raise HTTPException(status_code=400, detail={
                    "error": f"illegal action {body.action!r}",
                    "legal_actions": [entry["label"] for entry in _menu(state)],
                })
            new_records = _advance(session, action)
            for record in new_records:
                session.events.append({
                    "type": "turn",
                    "record": public_record(state, record),
                    "state": human_view(session),
                })
            if state.finished:
                session.events.append({
                    "type": "end",
                    "winner": _winner_label(state),
                    "scores": [battle_score(state, 0), battle_score(state, 1)],
                    "state": human_view(session),
                })
            return {"ok": True, "state": human_view(session)}

    @app.get("/battles/{battle_id}/events")
    async def events(battle_id: str, since: int = 0, wait: bool = True) -> StreamingResponse:
        """Server-sent event stream of turn results.

        With ``wait=false`` the stream drains the currently queued events and
        closes instead of staying open for future turns.
        """
        session = _get_session(battle_id)

        async def stream():
            cursor = since
            while True:
                while cursor < len(session.events):
                    event = session.events[cursor]
                    cursor += 1
                    yield f"data: {json.dumps(event, sort_keys=True)}\n\n"
                    if event.get("type") == "end":
                        return
                if not wait or session.state.finished or session.forfeited:
                    return
                await asyncio.sleep(0.05)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/battles/{battle_id}/decisions")
    def decisions(battle_id: str) -> dict:
        session = _get_session(battle_id)
        if not session.state.finished and not session.forfeited:
            raise HTTPException(status_code=409,
                                detail="decision traces are revealed only after the battle")
        traces = []
        if hasattr(session.agent, "decisions"):
            traces = [d.to_dict() for d in session.agent.decisions]
        return {"battle_id": battle_id, "decisions": traces}

    def _advance(session: Session, human_action: Action) -> list:
        """Apply the human's action (plus the agent's) and auto-resolve the agent."""
        state = session.state
        agent = session.agent
        new_records = []
        if state.phase == PHASE_FORCED_SWITCH:
            if HUMAN_SIDE not in state.pending_switches:
                raise HTTPException(status_code=409, detail="no action required from you")
            new_records.append(forced_switch(state, HUMAN_SIDE, human_action))
        else:
            agent_action = agent.choose(state, AGENT_SIDE)
            new_records.append(step(state, human_action, agent_action))
        while (not state.finished and state.phase == PHASE_FORCED_SWITCH
               and AGENT_SIDE in state.pending_switches):
            agent_action = agent.choose(state, AGENT_SIDE)
            new_records.append(forced_switch(state, AGENT_SIDE, agent_action))
        return new_records

    def _menu(state: BattleState) -> list:
        entries = []
        if state.finished:
            return entries
        if state.phase == PHASE_FORCED_SWITCH and HUMAN_SIDE not in state.pending_switches:
            return entries
        for labeled in _label_actions(state, HUMAN_SIDE):
            entries.append({
                "kind": labeled.kind,
                "label": f"{labeled.kind}:{labeled.label}",
                "display": labeled.display,
            })
        return entries

    def _parse_action_label(state: BattleState, label: str) -> Optional[Action]:
        if state.finished:
            return None
        if state.phase == PHASE_FORCED_SWITCH and HUMAN_SIDE not in state.pending_switches:
            return None
        for labeled in _label_actions(state, HUMAN_SIDE):
            if f"{labeled.kind}:{labeled.label}" == label:
                return labeled.action
        return None

    def human_view(session: Session) -> dict:
        state = session.state
        own = state.side(HUMAN_SIDE)
        opp = state.side(AGENT_SIDE)
        finished = state.finished or session.forfeited

        team = []
        for i, mon in enumerate(own.team):
            team.append({
                "species": mon.species,
                "types": list(mon.types),
                "hp": mon.current_hp,
                "max_hp": mon.max_hp,
                "hp_percent": round(100 * mon.current_hp / mon.max_hp),
                "status": mon.status,
                "stages": dict(mon.stages),
                "fainted": mon.fainted,
                "active": i == own.active_index,
                "ability": mon.ability,
                "moves": [{
                    "name": m,
                    "type": dex.moves[m].type,
                    "category": dex.moves[m].category,
                    "power": dex.moves[m].power,
                    "accuracy": dex.moves[m].accuracy,
                } for m in mon.moves],
            })

        revealed = []
        for i in sorted(opp.revealed):
            mon = opp.team[i]
            revealed.append({
                "species": mon.species,
                "types": list(mon.types),
                "hp_percent": round(100 * mon.current_hp / mon.max_hp),
                "status": mon.status,
                "stages": dict(mon.stages) if i == opp.active_index else {},
                "fainted": mon.fainted,
                "active": i == opp.active_index and not mon.fainted,
                "known_moves": list(mon.revealed_moves),
            })

        view = {
            "battle_id": session.battle_id,
            "phase": "finished" if finished else state.phase,
            "turn": state.field.turn_number,
            "your_turn": (not finished and (
                state.phase != PHASE_FORCED_SWITCH or HUMAN_SIDE in state.pending_switches)),
            "you": {"active_index": own.active_index, "team": team,
                    "hazards": dict(own.hazards)},
            "opponent": {
                "revealed": revealed,
                "unrevealed_count": 6 - len(opp.revealed),
                "hazards": dict(opp.hazards),
            },
            "field": {
                "weather": state.field.weather,
                "weather_turns": state.field.weather_turns,
                "turn_number": state.field.turn_number,
            },
            "legal_actions": _menu(state) if not finished else [],
            "finished": finished,
            "winner": _winner_label(state) if finished else None,
            "scores": ([battle_score(state, 0), battle_score(state, 1)]
                       if state.finished else None),
        }
        return view

    def _winner_label(state: BattleState) -> Optional[str]:
        if not state.finished:
            return "opponent"  # only reachable on forfeit
        if state.winner is None:
            return "draw"
        return "you" if state.winner == HUMAN_SIDE else "opponent"

    def public_record(state: BattleState, record) -> dict:
        """Turn record with the opponent's absolute HP rewritten as fractions."""
        data = record.to_dict()
        max_by_species = {p.species: p.max_hp for p in state.side(AGENT_SIDE).team}

        def scrub(event: dict) -> dict:
            event = dict(event)
            if event.get("side") == AGENT_SIDE and event.get("pokemon") in max_by_species:
                max_hp = max_by_species[event["pokemon"]]
                if "amount" in event:
                    event["fraction"] = round(event.pop("amount") / max_hp, 4)
                if "hp_left" in event:
                    event["hp_left_fraction"] = round(event.pop("hp_left") / max_hp, 4)
            return event

        data["events"] = [scrub(e) for e in data["events"]]
        own_hp = [[hp for hp in side_hp] for side_hp in data.pop("hp_before")][HUMAN_SIDE]
        data["your_hp_before"] = own_hp
        data["your_hp_after"] = data.pop("hp_after")[HUMAN_SIDE]
        return data

    return app


def serve(port: int = 8000, host: str = "127.0.0.1", **kwargs) -> None:
    """Run the battle service with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(make_app(**kwargs), host=host, port=port, log_level="info")
