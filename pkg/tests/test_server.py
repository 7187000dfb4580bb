"""Battle service API: contract walk, isolation, and information hiding."""

import json

import pytest
from fastapi.testclient import TestClient

from pokearena.harness.server import make_app


@pytest.fixture
def client():
    return TestClient(make_app(default_agent="maxpower", seed=2024))


def create(client, seed=11):
    response = client.post("/battles", json={"seed": seed})
    assert response.status_code == 200
    data = response.json()
    return data["battle_id"], data["state"]


def play_to_end(client, battle_id, max_steps=400, pick=0):
    state = client.get(f"/battles/{battle_id}/state").json()
    steps = 0
    while not state["finished"]:
        label = state["legal_actions"][pick % len(state["legal_actions"])]["label"]
        response = client.post(f"/battles/{battle_id}/action", json={"action": label})
        assert response.status_code == 200, response.text
        state = response.json()["state"]
        steps += 1
        assert steps < max_steps, "battle did not terminate"
    return state


ALLOWED_OPPONENT_KEYS = {
    "species", "types", "hp_percent", "status", "stages", "fainted",
    "active", "known_moves",
}


def assert_no_hidden_leak(state):
    opponent = state["opponent"]
    assert set(opponent.keys()) <= {"revealed", "unrevealed_count", "hazards"}
    for mon in opponent["revealed"]:
        assert set(mon.keys()) <= ALLOWED_OPPONENT_KEYS
        # absolute numbers would leak stats
        assert "hp" not in mon and "max_hp" not in mon and "moves" not in mon
    assert len(opponent["revealed"]) + opponent["unrevealed_count"] == 6


class TestHealth:
    def test_healthz(self, client):
        assert client.get("/healthz").json() == {"status": "ok"}


class TestContractWalk:
    def test_create_state_act_event(self, client):
        battle_id, state = create(client)
        assert len(state["legal_actions"]) == 9
        assert state["your_turn"] is True
        label = state["legal_actions"][0]["label"]
        response = client.post(f"/battles/{battle_id}/action", json={"action": label})
        assert response.status_code == 200
        with client.stream("GET", f"/battles/{battle_id}/events",
                           params={"wait": "false"}) as stream:
            first_chunk = next(stream.iter_lines())
        assert first_chunk.startswith("data:")

    def test_illegal_action_rejected_with_menu(self, client):
        battle_id, state = create(client)
        before = state
        response = client.post(f"/battles/{battle_id}/action",
                               json={"action": "move:Imaginary"})
        assert response.status_code == 400
        detail = response.json()["detail"]
        assert "legal_actions" in detail
        assert set(detail["legal_actions"]) == {a["label"] for a in before["legal_actions"]}
        after = client.get(f"/battles/{battle_id}/state").json()
        assert after["turn"] == before["turn"]

    def test_unknown_battle_404(self, client):
        assert client.get("/battles/nope/state").status_code == 404

    def test_full_battle_scores_sum_to_twelve(self, client):
        battle_id, _ = create(client, seed=77)
        state = play_to_end(client, battle_id)
        assert state["finished"]
        assert sum(state["scores"]) == 12
        assert state["winner"] in ("you", "opponent", "draw")

    def test_forced_switch_panel_offers_only_switches(self, client):
        # play with the first move until our active faints, then check the menu
        battle_id, state = create(client, seed=5)
        for _ in range(300):
            if state["finished"]:
                pytest.skip("battle ended without a forced switch for the human")
            if state["phase"] == "awaiting_forced_switch":
                kinds = {a["kind"] for a in state["legal_actions"]}
                assert kinds == {"switch"}
                return
            label = state["legal_actions"][0]["label"]
            state = client.post(f"/battles/{battle_id}/action",
                                json={"action": label}).json()["state"]
        pytest.fail("no forced switch encountered")

    def test_finished_battle_rejects_actions(self, client):
        battle_id, _ = create(client, seed=77)
        play_to_end(client, battle_id)
        response = client.post(f"/battles/{battle_id}/action", json={"action": "move:X"})
        assert response.status_code == 409


class TestInformationHiding:
    def test_every_payload_hides_unrevealed(self, client):
        battle_id, state = create(client, seed=31)
        assert_no_hidden_leak(state)
        steps = 0
        while not state["finished"] and steps < 300:
            label = state["legal_actions"][0]["label"]
            state = client.post(f"/battles/{battle_id}/action",
                                json={"action": label}).json()["state"]
            assert_no_hidden_leak(state)
            steps += 1

    def test_event_stream_uses_fractions_for_opponent(self, client):
        battle_id, state = create(client, seed=31)
        label = next(a["label"] for a in state["legal_actions"] if a["kind"] == "move")
        client.post(f"/battles/{battle_id}/action", json={"action": label})
        with client.stream("GET", f"/battles/{battle_id}/events",
                           params={"wait": "false"}) as stream:
            events = []
            for line in stream.iter_lines():
                if line.startswith("data:"):
                    events.append(json.loads(line[5:]))
        turn_events = [e for e in events if e["type"] == "turn"]
        for event in turn_events:
            for item in event["record"]["events"]:
                if item.get("side") == 1 and item.get("type") in ("damage", "residual",
                                                                  "hazard_damage", "heal"):
                    assert "amount" not in item and "hp_left" not in item
                    assert "fraction" in item or "hp_left_fraction" in item

    def test_decisions_hidden_until_finished(self, client):
        battle_id, _ = create(client, seed=41)
        assert client.get(f"/battles/{battle_id}/decisions").status_code == 409
        play_to_end(client, battle_id)
        response = client.get(f"/battles/{battle_id}/decisions")
        assert response.status_code == 200
        assert "decisions" in response.json()


class TestIsolation:
    def test_two_sessions_are_independent(self, client):
        id1, state1 = create(client, seed=51)
        id2, state2 = create(client, seed=52)
        assert id1 != id2
        label = state1["legal_actions"][0]["label"]
        client.post(f"/battles/{id1}/action", json={"action": label})
        after1 = client.get(f"/battles/{id1}/state").json()
        after2 = client.get(f"/battles/{id2}/state").json()
        assert after1["turn"] == 2
        assert after2["turn"] == 1  # untouched

    def test_session_timeout_forfeits(self):
        client = TestClient(make_app(default_agent="maxpower", seed=1,
                                     session_ttl=0.0))
        battle_id, state = create(client, seed=61)
        import time
        time.sleep(0.01)
        response = client.post(f"/battles/{battle_id}/action",
                               json={"action": state["legal_actions"][0]["label"]})
        assert response.status_code == 409
        final = client.get(f"/battles/{battle_id}/state").json()
        assert final["finished"] and final["winner"] == "opponent"
