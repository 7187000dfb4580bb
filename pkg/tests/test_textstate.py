"""Observation building: sections, fog of war, labels, determinism."""

from pokearena.engine import Action, step
from pokearena.protocol import KnownState, apply_stream
from pokearena.textstate import describe


class TestEngineObservation:
    def test_four_sections_present(self, fresh_battle):
        obs = describe(fresh_battle, 0)
        assert obs.own_team.startswith("Own team:")
        assert obs.opponent_team.startswith("Opponent team:")
        assert obs.field.startswith("Battle field:")
        assert obs.turn_history.startswith("Turn history")

    def test_fresh_battle_one_revealed_five_unrevealed(self, fresh_battle):
        obs = describe(fresh_battle, 0)
        assert "5 unrevealed Pokemon" in obs.opponent_team
        assert "Toxicroak" in obs.opponent_team  # the opposing lead

    def test_nine_labeled_actions(self, fresh_battle):
        obs = describe(fresh_battle, 0)
        assert len(obs.legal_actions) == 9
        labels = [c.label for c in obs.legal_actions]
        assert len(set((c.kind, c.label) for c in obs.legal_actions)) == 9
        assert "Crabhammer" in labels

    def test_byte_identical_for_same_state(self, fresh_battle):
        a = describe(fresh_battle, 0)
        b = describe(fresh_battle, 0)
        assert a.sections() == b.sections()
        assert [c.display for c in a.legal_actions] == [c.display for c in b.legal_actions]

    def test_no_unrevealed_opponent_leak(self, fresh_battle):
        obs = describe(fresh_battle, 0)
        hidden = [mon.species for i, mon in enumerate(fresh_battle.side(1).team)
                  if i not in fresh_battle.side(1).revealed]
        assert hidden  # sanity: something is hidden on turn 1
        for species in hidden:
            assert species not in obs.opponent_team
            assert species not in obs.turn_history

    def test_own_team_fully_described(self, fresh_battle):
        obs = describe(fresh_battle, 0)
        for mon in fresh_battle.side(0).team:
            assert mon.species in obs.own_team
            for move in mon.moves:
                assert move in obs.own_team

    def test_history_names_actions_not_outcomes(self, fresh_battle):
        step(fresh_battle, Action.move("Crabhammer"), Action.move("Poison Jab"))
        obs = describe(fresh_battle, 0)
        assert "Crabhammer" in obs.turn_history
        assert "Poison Jab" in obs.turn_history
        # outcome words belong to the feedback channel, not the history
        for banned in ("super-effective", "no effect", "ineffective", "damage"):
            assert banned not in obs.turn_history

    def test_history_window_bounds(self, dex, fresh_battle):
        for _ in range(8):
            if fresh_battle.finished:
                break
            a = describe(fresh_battle, 0).legal_actions[0].action
            b = describe(fresh_battle, 1).legal_actions[0].action
            if fresh_battle.phase == "awaiting_actions":
                step(fresh_battle, a, b)
            else:
                break
        obs = describe(fresh_battle, 0, window=3)
        turn_lines = [l for l in obs.turn_history.splitlines() if l.startswith("- turn")]
        assert len(turn_lines) <= 3

    def test_hazard_and_weather_in_field(self, fresh_battle):
        fresh_battle.side(1).hazards["rocks"] = 1
        fresh_battle.field.weather = "rain"
        fresh_battle.field.weather_turns = 3
        obs = describe(fresh_battle, 0)
        assert "rain" in obs.field
        assert "rocks x1" in obs.field


class TestTrackerObservation:
    def test_tracker_observation_builds(self):
        from pathlib import Path
        lines = (Path(__file__).parent / "fixtures" / "protocol" / "requests.log").read_text().splitlines()
        tracker = apply_stream(KnownState(own_side="p1"), lines[:3])
        obs = describe(tracker)
        assert "Starmie" in obs.own_team
        assert len([c for c in obs.legal_actions if c.kind == "move"]) == 4
        # Charizard is 0 fnt in the request, so it is not a switch option
        switch_labels = [c.label for c in obs.legal_actions if c.kind == "switch"]
        assert "Charizard" not in switch_labels
        assert len(switch_labels) == 4
