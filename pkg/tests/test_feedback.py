"""Feedback derivation from turn records."""

from pokearena.baselines import RandomPolicy
from pokearena.engine import Action, step
from pokearena.feedback import derive_feedback, effectiveness_class

from conftest import play_out


class TestEffectivenessClass:
    def test_thresholds(self):
        assert effectiveness_class(4.0) == "super-effective"
        assert effectiveness_class(2.0) == "super-effective"
        assert effectiveness_class(1.0) == "standard"
        assert effectiveness_class(0.5) == "ineffective"
        assert effectiveness_class(0.25) == "ineffective"
        assert effectiveness_class(0.0) == "no effect"


class TestDeriveFeedback:
    def test_immune_move_produces_no_effect_item(self, fresh_battle):
        # Kingler's water move into Dry Skin Toxicroak
        record = step(fresh_battle, Action.move("Crabhammer"), Action.move("Swords Dance"))
        items = derive_feedback(None, record, fresh_battle, side=0)
        eff = [i for i in items if i.kind == "effectiveness"]
        assert len(eff) == 1
        assert "no effect" in eff[0].text
        assert "immune" in eff[0].text
        assert "Crabhammer" in eff[0].text

    def test_double_switch_has_no_combat_items(self, fresh_battle):
        record = step(fresh_battle, Action.switch(2), Action.switch(2))
        items = derive_feedback(None, record, fresh_battle, side=0)
        kinds = {i.kind for i in items}
        assert "hp_change" not in kinds
        assert "effectiveness" not in kinds
        assert "execution_order" not in kinds

    def test_dragon_dance_reports_both_boosts(self, dex, fixed_teams):
        from pokearena.engine import new_battle
        team_a, team_b = fixed_teams
        state = new_battle(dex, team_a, team_b, seed=9)
        state.sides[1].active_index = 5  # Dragonite with Dragon Dance
        state.side(1).revealed.add(5)
        record = step(state, Action.move("Rock Slide"), Action.move("Dragon Dance"))
        items = derive_feedback(None, record, state, side=0)
        boost_texts = [i.text for i in items if i.kind == "move_effect" and "rose" in i.text]
        assert any("atk" in t for t in boost_texts)
        assert any("spe" in t for t in boost_texts)

    def test_execution_order_reported_when_both_moved(self, fresh_battle):
        record = step(fresh_battle, Action.move("Crabhammer"), Action.move("Poison Jab"))
        items = derive_feedback(None, record, fresh_battle, side=0)
        order = [i for i in items if i.kind == "execution_order"]
        assert len(order) == 1
        assert "moved first" in order[0].text

    def test_feedback_mentions_only_this_turn(self, fresh_battle):
        first = step(fresh_battle, Action.move("Crabhammer"), Action.move("Poison Jab"))
        second = step(fresh_battle, Action.move("X-Scissor"), Action.move("Poison Jab"))
        items = derive_feedback(None, second, fresh_battle, side=0)
        assert all(i.turn == second.turn for i in items)
        assert not any("Crabhammer" in i.text for i in items)

    def test_every_damage_event_yields_matching_items(self, dex):
        from pokearena.feedback import effectiveness_class as cls

        def on_step(state, record):
            items = derive_feedback(None, record, state, side=0)
            damage_events = [e for e in record.events
                             if e.get("type") == "damage" and "multiplier" in e]
            eff_items = [i for i in items if i.kind == "effectiveness"]
            immune_events = [e for e in record.events if e.get("type") == "immune"]
            assert len(eff_items) == len(damage_events) + len(immune_events)
            for event in damage_events:
                mon = state.side(event["side"]).team
                changed = [i for i in items if i.kind == "hp_change"
                           and event["pokemon"] in i.text]
                assert changed, f"damage to {event['pokemon']} produced no hp_change"
                expected = cls(event["multiplier"])
                label = {"super-effective": "super-effective",
                         "standard": "standard",
                         "ineffective": "ineffective"}[expected]
                assert any(label in i.text and event["move"] in i.text for i in eff_items)

        for seed in range(8):
            play_out(dex, RandomPolicy(seed), RandomPolicy(seed + 50), seed + 300,
                     on_step=on_step)
