"""Reference policies: Random, MaxPower, and the heuristic bot ladder."""

import random

from pokearena.baselines import (
    HeuristicBotPolicy,
    MaxPowerPolicy,
    RandomPolicy,
    heuristic_bot,
    maxpower_policy,
    random_policy,
)
from pokearena.engine import (
    Action,
    legal_actions,
    make_instance,
    new_battle,
    step,
)


class TestRandomPolicy:
    def test_uniform_over_nine_actions(self, fresh_battle):
        rng = random.Random(123)
        counts = {}
        n = 100_000
        for _ in range(n):
            action = random_policy(fresh_battle, 0, rng)
            key = (action.kind, action.name, action.slot)
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 9
        for key, count in counts.items():
            assert abs(count / n - 1 / 9) < 0.02, (key, count / n)

    def test_single_legal_action(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        state = new_battle(dex, team_a, team_b, seed=4)
        for i, mon in enumerate(state.side(0).team):
            if i != state.side(0).active_index:
                mon.current_hp = 0
                mon.fainted = True
        active = state.side(0).active
        active.moves = active.moves[:1]
        action = random_policy(state, 0, random.Random(0))
        assert action == Action.move(active.moves[0])

    def test_fixed_seed_fixed_sequence(self, fresh_battle):
        seq1 = [random_policy(fresh_battle, 0, random.Random(9)) for _ in range(5)]
        seq2 = [random_policy(fresh_battle, 0, random.Random(9)) for _ in range(5)]
        assert seq1 == seq2


class TestMaxPower:
    def test_argmax_power(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        team_a[0] = make_instance(dex, "Entei",
                                  ["Sacred Fire", "Extreme Speed", "Flamethrower", "Fire Fang"])
        state = new_battle(dex, team_a, team_b, seed=5)
        # powers: Sacred Fire 100, Extreme Speed 80, Flamethrower 90, Fire Fang 65
        assert maxpower_policy(state, 0) == Action.move("Sacred Fire")

    def test_all_status_takes_first_by_dex_order(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        team_a[0] = make_instance(dex, "Blissey",
                                  ["Toxic", "Soft-Boiled", "Protect", "Thunder Wave"])
        state = new_battle(dex, team_a, team_b, seed=5)
        action = maxpower_policy(state, 0)
        assert action == Action.move(state.side(0).active.moves[0])
        assert state.dex.moves[action.name].power == 0

    def test_tie_breaks_by_dex_order(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        # Surf and Aqua Tail are both power 90; instance movesets are in dex order
        team_a[0] = make_instance(dex, "Blastoise", ["Surf", "Aqua Tail", "Protect", "Ice Beam"])
        state = new_battle(dex, team_a, team_b, seed=5)
        action = maxpower_policy(state, 0)
        moves = state.side(0).active.moves
        tied = [m for m in moves if state.dex.moves[m].power == 90]
        assert action.name == tied[0]
        assert moves.index("Surf") < moves.index("Aqua Tail") \
            if state.dex.move_index("Surf") < state.dex.move_index("Aqua Tail") else True

    def test_never_switches_voluntarily(self, dex):
        from pokearena.baselines import RandomPolicy as RP
        from conftest import play_out
        state = play_out(dex, MaxPowerPolicy(), RP(3), seed=11)
        for record in state.log:
            if record.kind == "turn":
                assert record.actions[0]["kind"] == "move"


class TestHeuristicBot:
    def test_prefers_effective_stab_over_raw_power(self, dex, fixed_teams):
        # 80-power STAB at 2x (80*2*1.5=240) beats neutral 120 non-STAB (120)
        team_a, team_b = fixed_teams
        team_a[0] = make_instance(dex, "Scizor",
                                  ["Iron Head", "X-Scissor", "Quick Attack", "Swords Dance"])
        team_b[0] = make_instance(dex, "Alakazam",
                                  ["Psychic", "Psyshock", "Recover", "Agility"])
        state = new_battle(dex, team_a, team_b, seed=6)
        state.side(0).active.stages["atk"] = 1  # skip the boost rung
        # X-Scissor (bug 80, STAB, 2x vs psychic) = 240; Iron Head (steel 80, STAB, 0.5x) = 60
        action = heuristic_bot(state, 0)
        assert action == Action.move("X-Scissor")

    def test_turn_one_sets_hazard(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        team_a[0] = make_instance(dex, "Golem",
                                  ["Earthquake", "Stone Edge", "Stealth Rock", "Rock Slide"])
        state = new_battle(dex, team_a, team_b, seed=6)
        assert heuristic_bot(state, 0) == Action.move("Stealth Rock")
        step(state, Action.move("Stealth Rock"), Action.move("Swords Dance"))
        assert state.side(1).hazards["rocks"] == 1
        # hazard present now: the rung is skipped on the next turn
        assert heuristic_bot(state, 0) != Action.move("Stealth Rock")

    def test_boost_rung_when_safe_and_unboosted(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        team_a[0] = make_instance(dex, "Garchomp",
                                  ["Earthquake", "Outrage", "Swords Dance", "Stone Edge"])
        team_b[0] = make_instance(dex, "Blissey",
                                  ["Toxic", "Soft-Boiled", "Protect", "Body Slam"])
        state = new_battle(dex, team_a, team_b, seed=6)
        assert heuristic_bot(state, 0) == Action.move("Swords Dance")
        state.side(0).active.stages["atk"] = 2
        assert heuristic_bot(state, 0) != Action.move("Swords Dance")

    def test_no_boost_at_type_disadvantage(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        team_a[0] = make_instance(dex, "Garchomp",
                                  ["Earthquake", "Outrage", "Swords Dance", "Stone Edge"])
        team_b[0] = make_instance(dex, "Kyurem",
                                  ["Ice Beam", "Dragon Pulse", "Blizzard", "Outrage"])
        state = new_battle(dex, team_a, team_b, seed=6)
        # Kyurem's ice and dragon both hit Garchomp (dragon/ground) for 2x+
        assert heuristic_bot(state, 0) != Action.move("Swords Dance")

    def test_switches_when_active_cannot_touch_opponent(self, dex, fixed_teams):
        team_a, team_b = fixed_teams
        # active Snorlax with only normal moves vs Gengar: 0x; Alakazam bench hits 2x
        team_a[0] = make_instance(dex, "Snorlax",
                                  ["Body Slam", "Slack Off", "Protect", "Bulk Up"])
        team_a[1] = make_instance(dex, "Alakazam",
                                  ["Psychic", "Psyshock", "Recover", "Agility"])
        team_b[0] = make_instance(dex, "Gengar",
                                  ["Shadow Ball", "Sludge Bomb", "Dark Pulse", "Hypnosis"])
        state = new_battle(dex, team_a, team_b, seed=6)
        state.side(0).active.stages["atk"] = 1  # skip boost rung
        action = heuristic_bot(state, 0)
        # hand-scored: active best = 0 (normal vs ghost, Bulk Up not attack);
        # Alakazam best = 90 * 2 * 1.5 * 0.8 = 216 -> switch to slot 1
        assert action == Action.switch(1)

    def test_bot_is_rng_free_and_pure(self, fresh_battle):
        first = heuristic_bot(fresh_battle, 0)
        for _ in range(5):
            assert heuristic_bot(fresh_battle, 0) == first


class TestOrderingDirection:
    def test_bot_beats_random_and_maxpower_beats_random_small(self, dex):
        from conftest import play_out
        bot_wins = sum(
            play_out(dex, HeuristicBotPolicy(), RandomPolicy(i), 7000 + i).winner == 0
            for i in range(20))
        mp_wins = sum(
            play_out(dex, MaxPowerPolicy(), RandomPolicy(i), 8000 + i).winner == 0
            for i in range(20))
        assert bot_wins >= 15
        assert mp_wins >= 13
