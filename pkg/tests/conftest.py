import random

import pytest

from pokearena.dex import load_bundled
from pokearena.engine import make_instance, new_battle, random_team


@pytest.fixture(scope="session")
def dex():
    return load_bundled()


@pytest.fixture
def fixed_teams(dex):
    """Two fixed, non-overlapping teams for deterministic scenario tests."""
    team_a = [
        make_instance(dex, "Kingler", ["Crabhammer", "X-Scissor", "Rock Slide", "Aqua Jet"]),
        make_instance(dex, "Alakazam", ["Psychic", "Psyshock", "Dazzling Gleam", "Recover"]),
        make_instance(dex, "Charizard", ["Flamethrower", "Fire Blast", "Air Slash", "Dragon Claw"]),
        make_instance(dex, "Snorlax", ["Body Slam", "Crunch", "Earthquake", "Slack Off"]),
        make_instance(dex, "Skarmory", ["Iron Head", "Drill Peck", "Spikes", "Roost"]),
        make_instance(dex, "Jolteon", ["Thunderbolt", "Thunder", "Agility", "Quick Attack"]),
    ]
    team_b = [
        make_instance(dex, "Toxicroak", ["Poison Jab", "Drain Punch", "Sucker Punch", "Swords Dance"]),
        make_instance(dex, "Venusaur", ["Energy Ball", "Giga Drain", "Sludge Bomb", "Toxic"]),
        make_instance(dex, "Rhydon", ["Earthquake", "Stone Edge", "Rock Slide", "Megahorn"]),
        make_instance(dex, "Blissey", ["Toxic", "Soft-Boiled", "Protect", "Body Slam"]),
        make_instance(dex, "Gengar", ["Shadow Ball", "Sludge Bomb", "Dark Pulse", "Hypnosis"]),
        make_instance(dex, "Dragonite", ["Outrage", "Dragon Claw", "Dragon Dance", "Extreme Speed"]),
    ]
    return team_a, team_b


@pytest.fixture
def fresh_battle(dex, fixed_teams):
    team_a, team_b = fixed_teams
    return new_battle(dex, team_a, team_b, seed=42)


def play_out(dex, policy_a, policy_b, seed, turn_cap=200, on_step=None):
    """Run one battle with random teams; optional per-step callback for checks."""
    from pokearena import engine

    rng = random.Random(seed)
    team_a = random_team(rng, dex)
    team_b = random_team(rng, dex)
    state = new_battle(dex, team_a, team_b, seed, turn_cap=turn_cap)
    policy_a.start_battle(state, 0)
    policy_b.start_battle(state, 1)
    while not state.finished:
        if state.phase == engine.PHASE_FORCED_SWITCH:
            for side in list(state.pending_switches):
                if state.finished:
                    break
                pol = policy_a if side == 0 else policy_b
                engine.forced_switch(state, side, pol.choose(state, side))
        else:
            record = engine.step(state, policy_a.choose(state, 0), policy_b.choose(state, 1))
            if on_step is not None:
                on_step(state, record)
    return state
