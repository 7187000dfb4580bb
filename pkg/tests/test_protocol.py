"""Wire protocol parsing, the known-state tracker, and choice serialization."""

import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pokearena import protocol
from pokearena.engine import Action
from pokearena.protocol import (
    Boost,
    ChoiceError,
    Damage,
    Faint,
    Heal,
    Immune,
    KnownState,
    Move,
    RecordedStreamGateway,
    Request,
    Status,
    SwitchIn,
    Turn,
    Unknown,
    Weather,
    Win,
    apply_message,
    apply_stream,
    parse_line,
    serialize_choice,
)

FIXTURES = Path(__file__).parent / "fixtures" / "protocol"


def fixture_lines(name):
    return (FIXTURES / name).read_text().splitlines()


class TestParseLine:
    def test_move_line(self):
        msg = parse_line("|move|p1a: Charizard|Fire Blast|p2a: Venusaur")
        assert msg == Move(side="p1", pokemon="Charizard", move="Fire Blast", target="Venusaur")

    def test_faint_line(self):
        assert parse_line("|faint|p2a: Venusaur") == Faint(side="p2", pokemon="Venusaur")

    def test_empty_line_is_unknown(self):
        assert parse_line("") == Unknown(raw="")

    def test_switch_with_hp(self):
        msg = parse_line("|switch|p1a: Charizard|Charizard, L80|266/266")
        assert msg == SwitchIn(side="p1", pokemon="Charizard", hp_fraction=1.0)

    def test_damage_fraction(self):
        msg = parse_line("|-damage|p2a: Venusaur|92/268")
        assert isinstance(msg, Damage)
        assert msg.hp_fraction == pytest.approx(92 / 268)

    def test_fainted_hp(self):
        msg = parse_line("|-damage|p2a: Venusaur|0 fnt")
        assert msg.hp_fraction == 0.0

    def test_boost_and_unboost(self):
        up = parse_line("|-boost|p2a: Gyarados|atk|1")
        down = parse_line("|-unboost|p2a: Gyarados|def|2")
        assert up == Boost(side="p2", pokemon="Gyarados", stat="atk", delta=1)
        assert down == Boost(side="p2", pokemon="Gyarados", stat="def", delta=-2)

    def test_status_immune_weather_win_turn(self):
        assert parse_line("|-status|p1a: Starmie|par") == Status(side="p1", pokemon="Starmie", condition="par")
        assert parse_line("|-immune|p1a: Venusaur") == Immune(side="p1", pokemon="Venusaur")
        assert parse_line("|-weather|Sandstorm|[upkeep]") == Weather(kind="Sandstorm")
        assert parse_line("|win|Alice") == Win(player="Alice")
        assert parse_line("|turn|7") == Turn(number=7)

    def test_request_payload(self):
        line = fixture_lines("requests.log")[2]
        msg = parse_line(line)
        assert isinstance(msg, Request)
        assert msg.side_id == "p1"
        assert msg.move_names() == ["Surf", "Ice Beam", "Recover", "Thunderbolt"]
        assert len(msg.team()) == 6

    def test_malformed_recognized_tag_degrades_to_unknown(self):
        assert isinstance(parse_line("|move|garbage-without-position"), Unknown)
        assert isinstance(parse_line("|turn|not-a-number"), Unknown)
        assert isinstance(parse_line("|-damage|p1a: X|"), Unknown)
        assert isinstance(parse_line("|request|{broken json"), Unknown)

    def test_unrecognized_tag_is_unknown(self):
        assert isinstance(parse_line("|-supereffective|p2a: Venusaur"), Unknown)
        assert isinstance(parse_line("no leading pipe"), Unknown)

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=120))
    def test_totality_on_arbitrary_text(self, line):
        msg = parse_line(line)
        assert msg is not None

    @settings(max_examples=300, deadline=None)
    @given(st.binary(max_size=120))
    def test_totality_on_random_bytes(self, blob):
        msg = parse_line(blob.decode("latin-1"))
        assert msg is not None


class TestTracker:
    def test_switch_in_reveals_opponent(self):
        tracker = KnownState(own_side="p1")
        assert tracker.revealed_count() == 0
        apply_message(tracker, parse_line("|switch|p2a: Venusaur|Venusaur, L80|268/268"))
        assert tracker.revealed_count() == 1
        assert tracker.opponent_active == "Venusaur"

    def test_damage_to_zero_then_faint(self):
        tracker = KnownState(own_side="p1")
        apply_message(tracker, parse_line("|switch|p2a: Venusaur|Venusaur, L80|268/268"))
        apply_message(tracker, parse_line("|-damage|p2a: Venusaur|0 fnt"))
        apply_message(tracker, parse_line("|faint|p2a: Venusaur"))
        mon = tracker.opponents["Venusaur"]
        assert mon.fainted and mon.hp_fraction == 0.0

    def test_contradictory_message_is_anomaly(self):
        tracker = KnownState(own_side="p1")
        apply_message(tracker, parse_line("|-damage|p2a: Ghost|50/100"))
        assert tracker.anomalies
        assert tracker.revealed_count() == 0

    def test_unknown_messages_are_noops(self):
        tracker = KnownState(own_side="p1")
        before = (tracker.revealed_count(), tracker.turn, len(tracker.anomalies))
        apply_message(tracker, Unknown(raw="|weird|stuff"))
        assert (tracker.revealed_count(), tracker.turn, len(tracker.anomalies)) == before

    def test_full_fixture_consistent_with_win(self):
        tracker = apply_stream(KnownState(own_side="p1"), fixture_lines("battle1.log"))
        assert tracker.winner == "Alice"
        # all six opposing Pokemon were revealed and fainted
        assert tracker.revealed_count() == 6
        assert all(m.fainted for m in tracker.opponents.values())
        # our own survivors exist (Snorlax stood at the end)
        assert tracker.own_view["Snorlax"].hp_fraction > 0
        assert not tracker.anomalies

    def test_fixture_two_invariants(self):
        tracker = apply_stream(KnownState(own_side="p1"), fixture_lines("battle2.log"))
        assert tracker.winner == "Alice"
        assert tracker.weather == "sandstorm"
        for mon in list(tracker.opponents.values()) + list(tracker.own_view.values()):
            assert 0.0 <= mon.hp_fraction <= 1.0
        assert tracker.opponents["Gyarados"].boosts == {"atk": 1, "spe": 1, "def": -1}
        assert tracker.opponents["Umbreon"].status == "psn"
        assert not tracker.anomalies

    def test_replay_idempotence(self):
        lines = fixture_lines("battle2.log")
        t1 = apply_stream(KnownState(own_side="p1"), lines)
        t2 = apply_stream(KnownState(own_side="p1"), lines)
        assert t1 == t2

    def test_active_defined_after_every_switch_in(self):
        for name in ("battle1.log", "battle2.log"):
            tracker = KnownState(own_side="p1")
            for line in fixture_lines(name):
                msg = parse_line(line)
                apply_message(tracker, msg)
                if isinstance(msg, SwitchIn) and msg.side == "p2":
                    assert tracker.opponent_active is not None

    def test_corpus_parses_without_unknown_core_tags(self):
        core = ("|move|", "|switch|", "|-damage|", "|-heal|", "|faint|", "|turn|",
                "|-boost|", "|-unboost|", "|-status|", "|-immune|", "|-weather|", "|win|")
        for name in ("battle1.log", "battle2.log", "requests.log"):
            for line in fixture_lines(name):
                msg = parse_line(line)
                if line.startswith(core):
                    assert not isinstance(msg, Unknown), line


class TestSerializeChoice:
    @pytest.fixture
    def request_msg(self):
        return parse_line(fixture_lines("requests.log")[2])

    def test_move_by_request_slot(self, request_msg):
        assert serialize_choice(Action.move("Ice Beam"), request_msg) == "move 2"
        assert serialize_choice(Action.move("Surf"), request_msg) == "move 1"

    def test_move_case_insensitive(self, request_msg):
        assert serialize_choice(Action.move("ice beam"), request_msg) == "move 2"

    def test_switch_uses_one_based_team_position(self, request_msg):
        # bench slot 3 (Jolteon) -> "switch 4": the server indexes the active as 1
        assert serialize_choice(Action.switch(3), request_msg) == "switch 4"

    def test_move_not_in_request_errors(self, request_msg):
        with pytest.raises(ChoiceError):
            serialize_choice(Action.move("Earthquake"), request_msg)

    def test_switch_to_fainted_errors(self, request_msg):
        with pytest.raises(ChoiceError):
            serialize_choice(Action.switch(2), request_msg)  # Charizard is 0 fnt

    def test_switch_to_active_errors(self, request_msg):
        with pytest.raises(ChoiceError):
            serialize_choice(Action.switch(0), request_msg)


class TestGateway:
    def test_recorded_stream_delivers_requests(self):
        gateway = RecordedStreamGateway(fixture_lines("requests.log"), own_side="p1")
        seen = []

        def policy(request, tracker):
            seen.append((len(request.move_names()), tracker.turn))
            return Action.move(request.move_names()[0])

        tracker = gateway.run_battle(policy)
        assert len(seen) == 2
        assert gateway.choices == ["move 1", "move 1"]
        assert not gateway.aborted
        assert tracker.winner == "Alice"

    def test_truncated_stream_marks_aborted(self):
        lines = fixture_lines("requests.log")[:-1]  # drop the win line
        gateway = RecordedStreamGateway(lines, own_side="p1")
        gateway.run_battle(lambda request, tracker: Action.move(request.move_names()[0]))
        assert gateway.aborted
