"""Battle log persistence and replay verification."""

import json

import pytest

from pokearena.harness.battlelog import (
    LogError,
    ReplayMismatch,
    read_battle_log,
    replay,
    write_battle_log,
)
from pokearena.harness.runner import RunConfig, run_battles


@pytest.fixture
def run_dir(tmp_path, dex):
    config = RunConfig(agent_a="maxpower", agent_b="random", n=3, seed=21,
                       out_dir=str(tmp_path))
    run_battles(config)
    return tmp_path


class TestRoundTrip:
    def test_read_back_what_was_written(self, run_dir):
        path = run_dir / "logs" / "battle_0000.jsonl"
        log = read_battle_log(path)
        assert log.header["schema_version"] == 1
        assert log.header["policies"] == ["maxpower", "random"]
        assert len(log.header["teams"]) == 2
        assert log.records[0].kind == "start"
        assert log.result["scores"][0] + log.result["scores"][1] == 12

    def test_replay_matches(self, run_dir, dex):
        for path in sorted((run_dir / "logs").glob("*.jsonl")):
            state = replay(path, dex, verify=True)
            assert state.finished

    def test_replay_twice_identical(self, run_dir, dex):
        path = run_dir / "logs" / "battle_0001.jsonl"
        a = replay(path, dex).to_dict()
        b = replay(path, dex).to_dict()
        assert a == b


class TestCorruption:
    def test_truncated_file_raises(self, run_dir, dex, tmp_path):
        src = run_dir / "logs" / "battle_0000.jsonl"
        lines = src.read_text().splitlines()
        broken = tmp_path / "truncated.jsonl"
        broken.write_text("\n".join(lines[:-1]) + "\n")  # drop the result record
        with pytest.raises(LogError, match="missing result"):
            read_battle_log(broken)

    def test_corrupted_json_raises(self, run_dir, tmp_path):
        src = run_dir / "logs" / "battle_0000.jsonl"
        lines = src.read_text().splitlines()
        lines[2] = lines[2][: len(lines[2]) // 2]
        broken = tmp_path / "corrupt.jsonl"
        broken.write_text("\n".join(lines) + "\n")
        with pytest.raises(LogError, match="corrupted"):
            read_battle_log(broken)

    def test_schema_version_mismatch(self, run_dir, tmp_path):
        src = run_dir / "logs" / "battle_0000.jsonl"
        lines = src.read_text().splitlines()
        header = json.loads(lines[0])
        header["schema_version"] = 99
        lines[0] = json.dumps(header)
        broken = tmp_path / "versioned.jsonl"
        broken.write_text("\n".join(lines) + "\n")
        with pytest.raises(LogError, match="schema version"):
            read_battle_log(broken)

    def test_tampered_result_fails_verification(self, run_dir, dex, tmp_path):
        src = run_dir / "logs" / "battle_0000.jsonl"
        lines = src.read_text().splitlines()
        result = json.loads(lines[-1])
        result["turns"] += 1
        lines[-1] = json.dumps(result)
        tampered = tmp_path / "tampered.jsonl"
        tampered.write_text("\n".join(lines) + "\n")
        with pytest.raises(ReplayMismatch):
            replay(tampered, dex, verify=True)
