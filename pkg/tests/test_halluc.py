"""Hallucination test: ground truth, oracle/constant baselines, parsing."""

import pytest

from pokearena.dex import TYPE_NAMES
from pokearena.harness.halluc import (
    CLASS_OF_MULTIPLIER,
    ChartOracleEndpoint,
    ConstantAnswerEndpoint,
    ConfusionMatrix,
    build_prompt,
    hallucination_test,
    parse_answer,
)


class TestGroundTruth:
    def test_labels_agree_with_effectiveness_all_324(self, dex):
        for attack in TYPE_NAMES:
            for defend in TYPE_NAMES:
                truth = CLASS_OF_MULTIPLIER[dex.chart.single(attack, defend)]
                assert truth == CLASS_OF_MULTIPLIER[dex.effectiveness(attack, [defend])]

    def test_prompt_mentions_both_types_and_choices(self):
        prompt = build_prompt("fire", "grass")
        assert "fire" in prompt and "grass" in prompt
        for choice in ("A. super-effective (2x damage)", "B. standard (1x damage)",
                       "C. ineffective (0.5x damage)", "D. no effect (0x damage)"):
            assert choice in prompt


class TestAnswerParsing:
    def test_bare_letter(self):
        assert parse_answer("A") == "A"
        assert parse_answer("The answer is C.") == "C"

    def test_keyword_fallback(self):
        assert parse_answer("that would be super-effective!") == "A"
        assert parse_answer("no effect whatsoever") == "D"

    def test_garbage_is_invalid(self):
        assert parse_answer("hmmm") == "invalid"
        assert parse_answer("") == "invalid"


class TestEndpoints:
    def test_oracle_is_perfect(self, dex):
        matrix = hallucination_test(ChartOracleEndpoint(dex.chart), dex)
        assert matrix.total == 324
        assert matrix.diagonal() == (51, 204, 61, 8)
        assert matrix.accuracy == 1.0
        assert matrix.invalid == 0

    def test_constant_b_accuracy(self, dex):
        matrix = hallucination_test(ConstantAnswerEndpoint("B"), dex)
        assert matrix.total == 324
        assert matrix.correct == 204
        assert matrix.accuracy == pytest.approx(204 / 324)
        # everything lands in the predicted-B column
        for truth in "ACD":
            assert matrix.counts[truth]["B"] == dict(zip("ACD", (51, 61, 8)))[truth]

    def test_row_sums_match_chart_classes(self, dex):
        matrix = hallucination_test(ConstantAnswerEndpoint("B"), dex)
        assert matrix.row_sums() == (51, 204, 61, 8)

    def test_invalid_answers_tracked_separately(self, dex):
        matrix = hallucination_test(ConstantAnswerEndpoint("whatever"), dex)
        assert matrix.invalid == 324
        assert matrix.accuracy == 0.0
        assert matrix.row_sums() == (51, 204, 61, 8)


class TestRendering:
    def test_table_layout(self, dex):
        from pokearena.harness.report import render_confusion_table
        matrix = hallucination_test(ChartOracleEndpoint(dex.chart), dex)
        table = render_confusion_table(matrix, "oracle")
        assert "accuracy: 100.00%" in table
        lines = table.splitlines()
        assert lines[1].split()[:5] == ["Class", "A", "B", "C", "D"]
