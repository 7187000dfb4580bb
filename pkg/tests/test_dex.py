"""Static data loading, the type chart, and effectiveness lookups."""

import csv
import itertools
import json
import shutil

import pytest

from pokearena.dex import (
    DexError,
    TYPE_NAMES,
    bundled_data_dir,
    load_pokedex,
    save_pokedex,
    validate_chart,
)

PAPER_NAMED_SPECIES = [
    "Dragonite", "Charizard", "Venusaur", "Toxicroak", "Klefki", "Rhydon",
    "Drapion", "Doublade", "Entei", "Zygarde", "Mawile", "Kyurem", "Tapu Bulu",
]


def raw_chart():
    """Independent read of the bundled chart, bypassing the loader."""
    table = {}
    with open(bundled_data_dir() / "types.csv") as f:
        rows = list(csv.reader(f))
    header = rows[0][1:]
    for row in rows[1:]:
        table[row[0]] = dict(zip(header, (float(v) for v in row[1:])))
    return table


class TestChart:
    def test_class_counts_exact(self, dex):
        assert validate_chart(dex.chart) == (51, 204, 61, 8)

    def test_all_one_chart_counts(self, dex):
        from pokearena.dex import TypeChart
        flat = TypeChart({a: {d: 1.0 for d in TYPE_NAMES} for a in TYPE_NAMES})
        assert validate_chart(flat) == (0, 324, 0, 0)

    def test_one_flipped_entry_moves_the_count(self, dex):
        from pokearena.dex import TypeChart
        table = {a: dict(row) for a, row in dex.chart.multiplier.items()}
        # flip one 2x entry to 1x
        for a in TYPE_NAMES:
            flipped = False
            for d in TYPE_NAMES:
                if table[a][d] == 2.0:
                    table[a][d] = 1.0
                    flipped = True
                    break
            if flipped:
                break
        assert validate_chart(TypeChart(table)) == (50, 205, 61, 8)


class TestEffectiveness:
    def test_fire_vs_grass_is_double(self, dex):
        assert dex.effectiveness("fire", ["grass"]) == 2.0

    def test_normal_vs_normal_is_neutral(self, dex):
        assert dex.effectiveness("normal", ["normal"]) == 1.0

    def test_fire_vs_grass_steel_product(self, dex):
        # oracle: product of the two raw chart entries read independently
        chart = raw_chart()
        expected = chart["fire"]["grass"] * chart["fire"]["steel"]
        assert expected == 4.0
        assert dex.effectiveness("fire", ["grass", "steel"]) == expected

    def test_total_over_all_combinations(self, dex):
        allowed = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}
        for attack in TYPE_NAMES:
            for defend in TYPE_NAMES:
                assert dex.effectiveness(attack, [defend]) in allowed
            for d1, d2 in itertools.combinations(TYPE_NAMES, 2):
                assert dex.effectiveness(attack, [d1, d2]) in allowed

    def test_dual_is_product_of_singles(self, dex):
        chart = raw_chart()
        for attack in TYPE_NAMES:
            for d1, d2 in itertools.combinations(TYPE_NAMES, 2):
                assert dex.effectiveness(attack, [d1, d2]) == chart[attack][d1] * chart[attack][d2]

    def test_unknown_type_errors(self, dex):
        with pytest.raises(KeyError):
            dex.effectiveness("plasma", ["grass"])
        with pytest.raises(KeyError):
            dex.effectiveness("fire", ["plasma"])


class TestLookupEffect:
    def test_dragon_dance_text(self, dex):
        assert "boosts the user's attack and speed by one stage" in dex.lookup_effect("Dragon Dance")

    def test_magnet_rise_text(self, dex):
        assert "immunity to ground-type moves for five turns" in dex.lookup_effect("Magnet Rise")

    def test_blaze_text(self, dex):
        assert "fire-type moves when its HP is low" in dex.lookup_effect("Blaze")

    def test_haze_text(self, dex):
        assert "resets the boosted stats" in dex.lookup_effect("Haze")

    def test_unknown_name_errors(self, dex):
        with pytest.raises(KeyError):
            dex.lookup_effect("NoSuchMove")


class TestLoading:
    def test_bundled_contains_paper_species(self, dex):
        for name in PAPER_NAMED_SPECIES:
            assert name in dex.species, name

    def test_empty_directory_is_missing_chart(self, tmp_path):
        with pytest.raises(DexError, match="missing type chart"):
            load_pokedex(tmp_path)

    def test_dangling_move_reference(self, tmp_path):
        src = bundled_data_dir()
        for name in ("types.csv", "moves.json", "abilities.json"):
            shutil.copy(src / name, tmp_path / name)
        species = json.loads((src / "species.json").read_text())
        species[0]["moves"][0] = "Imaginary Slam"
        (tmp_path / "species.json").write_text(json.dumps(species))
        with pytest.raises(DexError, match="dangling move reference"):
            load_pokedex(tmp_path)

    def test_dangling_ability_reference(self, tmp_path):
        src = bundled_data_dir()
        for name in ("types.csv", "moves.json", "abilities.json"):
            shutil.copy(src / name, tmp_path / name)
        species = json.loads((src / "species.json").read_text())
        species[3]["ability"] = "Imaginary Aura"
        (tmp_path / "species.json").write_text(json.dumps(species))
        with pytest.raises(DexError, match="dangling ability reference"):
            load_pokedex(tmp_path)

    def test_non_18x18_chart_rejected(self, tmp_path):
        src = bundled_data_dir()
        for name in ("moves.json", "abilities.json", "species.json"):
            shutil.copy(src / name, tmp_path / name)
        lines = (src / "types.csv").read_text().splitlines()
        (tmp_path / "types.csv").write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(DexError, match="18x18"):
            load_pokedex(tmp_path)

    def test_attack_move_must_have_power(self, tmp_path):
        src = bundled_data_dir()
        for name in ("types.csv", "abilities.json", "species.json"):
            shutil.copy(src / name, tmp_path / name)
        moves = json.loads((src / "moves.json").read_text())
        moves[0]["power"] = 0
        (tmp_path / "moves.json").write_text(json.dumps(moves))
        with pytest.raises(DexError, match="positive power"):
            load_pokedex(tmp_path)

    def test_unknown_fields_warn_but_load(self, tmp_path, caplog):
        src = bundled_data_dir()
        for name in ("types.csv", "moves.json", "abilities.json"):
            shutil.copy(src / name, tmp_path / name)
        species = json.loads((src / "species.json").read_text())
        species[0]["hidden_power"] = 70
        (tmp_path / "species.json").write_text(json.dumps(species))
        import logging
        with caplog.at_level(logging.WARNING):
            dex = load_pokedex(tmp_path)
        assert "hidden_power" in caplog.text
        assert len(dex.species) == 60

    def test_round_trip_identical(self, dex, tmp_path):
        save_pokedex(dex, tmp_path)
        again = load_pokedex(tmp_path)
        assert again.chart.multiplier == dex.chart.multiplier
        assert again.species == dex.species
        assert again.moves == dex.moves
        assert again.abilities == dex.abilities
        assert again.species_order == dex.species_order
        assert again.move_order == dex.move_order
