# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import tempfile
import unittest
from pathlib import Path
from pyaxiology.common import ValueDimension
from pyaxiology.curation.lexicon import Lexicon, LexiconEntry, Tier, match_scenario
from pyaxiology.errors import DataFormatError, RejectedInputError


class TestLexiconEntry(unittest.TestCase):
    def test_rejects_bad_keywords(self):
        with self.assertRaises(RejectedInputError):
            LexiconEntry(definitional=frozenset({"Freedom"}))
        with self.assertRaises(RejectedInputError):
            LexiconEntry(definitional=frozenset({""}))

    def test_rejects_overlapping_tiers(self):
        with self.assertRaises(RejectedInputError):
            LexiconEntry(definitional=frozenset({"freedom"}), associated=frozenset({"freedom"}))


class TestLexicon(unittest.TestCase):
    def test_default_has_every_dimension(self):
        lexicon = Lexicon.default()
        for dim in ValueDimension.ordered():
            self.assertTrue(lexicon[dim].definitional, dim.code)

    def test_with_words_skips_present(self):
        lexicon = Lexicon({ValueDimension.POWER: LexiconEntry(definitional=frozenset({"power"}))})
        expanded = lexicon.with_words(ValueDimension.POWER, Tier.ASSOCIATED, ["power", "authority"])
        self.assertEqual(frozenset({"authority"}), expanded[ValueDimension.POWER].associated)
        self.assertEqual(frozenset(), lexicon[ValueDimension.POWER].associated)
        self.assertIs(lexicon, lexicon.with_words(ValueDimension.POWER, Tier.ASSOCIATED, ["power"]))

    def test_save_load_round_trip(self):
        lexicon = Lexicon.default().with_words(ValueDimension.TRADITION, Tier.ASSOCIATED, ["custom", "ritual"])
        with tempfile.TemporaryDirectory() as tmp:
            first = Path(tmp) / "a.jsonl"
            second = Path(tmp) / "b.jsonl"
            lexicon.save(first)
            loaded = Lexicon.load(first)
            loaded.save(second)
            self.assertEqual(lexicon.entries, loaded.entries)
            self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_load_rejects_unknown_dimension(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.jsonl"
            path.write_text('{"dimension": "XYZ", "definitional": ["a"]}\n', encoding="utf-8")
            with self.assertRaises(DataFormatError) as ctx:
                Lexicon.load(path)
            self.assertEqual(1, ctx.exception.line)

    def test_load_rejects_non_object_record(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.jsonl"
            path.write_text('{"dimension": "SEC", "definitional": ["safety"]}\n["SEC"]\n', encoding="utf-8")
            with self.assertRaises(DataFormatError) as ctx:
                Lexicon.load(path)
            self.assertEqual(2, ctx.exception.line)
            self.assertIn("bad.jsonl", str(ctx.exception))


class TestMatchScenario(unittest.TestCase):
    def test_freedom_is_self_direction(self):
        dims = match_scenario("I value my freedom and independence", Lexicon.default())
        self.assertIn(ValueDimension.SELF_DIRECTION, dims)

    def test_no_overlap(self):
        lexicon = Lexicon({ValueDimension.SELF_DIRECTION: LexiconEntry(definitional=frozenset({"freedom"}))})
        self.assertEqual(set(), match_scenario("the cat sat on the mat", lexicon))

    def test_stems_collide(self):
        dims = match_scenario("she obeyed her parents politely", Lexicon.default())
        self.assertIn(ValueDimension.CONFORMITY, dims)

    def test_empty_lexicon(self):
        with self.assertRaises(RejectedInputError):
            match_scenario("anything", Lexicon())


if __name__ == "__main__":
    unittest.main()
