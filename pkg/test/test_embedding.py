# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import math
import tempfile
import unittest
from pathlib import Path
import numpy as np
from pyaxiology.common import ValueDimension
from pyaxiology.curation.embedding import EmbeddingTable, ExpansionReport, expand_lexicon_embedding
from pyaxiology.curation.lexicon import Lexicon, LexiconEntry, match_scenario
from pyaxiology.errors import DataFormatError, RejectedInputError

SD = ValueDimension.SELF_DIRECTION


def toy_table() -> EmbeddingTable:
    # cos(freedom, liberty) = 0.9, cos(freedom, pizza) = 0.1
    vectors = [[1.0, 0.0], [0.9, math.sqrt(1 - 0.81)], [0.1, math.sqrt(0.99)]]
    return EmbeddingTable(["freedom", "liberty", "pizza"], np.array(vectors))


def toy_lexicon() -> Lexicon:
    return Lexicon({SD: LexiconEntry(definitional=frozenset({"freedom"}))})


class TestEmbeddingTable(unittest.TestCase):
    def test_nearest(self):
        table = toy_table()
        self.assertEqual(["liberty", "pizza"], table.nearest("freedom", 5))
        self.assertEqual(["liberty"], table.nearest("freedom", 5, min_sim=0.5))

    def test_load_with_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "vectors.txt"
            path.write_text("2 3\nfreedom 1 0 0\nliberty 0.5 0.5 0\n", encoding="utf-8")
            table = EmbeddingTable.load(path)
            self.assertEqual(3, table.dim)
            self.assertEqual(["freedom", "liberty"], table.words)

    def test_load_rejects_ragged_rows(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "vectors.txt"
            path.write_text("freedom 1 0 0\nliberty 0.5 0.5\n", encoding="utf-8")
            with self.assertRaises(DataFormatError) as ctx:
                EmbeddingTable.load(path)
            self.assertEqual(2, ctx.exception.line)

    def test_mixed_case_vocabulary(self):
        table = EmbeddingTable(["power", "Authority", "authority"], np.array([[1.0, 0.0], [1.0, 0.1], [0.0, 1.0]]))
        self.assertEqual(["power", "authority"], table.words)
        np.testing.assert_array_equal([1.0, 0.1], table.vector("authority"))
        lexicon = Lexicon({ValueDimension.POWER: LexiconEntry(definitional=frozenset({"power"}))})
        expanded = expand_lexicon_embedding(lexicon, table, k=1, min_sim=0.5)
        self.assertEqual(frozenset({"authority"}), expanded[ValueDimension.POWER].embedding_neighbor)


class TestExpandLexiconEmbedding(unittest.TestCase):
    def test_adds_only_close_neighbor(self):
        expanded = expand_lexicon_embedding(toy_lexicon(), toy_table(), k=1, min_sim=0.5)
        self.assertEqual(frozenset({"liberty"}), expanded[SD].embedding_neighbor)
        self.assertEqual(frozenset({"freedom"}), expanded[SD].definitional)

    def test_self_excluded(self):
        table = EmbeddingTable(["freedom"], np.array([[1.0, 0.0]]))
        expanded = expand_lexicon_embedding(toy_lexicon(), table, k=3, min_sim=0.0)
        self.assertEqual(frozenset(), expanded[SD].embedding_neighbor)

    def test_strict_threshold(self):
        expanded = expand_lexicon_embedding(toy_lexicon(), toy_table(), k=3, min_sim=1.0)
        self.assertEqual(frozenset(), expanded[SD].embedding_neighbor)

    def test_missing_keywords_reported(self):
        report = ExpansionReport()
        expand_lexicon_embedding(Lexicon.default(), toy_table(), k=1, min_sim=0.5, report=report)
        self.assertIn(ValueDimension.POWER, report.missing)
        self.assertEqual(["liberty"], report.added[SD])

    def test_invalid_arguments(self):
        with self.assertRaises(RejectedInputError):
            expand_lexicon_embedding(toy_lexicon(), toy_table(), k=0, min_sim=0.5)
        with self.assertRaises(RejectedInputError):
            expand_lexicon_embedding(toy_lexicon(), toy_table(), k=1, min_sim=1.5)

    def test_expansion_only_adds_matches(self):
        rng = np.random.default_rng(3)
        lexicon = Lexicon.default()
        keywords = sorted({w for d in ValueDimension.ordered() for w in lexicon[d].definitional})
        extra = [f"word{i}" for i in range(40)]
        vocabulary = keywords + extra
        table = EmbeddingTable(vocabulary, rng.normal(size=(len(vocabulary), 5)))
        for k, min_sim in ((1, 0.5), (3, 0.0), (5, -1.0)):
            expanded = expand_lexicon_embedding(lexicon, table, k=k, min_sim=min_sim)
            for _ in range(100):
                text = " ".join(rng.choice(vocabulary, size=6))
                self.assertLessEqual(match_scenario(text, lexicon), match_scenario(text, expanded))


if __name__ == "__main__":
    unittest.main()
