# fmt: off
import sys, pathlib
# Allow us to import from parent folder
sys.path.append(str(pathlib.Path(__file__).parent.parent.resolve()))
# fmt: on

import unittest
from pyaxiology.errors import RejectedInputError
from pyaxiology.model.tokenizer import TokenizerConfig, ngrams, tokenize


class TestTokenizer(unittest.TestCase):
    def test_tokenize(self):
        self.assertEqual(["i", "miss", "mom"], tokenize("I miss mom"))
        self.assertEqual([], tokenize(""))

    def test_punctuation_split(self):
        self.assertEqual(["i", "got", "promoted", "!"], tokenize("I got promoted!"))
        self.assertEqual(["don", "'", "t"], tokenize("don't"))

    def test_case_kept(self):
        self.assertEqual(["I", "miss", "Mom"], tokenize("I miss Mom", TokenizerConfig(lowercase=False)))

    def test_ngrams(self):
        self.assertEqual(["a", "b", "c", "a b", "b c"], ngrams(["a", "b", "c"], 2))
        self.assertEqual(["a"], ngrams(["a"], 3))
        self.assertEqual([], ngrams([], 2))

    def test_config(self):
        with self.assertRaises(RejectedInputError):
            TokenizerConfig(ngram_order=0)
        config = TokenizerConfig.from_dict({"ngram_order": 3})
        self.assertEqual({"lowercase": True, "ngram_order": 3}, dict(config))


if __name__ == "__main__":
    unittest.main()
