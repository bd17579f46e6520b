from __future__ import annotations
import re
from dataclasses import dataclass
from ..abstract import Serializable
from ..errors import RejectedInputError

_TOKEN = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass
class TokenizerConfig(Serializable):
    """Tokenizer settings.

    Args:
        lowercase (bool): Lowercase text before splitting. Default: True.
        ngram_order (int): Highest n-gram order used as features (2 = unigrams and bigrams). Default: 2.
    """

    lowercase: bool = True
    ngram_order: int = 2

    def __post_init__(self):
        if self.ngram_order < 1:
            raise RejectedInputError("ngram_order must be at least 1", field="ngram_order")


def tokenize(text: str, config: TokenizerConfig = None) -> list[str]:
    """Split text into word tokens and standalone punctuation marks."""
    config = config or TokenizerConfig()
    if config.lowercase:
        text = text.lower()
    return _TOKEN.findall(text)


def ngrams(tokens: list[str], order: int) -> list[str]:
    """All n-grams of orders 1..order, space-joined, unigrams first."""
    grams = []
    for n in range(1, order + 1):
        grams.extend(" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
    return grams
