"""Keyword normalization: a small irregular-form table in front of the Porter stemmer."""
from __future__ import annotations
import re
from functools import lru_cache
from nltk.stem.porter import PorterStemmer

_stemmer = PorterStemmer()

# Irregular plurals and verb forms the suffix stripper cannot reduce.
IRREGULAR_FORMS = {
    "children": "child",
    "men": "man",
    "women": "woman",
    "people": "person",
    "feet": "foot",
    "teeth": "tooth",
    "mice": "mouse",
    "geese": "goose",
    "wives": "wife",
    "lives": "life",
    "knives": "knife",
    "elders": "elder",
    "was": "be",
    "were": "be",
    "is": "be",
    "are": "be",
    "been": "be",
    "did": "do",
    "does": "do",
    "done": "do",
    "went": "go",
    "gone": "go",
    "had": "have",
    "has": "have",
    "made": "make",
    "felt": "feel",
    "thought": "think",
    "taught": "teach",
    "bought": "buy",
    "brought": "bring",
    "fought": "fight",
    "won": "win",
    "lost": "lose",
    "paid": "pay",
    "stole": "steal",
    "stolen": "steal",
    "lied": "lie",
    "better": "good",
    "best": "good",
    "worse": "bad",
    "worst": "bad",
}

_WORD = re.compile(r"\w+", re.UNICODE)


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Return the lowercase stem of a word.

    Irregular forms are first mapped to their lemma, then the Porter stemmer strips suffixes.

    Args:
        word (str): A single non-empty word.

    Returns:
        str: The stem, e.g. "running" -> "run", "children" -> "child".
    """
    w = word.strip().lower()
    w = IRREGULAR_FORMS.get(w, w)
    return _stemmer.stem(w)


def stem_tokens(text: str) -> list[str]:
    """Split text on word characters and stem every word."""
    return [stem(w) for w in _WORD.findall(text.lower())]
