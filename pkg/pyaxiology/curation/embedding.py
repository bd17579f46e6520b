from __future__ import annotations
import logging
from dataclasses import dataclass, field
import numpy as np
from ..common import ValueDimension
from ..errors import DataFormatError, RejectedInputError
from ..util import PathLike
from .lexicon import Lexicon, Tier

logger = logging.getLogger(__name__)


class EmbeddingTable:
    """A read-only word vector table.

    Words are lowercased; when several spellings fold to the same word the first one in file order is kept.

    Args:
        words (list[str]): Vocabulary in file order.
        vectors (np.ndarray): Matrix of shape (len(words), dim).
    """

    def __init__(self, words: list[str], vectors: np.ndarray):
        vectors = np.array(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(words) or vectors.shape[1] < 1:
            raise RejectedInputError("Embedding matrix must have one row of length >= 1 per word")
        first = {}
        for i, w in enumerate(words):
            first.setdefault(w.strip().lower(), i)
        first.pop("", None)
        self._words = list(first)
        self._index = {w: i for i, w in enumerate(self._words)}
        self._vectors = vectors[list(first.values())]
        self._vectors.setflags(write=False)
        norms = np.linalg.norm(self._vectors, axis=1)
        unit = np.zeros_like(self._vectors)
        self._unit = np.divide(self._vectors, norms[:, None], out=unit, where=norms[:, None] > 0)

    @property
    def dim(self) -> int:
        return self._vectors.shape[1]

    @property
    def words(self) -> list[str]:
        return list(self._words)

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def vector(self, word: str) -> np.ndarray:
        return self._vectors[self._index[word]]

    def similarities(self, word: str) -> np.ndarray:
        """Cosine similarity of a word against the whole vocabulary. Zero vectors have similarity 0."""
        return self._unit @ self._unit[self._index[word]]

    def nearest(self, word: str, k: int, min_sim: float = -1.0, exclude: frozenset = frozenset()) -> list[str]:
        """Return up to k words nearest to word by cosine similarity.

        The word itself and excluded words are never returned. Ties are broken lexicographically.
        """
        sims = self.similarities(word)
        candidates = [
            (-float(s), w) for w, s in zip(self._words, sims) if w != word and w not in exclude and s >= min_sim
        ]
        candidates.sort()
        return [w for _, w in candidates[:k]]

    @classmethod
    def load(cls, filename: PathLike) -> EmbeddingTable:
        """Load a text word-vector file: `word v1 v2 ... vD` per line, with an optional `count dim` header."""
        words, rows = [], []
        dim = None
        with open(filename, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                parts = line.rstrip("\n").split(" ")
                parts = [p for p in parts if p]
                if not parts:
                    continue
                if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                    dim = int(parts[1])
                    continue
                try:
                    row = [float(x) for x in parts[1:]]
                except ValueError as err:
                    raise DataFormatError(filename, lineno, parts[0], f"non-numeric component: {err}") from err
                if dim is None:
                    dim = len(row)
                if len(row) != dim or dim < 1:
                    raise DataFormatError(filename, lineno, parts[0], f"expected {dim} components, got {len(row)}")
                words.append(parts[0])
                rows.append(row)
        if not words:
            raise DataFormatError(filename, None, None, "no vectors found")
        logger.info("Loaded %d word vectors of dimension %d from %s", len(words), dim, filename)
        return cls(words, np.array(rows, dtype=np.float64))


@dataclass
class ExpansionReport:
    """What an expansion added and which keywords it had to skip."""

    added: dict = field(default_factory=dict)
    missing: dict = field(default_factory=dict)


def expand_lexicon_embedding(
    lexicon: Lexicon, table: EmbeddingTable, k: int, min_sim: float, report: ExpansionReport = None
) -> Lexicon:
    """Add nearest embedding neighbors of every definitional keyword to the embedding_neighbor tier.

    Args:
        lexicon (Lexicon): The lexicon to expand.
        table (EmbeddingTable): Word vectors.
        k (int): Maximum neighbors per keyword. Must be >= 1.
        min_sim (float): Minimum cosine similarity in [-1, 1].
        report (ExpansionReport): Optional, filled with added words and keywords missing from the table.

    Returns:
        Lexicon: The expanded lexicon. The input is not modified.
    """
    if k < 1:
        raise RejectedInputError("k must be at least 1", field="k")
    if not -1.0 <= min_sim <= 1.0:
        raise RejectedInputError("min_sim must be in [-1, 1]", field="min_sim")
    if len(table) == 0:
        raise RejectedInputError("Embedding table is empty")
    report = report if report is not None else ExpansionReport()
    for dim in ValueDimension.ordered():
        for keyword in sorted(lexicon[dim].definitional):
            if keyword not in table:
                report.missing.setdefault(dim, []).append(keyword)
                continue
            neighbors = table.nearest(keyword, k, min_sim, exclude=lexicon[dim].all_words())
            if neighbors:
                lexicon = lexicon.with_words(dim, Tier.EMBEDDING_NEIGHBOR, neighbors)
                report.added.setdefault(dim, []).extend(neighbors)
    skipped = sum(len(v) for v in report.missing.values())
    if skipped:
        logger.info("Skipped %d keywords absent from the embedding table", skipped)
    return lexicon
