from __future__ import annotations
import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping
from ..common import ValueDimension
from ..errors import DataFormatError, RejectedInputError
from ..util import PathLike, atomic_write_text
from .io import read_records
from .stemmer import stem, stem_tokens


class Tier(enum.Enum):
    """Enumerates keyword tiers.

    DEFINITIONAL words come from the value definitions, ASSOCIATED words from the word association service and
    EMBEDDING_NEIGHBOR words from nearest neighbors in a word embedding space.
    """

    DEFINITIONAL = "definitional"
    ASSOCIATED = "associated"
    EMBEDDING_NEIGHBOR = "embedding_neighbor"


@dataclass(frozen=True)
class LexiconEntry:
    """Keyword tiers for one value dimension."""

    definitional: frozenset = field(default_factory=frozenset)
    associated: frozenset = field(default_factory=frozenset)
    embedding_neighbor: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for tier in Tier:
            words = frozenset(getattr(self, tier.value))
            for w in words:
                if not w or w != w.lower() or w != w.strip():
                    message = f"Keyword {w!r} must be lowercase, trimmed and non-empty"
                    raise RejectedInputError(message, field=tier.value)
            object.__setattr__(self, tier.value, words)
        d, a, e = self.definitional, self.associated, self.embedding_neighbor
        overlap = (d & a) | (d & e) | (a & e)
        if overlap:
            raise RejectedInputError(f"Keyword tiers overlap: {sorted(overlap)}")

    def tier(self, tier: Tier) -> frozenset:
        return getattr(self, tier.value)

    def all_words(self) -> frozenset:
        return self.definitional | self.associated | self.embedding_neighbor


@dataclass(frozen=True)
class Lexicon:
    """Per-dimension keyword tiers used to retrieve value-related scenarios.

    Args:
        entries (Mapping[ValueDimension, LexiconEntry]): Keyword tiers. Dimensions without an entry have no keywords.
    """

    entries: Mapping = field(default_factory=dict)

    def __post_init__(self):
        entries = {d: self.entries.get(d, LexiconEntry()) for d in ValueDimension.ordered()}
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_stems", {d: frozenset(stem(w) for w in e.all_words()) for d, e in entries.items()})

    def __getitem__(self, dimension: ValueDimension) -> LexiconEntry:
        return self.entries[dimension]

    def stems(self, dimension: ValueDimension) -> frozenset:
        """Returns the stemmed keywords of all tiers for a dimension."""
        return self._stems[dimension]

    def is_empty(self) -> bool:
        return not any(e.all_words() for e in self.entries.values())

    def with_words(self, dimension: ValueDimension, tier: Tier, words: Iterable[str]) -> Lexicon:
        """Return a copy with words added to a tier. Words already present in any tier of the dimension are skipped."""
        entry = self.entries[dimension]
        present = entry.all_words()
        new = frozenset(w for w in words if w not in present)
        if not new:
            return self
        tiers = {t.value: entry.tier(t) for t in Tier}
        tiers[tier.value] = tiers[tier.value] | new
        entries = dict(self.entries)
        entries[dimension] = LexiconEntry(**tiers)
        return Lexicon(entries)

    def to_records(self) -> list[dict]:
        """One record per dimension in canonical order, with sorted word lists."""
        records = []
        for dim, entry in self.entries.items():
            record = {"dimension": dim.code}
            for tier in Tier:
                record[tier.value] = sorted(entry.tier(tier))
            records.append(record)
        return records

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> Lexicon:
        entries = {}
        for record in records:
            dim = ValueDimension.from_code(record["dimension"])
            entries[dim] = LexiconEntry(**{t.value: frozenset(record.get(t.value, ())) for t in Tier})
        return cls(entries)

    def save(self, filename: PathLike):
        """Writes the lexicon as one JSON record per line."""
        lines = [json.dumps(r, sort_keys=True, ensure_ascii=False) for r in self.to_records()]
        atomic_write_text(filename, "\n".join(lines) + "\n")

    @classmethod
    def load(cls, filename: PathLike) -> Lexicon:
        """Loads a lexicon written by save()."""
        records = []
        for lineno, record in read_records(filename):
            try:
                ValueDimension.from_code(record["dimension"])
            except KeyError:
                raise DataFormatError(filename, lineno, "dimension", "missing field") from None
            except RejectedInputError as err:
                raise DataFormatError(filename, lineno, "dimension", str(err)) from err
            records.append(record)
        try:
            return cls.from_records(records)
        except RejectedInputError as err:
            raise DataFormatError(filename, None, err.field, str(err)) from err
        except (TypeError, AttributeError) as err:
            raise DataFormatError(filename, None, None, f"keyword tiers must be lists of words: {err}") from err

    @classmethod
    def default(cls) -> Lexicon:
        """The definitional keywords quoted in the value definitions, plus each value's own name."""
        return cls({d: LexiconEntry(definitional=frozenset(words)) for d, words in DEFAULT_KEYWORDS.items()})


def match_scenario(text: str, lexicon: Lexicon) -> set[ValueDimension]:
    """Return the dimensions whose stemmed keywords share a stem with the text.

    Args:
        text (str): The scenario text.
        lexicon (Lexicon): Keywords. Must hold at least one keyword.

    Returns:
        set[ValueDimension]: Matching dimensions, empty if nothing matches.
    """
    if lexicon.is_empty():
        raise RejectedInputError("Lexicon has no keywords")
    tokens = set(stem_tokens(text))
    return {d for d in ValueDimension.ordered() if tokens & lexicon.stems(d)}


DEFAULT_KEYWORDS = {
    ValueDimension.SELF_DIRECTION: [
        "creativity", "freedom", "goals", "curious", "independent", "independence",
        "intelligent", "privacy", "choosing", "creating", "exploring", "autonomy",
    ],
    ValueDimension.STIMULATION: [
        "stimulation", "varied", "exciting", "excitement", "daring", "novelty", "challenge", "adventure",
    ],
    ValueDimension.HEDONISM: [
        "hedonism", "pleasure", "enjoying", "enjoy", "indulgent", "gratification", "fun",
    ],
    ValueDimension.ACHIEVEMENT: [
        "achievement", "ambitious", "successful", "success", "capable", "influential", "intelligent",
        "recognition", "competence",
    ],
    ValueDimension.POWER: [
        "power", "authority", "wealth", "status", "prestige", "dominance", "control", "image", "recognition",
    ],
    ValueDimension.SECURITY: [
        "security", "safety", "order", "family", "national", "clean", "reciprocation", "favors", "healthy",
        "moderate", "belonging", "harmony", "stability",
    ],
    ValueDimension.CONFORMITY: [
        "conformity", "obedient", "discipline", "politeness", "honoring", "parents", "elders", "loyal",
        "responsible", "restraint", "norms",
    ],
    ValueDimension.TRADITION: [
        "tradition", "respect", "humble", "devout", "accepting", "portion", "moderate", "spiritual", "customs",
        "religion", "commitment",
    ],
    ValueDimension.BENEVOLENCE: [
        "benevolence", "helpful", "honest", "forgiving", "responsible", "loyal", "friendship", "love",
        "belonging", "meaning", "spiritual", "welfare", "family",
    ],
    ValueDimension.UNIVERSALISM: [
        "universalism", "broadminded", "justice", "equality", "peace", "beauty", "nature", "wisdom",
        "environment", "harmony", "spiritual", "tolerance", "protection",
    ],
}
