from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union
from ..calc import normalize
from ..errors import PyaxiologyError, RejectedInputError, ValueFunctionError
from ..vector import ValueVector
from .matching import MatchResult, _check_normalized, match_values

logger = logging.getLogger(__name__)

ValueFunction = Callable[[str], ValueVector]


def score_texts(texts: Sequence[str], value_fn: ValueFunction) -> list[ValueVector]:
    """Apply a value function to every text.

    Raises:
        ValueFunctionError: If the value function fails, naming the offending text.
    """
    vectors = []
    for text in texts:
        try:
            v = value_fn(text)
            vectors.append(v if isinstance(v, ValueVector) else ValueVector.parse(v))
        except ValueFunctionError:
            raise
        except (PyaxiologyError, ValueError, TypeError, ArithmeticError, OSError) as err:
            raise ValueFunctionError(text, err) from err
    return vectors


@dataclass(frozen=True)
class PersonaProfile:
    """Persona sentences with their normalized value vectors.

    Args:
        sentences (tuple[str, ...]): N >= 1 persona sentences.
        vectors (tuple[ValueVector, ...]): One normalized vector per sentence.
    """

    sentences: tuple
    vectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        object.__setattr__(self, "vectors", tuple(self.vectors))
        if not self.sentences:
            raise RejectedInputError("Persona must have at least one sentence", field="persona")
        if len(self.sentences) != len(self.vectors):
            raise RejectedInputError("One vector per persona sentence expected", field="persona")
        _check_normalized(self.vectors, "persona")

    @classmethod
    def build(cls, sentences: Sequence[str], value_fn: ValueFunction) -> PersonaProfile:
        """Score and normalize persona sentences."""
        return cls(tuple(sentences), tuple(normalize(v) for v in score_texts(sentences, value_fn)))

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class DialogueTrace:
    """Agent utterances with their normalized value vectors.

    Args:
        utterances (tuple[str, ...]): Agent turns in order.
        vectors (tuple[ValueVector, ...]): One normalized vector per turn.
        context (tuple[str, ...]): User turns or other history. Carried along, never scored.
    """

    utterances: tuple = field(default_factory=tuple)
    vectors: tuple = field(default_factory=tuple)
    context: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        object.__setattr__(self, "vectors", tuple(self.vectors))
        object.__setattr__(self, "context", tuple(self.context))
        if len(self.utterances) != len(self.vectors):
            raise RejectedInputError("One vector per utterance expected", field="utterances")
        _check_normalized(self.vectors, "utterances")

    @classmethod
    def build(cls, utterances: Sequence[str], value_fn: ValueFunction, context: Sequence[str] = ()) -> DialogueTrace:
        """Score and normalize utterances."""
        return cls(tuple(utterances), tuple(normalize(v) for v in score_texts(utterances, value_fn)), tuple(context))

    def extended(self, utterance: str, vector: ValueVector) -> DialogueTrace:
        """Copy with one more turn. The vector must already be normalized."""
        return DialogueTrace(self.utterances + (utterance,), self.vectors + (vector,), self.context)

    def __len__(self) -> int:
        return len(self.utterances)


def reward(
    persona: Union[PersonaProfile, Sequence[str]],
    trace: Union[DialogueTrace, Sequence[str]],
    value_fn: ValueFunction = None,
    clamp_terms: bool = False,
) -> tuple[float, MatchResult]:
    """Value matching reward of a dialogue against a persona.

    Raw persona sentences and utterances are scored with value_fn and normalized first.

    Args:
        persona (PersonaProfile | Sequence[str]): A built profile or raw persona sentences.
        trace (DialogueTrace | Sequence[str]): A built trace or raw utterances.
        value_fn (callable): Maps a text to a ValueVector. Needed for raw inputs only.
        clamp_terms (bool): Clamp every term to [-1, 1].

    Returns:
        tuple[float, MatchResult]: The reward and the full matching trace.

    Raises:
        ValueFunctionError: If value_fn fails on a text.
        TermOverflowError: If a term is not finite and clamp_terms is off.
    """
    if not isinstance(persona, PersonaProfile):
        persona = PersonaProfile.build(_need_texts(persona, "persona"), _need_fn(value_fn))
    if not isinstance(trace, DialogueTrace):
        trace = DialogueTrace.build(_need_texts(trace, "utterances"), _need_fn(value_fn))
    result = match_values(persona.vectors, trace.vectors, clamp_terms=clamp_terms)
    return result.R, result


def _need_fn(value_fn):
    if value_fn is None:
        raise RejectedInputError("A value function is needed to score raw texts", field="value_fn")
    return value_fn


def _need_texts(texts, name: str) -> list[str]:
    if isinstance(texts, str):
        raise RejectedInputError(f"{name} must be a list of strings", field=name)
    return list(texts)


@dataclass(frozen=True)
class RankedCandidate:
    """A candidate reply with the reward gain it brings.

    Args:
        text (str): The candidate.
        score (float): Reward with the candidate appended minus reward without it.
        index (int): Position in the input list.
    """

    text: str
    score: float
    index: int


def rerank_candidates(
    persona: PersonaProfile,
    prior_trace: DialogueTrace,
    candidates: Sequence[str],
    value_fn: ValueFunction,
    clamp_terms: bool = False,
) -> list[RankedCandidate]:
    """Order candidate replies by the reward gain they bring to a dialogue.

    The reward of an empty dialogue is 0. Ties keep the input order.

    Raises:
        RejectedInputError: If there are no candidates.
        ValueFunctionError: If value_fn fails on a candidate.
    """
    if not candidates:
        raise RejectedInputError("At least one candidate is needed", field="candidates")
    prior_trace = prior_trace or DialogueTrace()
    base = match_values(persona.vectors, prior_trace.vectors, clamp_terms).R if len(prior_trace) else 0.0
    unique = list(dict.fromkeys(candidates))
    vectors = dict(zip(unique, (normalize(v) for v in score_texts(unique, value_fn))))
    ranked = []
    for i, text in enumerate(candidates):
        trace = prior_trace.extended(text, vectors[text])
        gain = match_values(persona.vectors, trace.vectors, clamp_terms).R - base
        ranked.append(RankedCandidate(text, gain, i))
    return sorted(ranked, key=lambda c: -c.score)
