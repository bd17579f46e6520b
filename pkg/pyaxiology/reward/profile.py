from __future__ import annotations
import enum
from dataclasses import dataclass
from typing import Sequence
import numpy as np
from ..errors import RejectedInputError
from ..vector import ValueVector
from .dialogue import ValueFunction, score_texts


class Aggregation(enum.Enum):
    """Enumerates how per-utterance vectors are combined into a profile."""

    MEAN = "mean"
    MEDIAN = "median"


@dataclass(frozen=True)
class SpeakerProfile:
    """Value profile of a speaker.

    Args:
        profile (ValueVector): Aggregated vector. Not normalized.
        per_utterance (tuple[ValueVector, ...]): The vector of every utterance, in input order.
        utterances (tuple[str, ...]): The scored utterances.
        aggregation (Aggregation): How the profile was aggregated.
    """

    profile: ValueVector
    per_utterance: tuple
    utterances: tuple = ()
    aggregation: Aggregation = Aggregation.MEAN


def aggregate_vectors(vectors: Sequence[ValueVector], aggregation: Aggregation = Aggregation.MEAN) -> ValueVector:
    """Component-wise mean or median of value vectors, clamped to [-1, 1]."""
    if not vectors:
        raise RejectedInputError("Cannot aggregate an empty list of vectors", field="utterances")
    if aggregation == Aggregation.MEDIAN:
        combined = np.median(np.array([v.components for v in vectors]), axis=0).tolist()
    else:
        combined = [sum(column) / len(vectors) for column in zip(*(v.components for v in vectors))]
    return ValueVector(tuple(max(-1.0, min(1.0, x)) for x in combined))


def profile_speaker(
    utterances: Sequence[str], value_fn: ValueFunction, aggregation: Aggregation = Aggregation.MEAN
) -> SpeakerProfile:
    """Score a speaker's utterances and aggregate them into a profile.

    Raises:
        RejectedInputError: If there are no utterances.
        ValueFunctionError: If value_fn fails on an utterance.
    """
    if isinstance(utterances, str) or not utterances:
        raise RejectedInputError("At least one utterance is needed", field="utterances")
    aggregation = Aggregation(aggregation)
    vectors = score_texts(utterances, value_fn)
    return SpeakerProfile(aggregate_vectors(vectors, aggregation), tuple(vectors), tuple(utterances), aggregation)
