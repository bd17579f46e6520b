from __future__ import annotations
from typing import Sequence
from ..errors import RejectedInputError


def prepend_label(utterance: str, label: str) -> str:
    """Prefix an utterance with a conditioning label and a single space.

    Raises:
        RejectedInputError: If the label is empty.
    """
    if not label:
        raise RejectedInputError("Label must not be empty", field="label")
    return f"{label} {utterance}"


def prepend_labels(utterance: str, labels: Sequence[str]) -> str:
    """Prefix an utterance with several labels, the first label leftmost."""
    for label in reversed(labels):
        utterance = prepend_label(utterance, label)
    return utterance
