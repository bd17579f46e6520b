from __future__ import annotations
import math
from typing import Union
import numpy as np
from .common import Vote
from .vector import ValueVector


def norm(v: ValueVector) -> float:
    """Return the Euclidean norm of a value vector."""
    return math.sqrt(sum(x * x for x in v.components))


def normalize(v: ValueVector) -> ValueVector:
    """Scale a value vector to unit Euclidean length.

    The zero vector carries no value signal and is returned unchanged.

    Args:
        v (ValueVector): The vector to normalize.

    Returns:
        ValueVector: A vector with norm 1, or the zero vector.
    """
    n = norm(v)
    if n == 0.0:
        return v
    return ValueVector(tuple(x / n for x in v.components))


def dot(a: ValueVector, b: ValueVector) -> float:
    """Return the inner product of two value vectors, summed in canonical order."""
    total = 0.0
    for x, y in zip(a.components, b.components):
        total += x * y
    return total


def quantize_vote(vote: Union[Vote, str]) -> int:
    """Convert an annotator vote to a utility label.

    yes -> +1, no -> -1, unrelated -> 0.

    Raises:
        RejectedInputError: If vote is not one of the three categories.
    """
    return {Vote.YES: 1, Vote.NO: -1, Vote.UNRELATED: 0}[Vote.parse(vote)]


def sign(x: float) -> int:
    """Return -1, 0 or 1."""
    return int(x > 0) - int(x < 0)


def sigmoid(z):
    """Numerically stable logistic function. Works on scalars and numpy arrays."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """Softmax along an axis."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def utility_to_class(utility: float) -> int:
    """Round a utility half away from zero and clamp to {-1, 0, 1}."""
    rounded = math.floor(abs(utility) + 0.5) * sign(utility)
    return max(-1, min(1, int(rounded)))
