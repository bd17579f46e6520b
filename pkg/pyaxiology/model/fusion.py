from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Sequence
import numpy as np
from ..calc import softmax
from ..common import CODES
from ..errors import DataFormatError, RejectedInputError
from ..util import PathLike
from ..vector import ValueVector
from .value_model import ValueModel

logger = logging.getLogger(__name__)

VALUE_DIM = len(CODES)


@dataclass
class FusionHead:
    """Softmax layer over a text feature vector concatenated with a value vector.

    Args:
        weights (np.ndarray): K x (D + 10). The last ten columns read the value vector.
        bias (np.ndarray): K biases.
        labels (tuple[str, ...]): Class names. Optional.
    """

    weights: np.ndarray
    bias: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[1] <= VALUE_DIM:
            raise RejectedInputError(f"Fusion weights must be K x (D + {VALUE_DIM}) with D >= 1", field="weights")
        if self.weights.shape[0] < 2 or self.bias.shape != (self.weights.shape[0],):
            raise RejectedInputError("Fusion head needs at least two classes and one bias per class", field="bias")
        if self.labels and len(self.labels) != self.n_classes:
            raise RejectedInputError("One label per class expected", field="labels")
        self.labels = tuple(self.labels)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def text_dim(self) -> int:
        return self.weights.shape[1] - VALUE_DIM

    @classmethod
    def zeros(cls, n_classes: int, text_dim: int, labels: Sequence[str] = ()) -> FusionHead:
        return cls(np.zeros((n_classes, text_dim + VALUE_DIM)), np.zeros(n_classes), tuple(labels))

    def without_values(self) -> FusionHead:
        """Copy with the value-vector columns zeroed."""
        weights = self.weights.copy()
        weights[:, self.text_dim :] = 0.0
        return FusionHead(weights, self.bias.copy(), self.labels)

    def text_only(self, text_features: np.ndarray) -> np.ndarray:
        """Class distribution from the text columns alone."""
        h = self._check_text(text_features)
        return softmax(self.weights[:, : self.text_dim] @ h + self.bias)

    def _check_text(self, text_features) -> np.ndarray:
        h = np.asarray(text_features, dtype=np.float64)
        if h.shape != (self.text_dim,):
            raise RejectedInputError(
                f"Text features have length {h.size}, fusion head expects {self.text_dim}", field="text_feature_vector"
            )
        return h

    def logits(self, text_features, values) -> np.ndarray:
        h = self._check_text(text_features)
        v = np.asarray(values.components if isinstance(values, ValueVector) else values, dtype=np.float64)
        if v.shape != (VALUE_DIM,):
            raise RejectedInputError(f"Value vector must have {VALUE_DIM} components", field="value_vector")
        # Text and value blocks are applied separately so zeroed value columns add exactly 0.
        return (self.weights[:, : self.text_dim] @ h + self.weights[:, self.text_dim :] @ v) + self.bias

    @classmethod
    def fit(
        cls,
        text_features: np.ndarray,
        value_vectors: np.ndarray,
        classes: Sequence[int],
        n_classes: int = None,
        labels: Sequence[str] = (),
        learning_rate: float = 0.5,
        epochs: int = 200,
        l2: float = 0.0,
    ) -> FusionHead:
        """Fit the layer by full-batch gradient descent on the mean cross-entropy.

        Args:
            text_features (np.ndarray): N x D text features.
            value_vectors (np.ndarray): N x 10 value vectors.
            classes (Sequence[int]): N class indices in [0, n_classes).
            n_classes (int): Class count. Default: max(classes) + 1.
            labels (Sequence[str]): Class names.
            learning_rate (float): Step size. Default: 0.5.
            epochs (int): Update count. Default: 200.
            l2 (float): L2 penalty on the weights. Default: 0.

        Returns:
            FusionHead: The fitted head.
        """
        x = np.hstack([np.asarray(text_features, dtype=np.float64), np.asarray(value_vectors, dtype=np.float64)])
        y = np.asarray(classes, dtype=np.int64)
        if len(x) == 0 or len(x) != len(y):
            raise RejectedInputError("Fusion training needs one class per non-empty input row", field="classes")
        n_classes = n_classes or int(y.max()) + 1
        if y.min() < 0 or y.max() >= n_classes:
            raise RejectedInputError(f"Class indices must be in [0, {n_classes})", field="classes")
        weights = np.zeros((n_classes, x.shape[1]))
        bias = np.zeros(n_classes)
        onehot = np.eye(n_classes)[y]
        for epoch in range(epochs):
            dz = (softmax(x @ weights.T + bias, axis=1) - onehot) / len(x)
            weights -= learning_rate * (dz.T @ x + l2 * weights)
            bias -= learning_rate * dz.sum(axis=0)
        logger.debug("fusion head fitted on %d rows, %d classes", len(x), n_classes)
        return cls(weights, bias, tuple(labels))


def fuse_emotion_features(text_feature_vector, value_vector, fusion_head: FusionHead) -> np.ndarray:
    """Class distribution softmax(W [h; v] + b).

    Raises:
        RejectedInputError: If the inputs do not match the head's dimensions.
    """
    return softmax(fusion_head.logits(text_feature_vector, value_vector))


def text_features(model: ValueModel, text: str) -> np.ndarray:
    """Mean of the n-gram embeddings of a text, without any prompt. Zeros for a text with no tokens."""
    indices = model.ngram_indices(text)
    if len(indices) == 0:
        return np.zeros(model.embed_dim)
    return model.embeddings[indices].mean(axis=0)


def read_labeled_text(filename: PathLike) -> list[tuple[str, str]]:
    """Read `label<TAB>text` lines. Blank lines are skipped.

    Raises:
        DataFormatError: On a line without a tab or with an empty label.
    """
    rows = []
    with open(filename, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            label, sep, text = line.partition("\t")
            if not sep or not label.strip():
                raise DataFormatError(filename, lineno, "label", "expected 'label<TAB>text'")
            rows.append((label.strip(), text))
    return rows
