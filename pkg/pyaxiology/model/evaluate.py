from __future__ import annotations
from dataclasses import dataclass, field
from typing import Sequence
import numpy as np
from ..calc import softmax, utility_to_class
from ..common import CODES, ModelMode, ValueDimension
from ..errors import RejectedInputError
from ..samples import AnnotatedSample
from .train import encode_samples
from .value_model import ValueModel, _regression_utility, expected_utility

CLASSES = (-1, 0, 1)


@dataclass
class EvalReport:
    """Classification and regression metrics of a value model.

    Args:
        precision (dict[int, float]): Per-class precision, keyed by -1, 0 and 1.
        recall (dict[int, float]): Per-class recall.
        f1 (dict[int, float]): Per-class F1. 0 when precision and recall are both 0.
        accuracy (float): Fraction of samples whose rounded utility equals the label.
        mse (float): Mean squared error of the utility against the integer label.
        per_dimension_accuracy (dict[str, float]): Accuracy per dimension code. None for dimensions with no samples.
        support (dict[int, int]): Number of samples per label.
        confusion (list[list[int]]): confusion[label + 1][prediction + 1].
    """

    precision: dict = field(default_factory=dict)
    recall: dict = field(default_factory=dict)
    f1: dict = field(default_factory=dict)
    accuracy: float = 0.0
    mse: float = 0.0
    per_dimension_accuracy: dict = field(default_factory=dict)
    support: dict = field(default_factory=dict)
    confusion: list = field(default_factory=list)

    def to_dict(self) -> dict:
        """Machine readable form. Class keys become strings."""
        return {
            "precision": {str(c): v for c, v in self.precision.items()},
            "recall": {str(c): v for c, v in self.recall.items()},
            "f1": {str(c): v for c, v in self.f1.items()},
            "accuracy": self.accuracy,
            "mse": self.mse,
            "per_dimension_accuracy": dict(self.per_dimension_accuracy),
            "support": {str(c): v for c, v in self.support.items()},
            "confusion": [list(row) for row in self.confusion],
        }

    def to_text(self) -> str:
        """Two tables: per-class F1/P/R with accuracy and MSE, then accuracy per dimension."""
        header = []
        row = []
        for c in CLASSES:
            for name, values in (("F1", self.f1), ("P", self.precision), ("R", self.recall)):
                header.append(f"{name}({c:+d})" if c else f"{name}(0)")
                row.append(f"{values[c]:.2f}")
        header += ["Acc.", "MSE"]
        row += [f"{self.accuracy:.2f}", f"{self.mse:.2f}"]
        widths = [max(len(h), len(r)) for h, r in zip(header, row)]
        lines = [
            "  ".join(h.rjust(w) for h, w in zip(header, widths)),
            "  ".join(r.rjust(w) for r, w in zip(row, widths)),
            "",
        ]
        per_dim = [self.per_dimension_accuracy.get(c) for c in CODES]
        accs = ["-" if a is None else f"{a:.2f}" for a in per_dim]
        widths = [max(len(c), len(a)) for c, a in zip(CODES, accs)]
        lines.append("  ".join(c.rjust(w) for c, w in zip(CODES, widths)))
        lines.append("  ".join(a.rjust(w) for a, w in zip(accs, widths)))
        return "\n".join(lines) + "\n"


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def evaluate_predictions(
    labels: Sequence[int], utilities: Sequence[float], dimensions: Sequence[ValueDimension]
) -> EvalReport:
    """Compute an EvalReport from labels and predicted utilities.

    Each utility is rounded half away from zero and clamped to a class.

    Raises:
        RejectedInputError: On empty or mismatched inputs.
    """
    if not labels:
        raise RejectedInputError("Cannot evaluate an empty sample set", field="samples")
    if not len(labels) == len(utilities) == len(dimensions):
        raise RejectedInputError("labels, utilities and dimensions must have equal length")
    predictions = [utility_to_class(u) for u in utilities]
    confusion = np.zeros((3, 3), dtype=np.int64)
    for y, p in zip(labels, predictions):
        confusion[y + 1, p + 1] += 1
    report = EvalReport()
    for c in CLASSES:
        tp = int(confusion[c + 1, c + 1])
        predicted = int(confusion[:, c + 1].sum())
        actual = int(confusion[c + 1, :].sum())
        p = _ratio(tp, predicted)
        r = _ratio(tp, actual)
        report.precision[c] = p
        report.recall[c] = r
        report.f1[c] = 2 * p * r / (p + r) if p + r else 0.0
        report.support[c] = actual
    report.accuracy = int(np.trace(confusion)) / len(labels)
    report.mse = sum((u - y) ** 2 for u, y in zip(utilities, labels)) / len(labels)
    for dim in ValueDimension.ordered():
        hits = [y == p for y, p, d in zip(labels, predictions, dimensions) if d == dim]
        report.per_dimension_accuracy[dim.code] = sum(hits) / len(hits) if hits else None
    report.confusion = confusion.tolist()
    return report


def predict_samples(model: ValueModel, samples: Sequence[AnnotatedSample]) -> list[float]:
    """Utility of every sample for its own dimension. Classification models report the expected utility."""
    utilities = []
    for features in encode_samples(model, samples):
        if model.mode == ModelMode.REGRESSION:
            utilities.append(_regression_utility(model, features))
        else:
            utilities.append(expected_utility(softmax(model.outputs(features))))
    return utilities


def evaluate(model: ValueModel, samples: Sequence[AnnotatedSample]) -> EvalReport:
    """Evaluate a value model on labeled samples.

    Raises:
        RejectedInputError: On an empty sample set.
    """
    if not samples:
        raise RejectedInputError("Cannot evaluate an empty sample set", field="samples")
    return evaluate_predictions(
        [s.label for s in samples], predict_samples(model, samples), [s.dimension for s in samples]
    )
