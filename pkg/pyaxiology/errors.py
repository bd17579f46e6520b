"""Exception types raised by pyaxiology.

Rejected-input errors derive from ValueError so code that catches ValueError keeps working.
"""
from __future__ import annotations


class PyaxiologyError(Exception):
    """Base class for all pyaxiology errors."""


class RejectedInputError(PyaxiologyError, ValueError):
    """An argument or a data record is invalid.

    Args:
        message (str): Human readable description.
        field (str): Name of the offending field, if any.
    """

    def __init__(self, message: str, field: str = None):
        super().__init__(message)
        self.field = field


class DataFormatError(RejectedInputError):
    """A file could not be parsed.

    Args:
        path (str): The file being read.
        line (int): 1-based line number, or None when the whole file is at fault.
        field (str): The offending field, if any.
        message (str): What went wrong.
    """

    def __init__(self, path: str, line: int, field: str, message: str):
        location = f"{path}:{line}" if line is not None else str(path)
        detail = f" (field '{field}')" if field else ""
        super().__init__(f"{location}{detail}: {message}", field=field)
        self.path = str(path)
        self.line = line


class ModeMismatchError(RejectedInputError):
    """A regression-only operation was called on a classification model or vice versa."""


class FormatVersionError(RejectedInputError):
    """A model file was written with an unsupported format version."""


class DivergenceError(PyaxiologyError, ArithmeticError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"Training diverged in epoch {epoch} (loss={loss})")
        self.epoch = epoch
        self.loss = loss


class TermOverflowError(PyaxiologyError, OverflowError):
    """A value matching term is not finite. Raised only when term clamping is off."""

    def __init__(self, turn: int, r: float):
        super().__init__(f"Reward term for turn {turn} is not finite (r_t={r!r}); enable clamp_terms to bound it")
        self.turn = turn
        self.r = r


class TransportError(PyaxiologyError):
    """The word association service could not be reached."""


class ResponseDecodeError(PyaxiologyError):
    """The word association service returned a body that is not a list of word records."""


class ValueFunctionError(PyaxiologyError):
    """The value function failed on a specific text."""

    def __init__(self, text: str, cause: Exception):
        super().__init__(f"Value function failed on {text!r}: {cause}")
        self.text = text
