from __future__ import annotations
import enum
from .abstract import AutoIncrementEnum as _AutoIncrementEnum
from .errors import RejectedInputError


class ValueGroup(enum.Enum):
    """Enumerates the higher-order value groups. Used as metadata tags only."""

    OPENNESS_TO_CHANGE = enum.auto()
    SELF_ENHANCEMENT = enum.auto()
    CONSERVATION = enum.auto()
    SELF_TRANSCENDENCE = enum.auto()


class ValueDimension(_AutoIncrementEnum):
    """Enumerates the ten basic human values.

    Members are declared in canonical order, which is the column order of the per-dimension accuracy table. All
    serialized value vectors use this order.

    Properties:
        code (str): Short code, e.g. "ACH".
        group (ValueGroup): The higher-order group the value belongs to.
        goal (str): The defining goal of the value.
    """

    ACHIEVEMENT = ("ACH", ValueGroup.SELF_ENHANCEMENT, "personal success through demonstrating competence")
    BENEVOLENCE = ("BEN", ValueGroup.SELF_TRANSCENDENCE, "preserving and enhancing the welfare of close others")
    CONFORMITY = ("CON", ValueGroup.CONSERVATION, "restraint of actions likely to upset or harm others")
    HEDONISM = ("HED", ValueGroup.OPENNESS_TO_CHANGE, "pleasure or sensuous gratification for oneself")
    POWER = ("POW", ValueGroup.SELF_ENHANCEMENT, "social status and prestige, control over people and resources")
    SECURITY = ("SEC", ValueGroup.CONSERVATION, "safety, harmony, and stability of society and of self")
    SELF_DIRECTION = ("SD", ValueGroup.OPENNESS_TO_CHANGE, "independent thought and action")
    STIMULATION = ("STI", ValueGroup.OPENNESS_TO_CHANGE, "excitement, novelty, and challenge in life")
    TRADITION = ("TRA", ValueGroup.CONSERVATION, "respect for the customs and ideas of one's culture or religion")
    UNIVERSALISM = ("UNI", ValueGroup.SELF_TRANSCENDENCE, "understanding and protection for all people and nature")

    def __init__(self, code: str, group: ValueGroup, goal: str):
        """Use assigned value as properties."""
        self._code = code
        self._group = group
        self._goal = goal

    @property
    def code(self) -> str:
        """Returns the short code of the value."""
        return self._code

    @property
    def group(self) -> ValueGroup:
        """Returns the higher-order group of the value."""
        return self._group

    @property
    def goal(self) -> str:
        """Returns the defining goal of the value."""
        return self._goal

    @property
    def index(self) -> int:
        """Returns the 0-based canonical position."""
        return self.value - 1

    @classmethod
    def ordered(cls) -> list[ValueDimension]:
        """Returns all dimensions in canonical order."""
        return sorted(cls, key=lambda d: d.value)

    @classmethod
    def from_code(cls, code: str) -> ValueDimension:
        """Look up a dimension by short code or member name (case-insensitive).

        Raises:
            RejectedInputError: If nothing matches.
        """
        key = str(code).strip().upper().replace("-", "_")
        for dim in cls:
            if dim.code == key or dim.name == key:
                return dim
        raise RejectedInputError(f"Unknown value dimension '{code}'", field="dimension_code")


class Vote(enum.Enum):
    """Enumerates the three answers an annotator can give."""

    YES = "yes"
    NO = "no"
    UNRELATED = "unrelated"

    @classmethod
    def parse(cls, vote) -> Vote:
        """Parse a vote such as "yes" or " No ".

        Raises:
            RejectedInputError: On anything but yes, no or unrelated.
        """
        if isinstance(vote, cls):
            return vote
        try:
            return cls(str(vote).strip().lower())
        except ValueError:
            raise RejectedInputError(f"Unknown vote '{vote}'", field="vote") from None


class ModelMode(enum.Enum):
    """Enumerates the output heads of a value model."""

    REGRESSION = "regression"
    CLASSIFICATION = "classification"


CODES = tuple(d.code for d in ValueDimension.ordered())
