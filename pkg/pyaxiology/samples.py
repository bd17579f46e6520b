from __future__ import annotations
from dataclasses import dataclass, field
from .common import ValueDimension, Vote
from .errors import RejectedInputError


@dataclass(frozen=True)
class Scenario:
    """A short social scenario.

    Args:
        id (str): Identifier, unique within a corpus.
        text (str): The scenario text. Must contain something other than whitespace.
    """

    id: str
    text: str

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise RejectedInputError(f"Scenario '{self.id}' has empty text", field="scenario")


@dataclass(frozen=True)
class Annotation:
    """One worker's vote on one scenario through one value lens.

    Args:
        scenario_id (str): The annotated scenario.
        dimension (ValueDimension): The value lens.
        worker_id (str): The annotator.
        vote (Vote): yes, no or unrelated.
        scenario_text (str): The scenario text as shown to the worker. Optional.
    """

    scenario_id: str
    dimension: ValueDimension
    worker_id: str
    vote: Vote
    scenario_text: str = ""


@dataclass(frozen=True)
class AnnotatedSample:
    """A scenario with an aggregated utility label for one dimension.

    Args:
        scenario (Scenario): The scenario.
        dimension (ValueDimension): The value dimension.
        label (int): -1, 0 or +1.
        agreement (int): Number of votes agreeing with the label.
    """

    scenario: Scenario
    dimension: ValueDimension
    label: int
    agreement: int = 0

    def __post_init__(self):
        if self.label not in (-1, 0, 1):
            raise RejectedInputError(f"Label must be -1, 0 or 1, got {self.label}", field="label")
        if self.agreement < 0:
            raise RejectedInputError(f"Agreement must be non-negative, got {self.agreement}", field="agreement")

    @property
    def id(self) -> str:
        return self.scenario.id

    @property
    def key(self) -> tuple[str, ValueDimension]:
        """The (scenario id, dimension) pair that identifies the sample in a corpus."""
        return self.scenario.id, self.dimension


@dataclass(frozen=True)
class DatasetSplit:
    """A train / valid / test partition of a corpus.

    Args:
        train (tuple[AnnotatedSample, ...]): Training samples.
        valid (tuple[AnnotatedSample, ...]): Validation samples.
        test (tuple[AnnotatedSample, ...]): Test samples.
        seed (int): The shuffle seed that produced the partition.
    """

    train: tuple = field(default_factory=tuple)
    valid: tuple = field(default_factory=tuple)
    test: tuple = field(default_factory=tuple)
    seed: int = 0

    def counts(self) -> tuple[int, int, int]:
        return len(self.train), len(self.valid), len(self.test)

    def parts(self) -> dict[str, tuple]:
        return {"train": self.train, "valid": self.valid, "test": self.test}
