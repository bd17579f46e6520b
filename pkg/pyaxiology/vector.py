from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Union
from .common import ValueDimension, CODES
from .errors import RejectedInputError


@dataclass(frozen=True)
class ValueVector:
    """Ten utilities, one per value dimension, in canonical order.

    Args:
        components (tuple[float, ...]): Ten utilities in [-1, 1], ordered as ValueDimension.ordered().

    Raises:
        RejectedInputError: On wrong length, non-finite or out-of-range components.
    """

    components: tuple

    def __post_init__(self):
        components = tuple(float(x) for x in self.components)
        if len(components) != len(CODES):
            raise RejectedInputError(f"A value vector has {len(CODES)} components, got {len(components)}")
        for code, x in zip(CODES, components):
            if not math.isfinite(x) or x < -1.0 or x > 1.0:
                raise RejectedInputError(f"Utility for {code} out of range [-1, 1]: {x}", field=code)
        object.__setattr__(self, "components", components)

    @classmethod
    def zeros(cls) -> ValueVector:
        """Returns the all-zero vector."""
        return cls((0.0,) * len(CODES))

    @classmethod
    def unit(cls, dimension: ValueDimension, scale: float = 1.0) -> ValueVector:
        """Returns a vector with a single non-zero component."""
        components = [0.0] * len(CODES)
        components[dimension.index] = scale
        return cls(tuple(components))

    @classmethod
    def from_mapping(cls, values: Mapping[Union[ValueDimension, str], float]) -> ValueVector:
        """Create a vector from a dimension- or code-keyed mapping. Missing dimensions are 0."""
        components = [0.0] * len(CODES)
        for k, v in values.items():
            dim = k if isinstance(k, ValueDimension) else ValueDimension.from_code(k)
            components[dim.index] = v
        return cls(tuple(components))

    @classmethod
    def parse(cls, data: Union[Iterable[float], Mapping[str, float]]) -> ValueVector:
        """Accept either serialized form: an array in canonical order or a code-keyed map."""
        if isinstance(data, Mapping):
            return cls.from_mapping(data)
        return cls(tuple(data))

    def __getitem__(self, dimension: ValueDimension) -> float:
        return self.components[dimension.index]

    def __iter__(self):
        """Yield (code, utility) tuples in canonical order."""
        return iter(zip(CODES, self.components))

    def __len__(self) -> int:
        return len(self.components)

    def scaled(self, factor: float) -> ValueVector:
        """Returns the vector multiplied by a scalar."""
        return ValueVector(tuple(x * factor for x in self.components))

    def to_list(self) -> list[float]:
        """Returns the array serialization."""
        return list(self.components)
