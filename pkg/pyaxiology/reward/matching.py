"""Value matching reward between a persona and the turns of a dialogue.

Every turn is matched to the persona sentence whose value vector has the largest dot product with it (first sentence
wins ties). Each persona sentence keeps a repetition counter that starts at 1 and grows by one per matched turn. The
reward is

    R = (1 / N) * sum over turns of sign(r_t) * |r_t| ^ (sign(r_t) * gamma[m_t])

where r_t is the best dot product of turn t, m_t the matched sentence and N the persona size.
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from ..calc import dot, norm, sign
from ..errors import RejectedInputError, TermOverflowError
from ..vector import ValueVector

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-9


@dataclass
class MatchResult:
    """Full trace of a value matching run.

    Args:
        r (list[float]): Best dot product per turn.
        m (list[Optional[int]]): 1-based index of the matched persona sentence per turn. None when no sentence scored
                above -1.
        gamma (list[int]): Repetition counter per persona sentence, gamma[i - 1] for sentence i.
        gamma_unmatched (int): Counter of the bucket collecting unmatched turns.
        terms (list[float]): Contribution of every turn to the sum.
        clamped (list[bool]): Whether a turn's term was clamped to [-1, 1].
        R (float): The reward, sum of terms divided by the persona size.
        clamp_terms (bool): Whether clamping was enabled.
    """

    r: list = field(default_factory=list)
    m: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    gamma_unmatched: int = 1
    terms: list = field(default_factory=list)
    clamped: list = field(default_factory=list)
    R: float = 0.0
    clamp_terms: bool = False

    @property
    def n_personas(self) -> int:
        return len(self.gamma)

    @property
    def n_turns(self) -> int:
        return len(self.r)

    def gamma_of(self, turn: int) -> int:
        """Repetition counter used as exponent for a 0-based turn."""
        m = self.m[turn]
        return self.gamma_unmatched if m is None else self.gamma[m - 1]


def _check_normalized(vectors: Sequence[ValueVector], name: str):
    for i, v in enumerate(vectors):
        n = norm(v)
        if n != 0.0 and abs(n - 1.0) > NORM_TOLERANCE:
            raise RejectedInputError(f"{name}[{i}] is not normalized (norm {n!r})", field=name)


def _term(r: float, gamma: int) -> float:
    s = sign(r)
    if s == 0:
        return 0.0
    try:
        if s > 0:
            return abs(r) ** gamma
        return -(abs(r) ** -gamma)
    except (OverflowError, ZeroDivisionError):
        return -math.inf if s < 0 else math.inf


def match_values(
    persona_vectors: Sequence[ValueVector], utterance_vectors: Sequence[ValueVector], clamp_terms: bool = False
) -> MatchResult:
    """Compute the value matching reward of a dialogue against a persona.

    Args:
        persona_vectors (Sequence[ValueVector]): N >= 1 normalized persona vectors (norm 1 or 0).
        utterance_vectors (Sequence[ValueVector]): T >= 1 normalized utterance vectors.
        clamp_terms (bool): Clamp every term to [-1, 1]. Negative dot products close to 0 otherwise produce terms of
                unbounded magnitude. Default: False.

    Returns:
        MatchResult: The reward and its per-turn trace.

    Raises:
        RejectedInputError: On empty inputs or vectors that are not normalized.
        TermOverflowError: If a term is not finite and clamp_terms is off.
    """
    if not persona_vectors:
        raise RejectedInputError("Persona must have at least one sentence", field="persona")
    if not utterance_vectors:
        raise RejectedInputError("Dialogue must have at least one turn", field="utterances")
    _check_normalized(persona_vectors, "persona_vectors")
    _check_normalized(utterance_vectors, "utterance_vectors")

    result = MatchResult(clamp_terms=clamp_terms)
    for u in utterance_vectors:
        r_t, m_t = -1.0, None
        for i, p in enumerate(persona_vectors, start=1):
            d = dot(p, u)
            if d > r_t:
                r_t, m_t = d, i
        result.r.append(r_t)
        result.m.append(m_t)

    result.gamma = [1] * len(persona_vectors)
    for m_t in result.m:
        if m_t is None:
            result.gamma_unmatched += 1
        else:
            result.gamma[m_t - 1] += 1

    total = 0.0
    for t, r_t in enumerate(result.r):
        term = _term(r_t, result.gamma_of(t))
        clamped = False
        if clamp_terms and not -1.0 <= term <= 1.0:
            term, clamped = max(-1.0, min(1.0, term)), True
        elif not math.isfinite(term):
            raise TermOverflowError(t + 1, r_t)
        result.terms.append(term)
        result.clamped.append(clamped)
        total += term
    result.R = total / len(persona_vectors)
    if result.gamma_unmatched > 1:
        logger.debug("%d turns matched no persona sentence", result.gamma_unmatched - 1)
    return result
