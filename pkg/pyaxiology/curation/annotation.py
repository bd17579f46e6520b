from __future__ import annotations
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union
import numpy as np
from ..calc import quantize_vote
from ..common import ValueDimension, Vote
from ..errors import RejectedInputError
from ..samples import Annotation, AnnotatedSample, Scenario

logger = logging.getLogger(__name__)

VOTE_ORDER = (Vote.YES, Vote.NO, Vote.UNRELATED)


@dataclass
class VoteGroup:
    """All votes cast on one (scenario, dimension) pair.

    Args:
        scenario (Scenario): The scenario.
        dimension (ValueDimension): The value lens.
        tally (Counter): Votes per Vote category.
    """

    scenario: Scenario
    dimension: ValueDimension
    tally: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.tally.values())

    def mode(self) -> tuple[Vote, int, bool]:
        """Returns the modal vote, its count and whether the mode is tied."""
        ranked = sorted(self.tally.items(), key=lambda kv: (-kv[1], VOTE_ORDER.index(kv[0])))
        vote, count = ranked[0]
        tied = len(ranked) > 1 and ranked[1][1] == count
        return vote, count, tied

    def counts(self) -> list[int]:
        """Vote counts in yes / no / unrelated order."""
        return [self.tally.get(v, 0) for v in VOTE_ORDER]


def tally_votes(annotations: Iterable[Annotation]) -> list[VoteGroup]:
    """Group votes by (scenario, dimension) in first-seen order.

    Raises:
        RejectedInputError: If a worker voted twice on the same pair.
    """
    groups: dict[tuple, VoteGroup] = {}
    voters = set()
    for a in annotations:
        key = (a.scenario_id, a.dimension)
        voter = (a.scenario_id, a.dimension, a.worker_id)
        if voter in voters:
            raise RejectedInputError(
                f"Worker '{a.worker_id}' voted twice on scenario '{a.scenario_id}' ({a.dimension.code})",
                field="worker_id",
            )
        voters.add(voter)
        if key not in groups:
            groups[key] = VoteGroup(Scenario(a.scenario_id, a.scenario_text or a.scenario_id), a.dimension)
        groups[key].tally[a.vote] += 1
    return list(groups.values())


def aggregate_annotations(
    annotations: Iterable[Annotation], min_agree: int = 3, dropped: list = None
) -> list[AnnotatedSample]:
    """Keep (scenario, dimension) pairs whose modal vote has at least min_agree votes.

    Args:
        annotations (Iterable[Annotation]): Raw votes.
        min_agree (int): Minimum number of agreeing votes. Default: 3.
        dropped (list): Optional, receives the VoteGroups that were dropped (too few agreements or a tied mode).

    Returns:
        list[AnnotatedSample]: One sample per retained pair, labelled with the quantized modal vote.
    """
    if min_agree < 1:
        raise RejectedInputError("min_agree must be at least 1", field="min_agree")
    samples = []
    n_dropped = 0
    for group in tally_votes(annotations):
        vote, count, tied = group.mode()
        if count >= min_agree and not tied:
            samples.append(AnnotatedSample(group.scenario, group.dimension, quantize_vote(vote), count))
        else:
            n_dropped += 1
            logger.debug("Dropped %s/%s with votes %s", group.scenario.id, group.dimension.code, group.counts())
            if dropped is not None:
                dropped.append(group)
    logger.info("Aggregated %d samples, dropped %d groups", len(samples), n_dropped)
    return samples


def make_augmented(annotations: Iterable[Annotation], min_agree: int = 3) -> list[AnnotatedSample]:
    """Like aggregate_annotations(), but low-agreement and tied groups are kept as "unrelated" (label 0).

    The agreement of a relabelled sample is its modal vote count.
    """
    if min_agree < 1:
        raise RejectedInputError("min_agree must be at least 1", field="min_agree")
    samples = []
    for group in tally_votes(annotations):
        vote, count, tied = group.mode()
        label = quantize_vote(vote) if count >= min_agree and not tied else 0
        samples.append(AnnotatedSample(group.scenario, group.dimension, label, count))
    return samples


VoteItem = Union[Sequence[Union[Vote, str]], Counter]


def _count_matrix(items: Sequence[VoteItem], categories: int) -> np.ndarray:
    """Rows are items, columns are vote categories."""
    if categories != len(VOTE_ORDER):
        raise RejectedInputError(f"Only {len(VOTE_ORDER)} vote categories are supported", field="categories")
    rows = []
    for item in items:
        if isinstance(item, Counter):
            tally = item
        else:
            tally = Counter(Vote.parse(v) for v in item)
        rows.append([tally.get(v, 0) for v in VOTE_ORDER])
    return np.array(rows, dtype=np.float64).reshape(len(rows), len(VOTE_ORDER))


def _observed_agreement(counts: np.ndarray) -> np.ndarray:
    """Per-item proportion of agreeing rater pairs."""
    n = counts.sum(axis=1)
    return (np.sum(counts * counts, axis=1) - n) / (n * (n - 1))


def fleiss_kappa(items: Sequence[VoteItem], categories: int = 3) -> float:
    """Fleiss' kappa for a fixed number of raters per item.

    Args:
        items (Sequence): One entry per item, either a list of votes or a Counter of votes.
        categories (int): Number of vote categories. Default: 3.

    Returns:
        float: Chance-corrected agreement. 1.0 when every rater agrees on a single category everywhere.

    Raises:
        RejectedInputError: No items, fewer than two raters, unequal rater counts, or zero expected disagreement
                without perfect observed agreement.
    """
    counts = _count_matrix(items, categories)
    if counts.shape[0] == 0:
        raise RejectedInputError("No items to compute agreement over")
    n = counts.sum(axis=1)
    if np.any(n != n[0]):
        raise RejectedInputError("Every item must have the same number of raters")
    if n[0] < 2:
        raise RejectedInputError("At least two raters per item are required")
    p_bar = float(np.mean(_observed_agreement(counts)))
    p_j = counts.sum(axis=0) / counts.sum()
    p_e = float(np.sum(p_j * p_j))
    if p_e == 1.0:
        if p_bar == 1.0:
            return 1.0
        raise RejectedInputError("Kappa is undefined: expected agreement is 1 but observed agreement is not")
    return (p_bar - p_e) / (1.0 - p_e)


@dataclass
class AgreementReport:
    """Inter-annotator agreement of a batch of annotations.

    Args:
        raw_agreement (float): Mean proportion of agreeing rater pairs per item.
        fleiss_kappa (float): Fleiss' kappa, or None when rater counts differ between items.
        per_scenario_counts (dict): "<scenario_id>/<code>" -> [yes, no, unrelated] counts.
    """

    raw_agreement: float
    fleiss_kappa: float
    per_scenario_counts: dict


def agreement_report(annotations: Iterable[Annotation]) -> AgreementReport:
    """Compute raw agreement and Fleiss' kappa over (scenario, dimension) groups with at least two votes."""
    groups = [g for g in tally_votes(annotations) if g.total >= 2]
    if not groups:
        raise RejectedInputError("No item has two or more votes")
    counts = _count_matrix([g.tally for g in groups], len(VOTE_ORDER))
    raw = float(np.mean(_observed_agreement(counts)))
    try:
        kappa = fleiss_kappa([g.tally for g in groups])
    except RejectedInputError as err:
        logger.warning("Fleiss' kappa not computed: %s", err)
        kappa = None
    per_item = {f"{g.scenario.id}/{g.dimension.code}": g.counts() for g in groups}
    return AgreementReport(raw, kappa, per_item)
