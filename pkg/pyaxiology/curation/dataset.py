from __future__ import annotations
import logging
import math
from collections import Counter, defaultdict
from typing import Sequence
import numpy as np
from ..common import ValueDimension
from ..errors import RejectedInputError
from ..samples import AnnotatedSample, DatasetSplit
from ..model.tokenizer import TokenizerConfig, tokenize

logger = logging.getLogger(__name__)

DEFAULT_RATIOS = (0.75, 0.15, 0.10)


def _cells(samples: Sequence[AnnotatedSample]) -> dict[tuple, list[AnnotatedSample]]:
    """Group samples by (dimension, label), keys in canonical order."""
    cells = defaultdict(list)
    for s in samples:
        cells[(s.dimension.value, s.label)].append(s)
    return {k: cells[k] for k in sorted(cells)}


def _allocate(sizes: dict, total: int, ratios: Sequence[float]) -> dict[tuple, list[int]]:
    """Per-cell [train, valid, test] counts.

    Every count is the floor of the cell share or one more. Extra valid and test samples go to the cells with the
    largest remainders until the global floor(N * ratio) counts are reached; remaining extras go to train first.
    """
    exact = {k: [n * r for r in ratios] for k, n in sizes.items()}
    alloc = {k: [math.floor(e + 1e-9) for e in shares] for k, shares in exact.items()}
    rem = {k: [max(0.0, e - a) for e, a in zip(exact[k], alloc[k])] for k in sizes}
    left = {k: n - sum(alloc[k]) for k, n in sizes.items()}
    bumped = {k: [False, False, False] for k in sizes}
    need = [0] + [math.floor(total * r + 1e-9) - sum(a[j] for a in alloc.values()) for j, r in enumerate(ratios) if j]
    for k, j in sorted(((k, j) for k in sizes for j in (1, 2)), key=lambda kj: (-rem[kj[0]][kj[1]], kj)):
        if need[j] > 0 and left[k] > 0:
            alloc[k][j] += 1
            bumped[k][j] = True
            need[j] -= 1
            left[k] -= 1
    for k in sizes:
        for j in sorted(range(3), key=lambda j: (j != 0, -rem[k][j], j)):
            if left[k] > 0 and not bumped[k][j]:
                alloc[k][j] += 1
                left[k] -= 1
    return alloc


def split_dataset(
    samples: Sequence[AnnotatedSample], ratios: Sequence[float] = DEFAULT_RATIOS, seed: int = 0
) -> DatasetSplit:
    """Split a corpus into train / valid / test, stratified by (dimension, label).

    Every (dimension, label) cell gives each part the floor of its exact share or one more, so no cell deviates from
    the ratios by more than one sample. Within that bound, valid and test receive floor(N * ratio) samples overall and
    the remainder goes to train.

    Args:
        samples (Sequence[AnnotatedSample]): The corpus.
        ratios (Sequence[float]): Train, valid and test fractions. Must be positive and sum to 1.
        seed (int): Shuffle seed.

    Returns:
        DatasetSplit: The partition.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise RejectedInputError(f"Ratios must be three positive fractions summing to 1, got {tuple(ratios)}")
    keys = set()
    for s in samples:
        if s.key in keys:
            raise RejectedInputError(f"Duplicate sample {s.id}/{s.dimension.code}")
        keys.add(s.key)
    rng = np.random.default_rng(seed)
    cells = _cells(samples)
    shuffled = {k: [cell[i] for i in rng.permutation(len(cell))] for k, cell in cells.items()}

    alloc = _allocate({k: len(cell) for k, cell in cells.items()}, len(samples), ratios)

    train, valid, test = [], [], []
    for k, cell in shuffled.items():
        n_train, n_valid, n_test = alloc[k]
        train.extend(cell[:n_train])
        valid.extend(cell[n_train : n_train + n_valid])
        test.extend(cell[n_train + n_valid :])
    logger.info("Split %d samples into %d / %d / %d (seed %d)", len(samples), len(train), len(valid), len(test), seed)
    return DatasetSplit(tuple(train), tuple(valid), tuple(test), seed)


def make_balanced(
    samples: Sequence[AnnotatedSample], seed: int = 0, dimension: ValueDimension = ValueDimension.BENEVOLENCE
) -> list[AnnotatedSample]:
    """Subsample the negative and neutral samples of the largest value split.

    For labels -1 and 0 the target is the mean count of that label over the other nine dimensions, rounded half up.
    Positive samples and other dimensions are kept. Sample order is preserved.

    Args:
        samples (Sequence[AnnotatedSample]): The corpus.
        seed (int): Subsampling seed.
        dimension (ValueDimension): The dimension to subsample. Default: BENEVOLENCE.

    Returns:
        list[AnnotatedSample]: The balanced corpus.
    """
    if not any(s.dimension == dimension for s in samples):
        raise RejectedInputError(f"Corpus has no {dimension.code} samples")
    counts = Counter((s.dimension, s.label) for s in samples)
    others = [d for d in ValueDimension.ordered() if d != dimension]
    rng = np.random.default_rng(seed)
    removed = set()
    for label in (-1, 0):
        target = int(math.floor(np.mean([counts[(d, label)] for d in others]) + 0.5))
        positions = [i for i, s in enumerate(samples) if s.dimension == dimension and s.label == label]
        if len(positions) <= target:
            continue
        keep = set(rng.choice(len(positions), size=target, replace=False).tolist())
        removed.update(p for j, p in enumerate(positions) if j not in keep)
        logger.info("Subsampled %s label %d from %d to %d", dimension.code, label, len(positions), target)
    return [s for i, s in enumerate(samples) if i not in removed]


def label_distribution(samples: Sequence[AnnotatedSample]) -> dict[str, dict[int, int]]:
    """Sample count per label for every dimension, keyed by short code."""
    counts = Counter((s.dimension, s.label) for s in samples)
    return {d.code: {label: counts[(d, label)] for label in (-1, 0, 1)} for d in ValueDimension.ordered()}


def corpus_stats(split: DatasetSplit, config: TokenizerConfig = None) -> dict[str, dict]:
    """Sample count, mean token count and unique token count per part and in total."""
    config = config or TokenizerConfig()
    parts = split.parts()
    parts["total"] = split.train + split.valid + split.test
    stats = {}
    for name, part in parts.items():
        token_lists = [tokenize(s.scenario.text, config) for s in part]
        vocabulary = {t for tokens in token_lists for t in tokens}
        mean = float(np.mean([len(t) for t in token_lists])) if token_lists else 0.0
        stats[name] = {"samples": len(part), "average_tokens": mean, "unique_tokens": len(vocabulary)}
    return stats
