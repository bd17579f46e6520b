from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence
import numpy as np
from ..abstract import Serializable
from ..calc import softmax
from ..common import ModelMode
from ..errors import DivergenceError, ModeMismatchError, RejectedInputError
from ..samples import AnnotatedSample
from ..util import PathLike, atomic_write_text
from .value_model import Features, ValueModel

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig(Serializable):
    """Training settings.

    Args:
        learning_rate (float): SGD step size. Default: 0.05.
        epochs (int): Passes over the training set. Default: 40.
        batch_size (int): Samples per update. 0 means one full-batch update per epoch. Default: 1.
        l2 (float): L2 penalty on the head weights. Default: 0.
        seed (int): Shuffle seed. Default: 0.
        mode (ModelMode): Head trained. Default: REGRESSION.
    """

    learning_rate: float = 0.05
    epochs: int = 40
    batch_size: int = 1
    l2: float = 0.0
    seed: int = 0
    mode: ModelMode = ModelMode.REGRESSION

    def __post_init__(self):
        self.validate()

    def validate(self):
        """Raises RejectedInputError on out-of-range settings."""
        if not self.learning_rate >= 0:
            raise RejectedInputError("learning_rate must be non-negative", field="learning_rate")
        if self.epochs < 1:
            raise RejectedInputError("epochs must be at least 1", field="epochs")
        if self.batch_size < 0:
            raise RejectedInputError("batch_size must be non-negative", field="batch_size")
        if self.l2 < 0:
            raise RejectedInputError("l2 must be non-negative", field="l2")

    @classmethod
    def from_dict(cls, dict_repr: dict, *args, strict: bool = False, **kwargs) -> TrainConfig:
        config = super().from_dict(
            dict_repr,
            *args,
            callback=lambda k, v: ModelMode(str(v).lower()) if k == "mode" else v,
            strict=strict,
            **kwargs,
        )
        config.validate()
        return config


@dataclass
class Batch:
    """Features of several samples packed for a vectorized forward pass.

    Args:
        rows (np.ndarray): Concatenated hashed n-gram indices of all samples.
        owner (np.ndarray): Position in the batch of the sample each row belongs to.
        prompts (np.ndarray): Prompt index of every sample.
        sizes (np.ndarray): Pooled vector count of every sample, prompt included.
        labels (np.ndarray): Labels in {-1, 0, 1}.
    """

    rows: np.ndarray
    owner: np.ndarray
    prompts: np.ndarray
    sizes: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.prompts)


def make_batch(features: Sequence[Features], labels: Sequence[int]) -> Batch:
    rows = [f.indices for f in features]
    return Batch(
        rows=np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64),
        owner=np.repeat(np.arange(len(features)), [len(r) for r in rows]),
        prompts=np.array([f.prompt for f in features], dtype=np.int64),
        sizes=np.array([f.size for f in features], dtype=np.float64),
        labels=np.asarray(labels, dtype=np.float64),
    )


@dataclass
class Gradients:
    """Loss gradients. Embedding gradients are sparse: one row per entry in `embedding_rows`, duplicates summed on
    update."""

    embedding_rows: np.ndarray
    embedding_grads: np.ndarray
    prompts: np.ndarray
    head_weights: np.ndarray
    head_bias: np.ndarray

    def dense_embeddings(self, hash_dim: int) -> np.ndarray:
        dense = np.zeros((hash_dim, self.embedding_grads.shape[1]))
        np.add.at(dense, self.embedding_rows, self.embedding_grads)
        return dense


def _pooled(model: ValueModel, batch: Batch) -> np.ndarray:
    h = np.zeros((len(batch), model.embed_dim))
    np.add.at(h, batch.owner, model.embeddings[batch.rows])
    h += model.prompts[batch.prompts]
    return h / batch.sizes[:, None]


def sample_losses(model: ValueModel, batch: Batch) -> np.ndarray:
    """Per-sample data loss, without the penalty."""
    z = _pooled(model, batch) @ model.head_weights.T + model.head_bias
    if model.mode == ModelMode.REGRESSION:
        return (np.tanh(z[:, 0] / 2.0) - batch.labels) ** 2
    classes = batch.labels.astype(np.int64) + 1
    log_norm = np.log(np.sum(np.exp(z - z.max(axis=1, keepdims=True)), axis=1)) + z.max(axis=1)
    return log_norm - z[np.arange(len(batch)), classes]


def loss_and_gradients(model: ValueModel, batch: Batch, l2: float = 0.0) -> tuple[float, np.ndarray, Gradients]:
    """Batch loss, per-sample data losses and gradients of the batch loss.

    Regression loss is the mean squared error of 2σ(z) − 1 against the label; classification loss is the mean
    cross-entropy with labels -1, 0, +1 as classes 0, 1, 2. Both add 0.5 * l2 * ||W||² on the head weights.
    """
    n = len(batch)
    h = _pooled(model, batch)
    z = h @ model.head_weights.T + model.head_bias
    if model.mode == ModelMode.REGRESSION:
        u = np.tanh(z[:, 0] / 2.0)
        losses = (u - batch.labels) ** 2
        dz = (2.0 * (u - batch.labels) * 0.5 * (1.0 - u * u) / n)[:, None]
    else:
        classes = batch.labels.astype(np.int64) + 1
        p = softmax(z, axis=1)
        losses = -np.log(np.maximum(p[np.arange(n), classes], np.finfo(np.float64).tiny))
        dz = p
        dz[np.arange(n), classes] -= 1.0
        dz /= n
    loss = float(losses.mean()) + 0.5 * l2 * float(np.sum(model.head_weights**2))
    dh = (dz @ model.head_weights) / batch.sizes[:, None]
    d_prompts = np.zeros_like(model.prompts)
    np.add.at(d_prompts, batch.prompts, dh)
    grads = Gradients(
        embedding_rows=batch.rows,
        embedding_grads=dh[batch.owner],
        prompts=d_prompts,
        head_weights=dz.T @ h + l2 * model.head_weights,
        head_bias=dz.sum(axis=0),
    )
    return loss, losses, grads


def apply_gradients(model: ValueModel, grads: Gradients, learning_rate: float):
    np.add.at(model.embeddings, grads.embedding_rows, -learning_rate * grads.embedding_grads)
    model.prompts -= learning_rate * grads.prompts
    model.head_weights -= learning_rate * grads.head_weights
    model.head_bias -= learning_rate * grads.head_bias


def encode_samples(model: ValueModel, samples: Sequence[AnnotatedSample]) -> list[Features]:
    """Featurize samples, hashing every distinct scenario text once."""
    cache = {}
    features = []
    for s in samples:
        if s.scenario.text not in cache:
            cache[s.scenario.text] = model.ngram_indices(s.scenario.text)
        features.append(Features(cache[s.scenario.text], s.dimension.index))
    return features


@dataclass
class TrainResult:
    """A trained model and its loss trace.

    Args:
        model (ValueModel): The trained model (the instance passed to train()).
        losses (list[float]): Mean training loss of every epoch.
    """

    model: ValueModel
    losses: list = field(default_factory=list)

    def save_losses(self, filename: PathLike):
        """Write the loss trace as two whitespace separated columns: epoch and loss."""
        lines = ["# epoch loss"] + [f"{i} {loss:.10g}" for i, loss in enumerate(self.losses, start=1)]
        atomic_write_text(filename, "\n".join(lines) + "\n")


def train(model: ValueModel, samples: Sequence[AnnotatedSample], config: TrainConfig = None) -> TrainResult:
    """Train a value model in place with minibatch SGD.

    Samples are shuffled every epoch with a generator seeded from config.seed. The recorded epoch loss is the mean
    per-sample loss observed during the epoch plus the penalty at the end of the epoch.

    Args:
        model (ValueModel): The model to train. Mutated.
        samples (Sequence[AnnotatedSample]): Training samples.
        config (TrainConfig): Settings. Default: TrainConfig().

    Returns:
        TrainResult: The model and its per-epoch loss trace.

    Raises:
        RejectedInputError: On an empty sample set.
        ModeMismatchError: If the model's mode differs from config.mode.
        DivergenceError: If an epoch loss is not finite.
    """
    config = config or TrainConfig()
    config.validate()
    if not samples:
        raise RejectedInputError("Cannot train on an empty sample set", field="samples")
    if model.mode != config.mode:
        raise ModeMismatchError(
            f"Model is a {model.mode.value} model but training was configured for {config.mode.value}", field="mode"
        )
    features = encode_samples(model, samples)
    labels = np.array([s.label for s in samples], dtype=np.float64)
    n = len(samples)
    batch_size = config.batch_size or n
    rng = np.random.default_rng(config.seed)
    result = TrainResult(model)
    per_sample = np.zeros(n)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            batch = make_batch([features[i] for i in idx], labels[idx])
            _, losses, grads = loss_and_gradients(model, batch, config.l2)
            per_sample[idx] = losses
            apply_gradients(model, grads, config.learning_rate)
        epoch_loss = float(per_sample.mean()) + 0.5 * config.l2 * float(np.sum(model.head_weights**2))
        if not math.isfinite(epoch_loss):
            raise DivergenceError(epoch, epoch_loss)
        result.losses.append(epoch_loss)
        logger.info("epoch %d/%d loss %.6f", epoch, config.epochs, epoch_loss)
    return result
